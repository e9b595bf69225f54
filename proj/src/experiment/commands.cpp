#include "sidesync/experiment/commands.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <thread>

#include "sidesync/power_model.hpp"

namespace sidesync::experiment {

using json = nlohmann::json;
using netsim::SyncMethod;
using protocol::DeviceId;

namespace {

std::string g9(double v) { return fmt::format("{:.9g}", v); }

std::string opt9(const std::optional<double>& v) { return v ? g9(*v) : std::string(); }

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t used = 0;
  try {
    const double v = std::stod(s, &used);
    if (used == s.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

std::vector<std::string> linspace(const std::string& axis, const std::string& a, const std::string& b, int steps) {
  std::vector<std::string> out;
  const auto x = parse_number(a);
  const auto y = parse_number(b);
  if (x && y) {
    for (int i = 0; i < steps; ++i) {
      const double v = *x + (*y - *x) * i / (steps - 1);
      out.push_back(fmt::format("{:.12g}", v));
    }
    return out;
  }
  Duration d0, d1;
  try {
    d0 = parse_duration_text(a);
    d1 = parse_duration_text(b);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("sweep." + axis, e.what());
  }
  const __int128 span = static_cast<__int128>(d1.ns()) - d0.ns();
  for (int i = 0; i < steps; ++i) {
    const __int128 num = span * i;
    // Round half away from zero to whole nanoseconds.
    const __int128 q = (num >= 0 ? num + (steps - 1) / 2 : num - (steps - 1) / 2) / (steps - 1);
    out.push_back(std::to_string(d0.ns() + static_cast<std::int64_t>(q)));
  }
  return out;
}

/// Node at a dotted path, creating the leaf (null) when only it is missing.
/// Array elements may be written `devices[1]` or `devices.1`.
json& locate(json& root, const std::string& axis) {
  json* node = &root;
  std::string dotted;
  for (char ch : axis) {
    if (ch == '[') {
      dotted += '.';
    } else if (ch != ']') {
      dotted += ch;
    }
  }
  const auto parts = split(dotted, '.');
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& key = parts[i];
    const bool last = i + 1 == parts.size();
    if (node->is_array()) {
      const auto index = parse_number(key);
      if (!index || *index < 0 || *index != std::floor(*index) || *index >= static_cast<double>(node->size())) {
        throw ConfigError(axis, "no array element '" + key + "'");
      }
      node = &(*node)[static_cast<std::size_t>(*index)];
    } else if (node->is_object()) {
      if (!node->contains(key) && !last) throw ConfigError(axis, "no key '" + key + "' in the config tree");
      node = &(*node)[key];
    } else {
      throw ConfigError(axis, "'" + key + "' is below a scalar");
    }
  }
  return *node;
}

json value_json(const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  try {
    json j = json::parse(value);
    if (j.is_number()) return j;
  } catch (const json::exception&) {
  }
  return value;
}

std::string sweep_header(const std::optional<SweepSpec>& sweep) { return sweep ? axis_header(sweep->axis) + "," : ""; }

std::vector<std::pair<std::string, ExperimentConfig>> expand(const ExperimentConfig& config,
                                                             const std::optional<SweepSpec>& sweep) {
  std::vector<std::pair<std::string, ExperimentConfig>> out;
  if (!sweep) {
    out.emplace_back("", config);
    return out;
  }
  for (const auto& v : sweep->values) {
    auto c = apply_sweep_value(config, sweep->axis, v);
    out.emplace_back(axis_value(c, sweep->axis) + ",", std::move(c));
  }
  return out;
}

const netsim::DeviceSetup& device_of(const netsim::ScenarioConfig& s, DeviceId id) {
  for (const auto& d : s.devices) {
    if (d.config.id == id) return d;
  }
  throw ConfigError("flows", "unknown device " + std::to_string(protocol::raw(id)));
}

/// Per-attempt cost of the sender: SLSS (+ TimeREQ) on air, TimeRSP listened for.
double attempt_energy(const power::RadioPowerProfile& r, Duration t_ss, Duration t_req, Duration t_rsp, bool piggyback,
                      bool request) {
  if (!request) return r.p_tx * t_ss.seconds();
  return r.p_tx * (piggyback ? t_ss : t_ss + t_req).seconds() + r.p_rx * t_rsp.seconds();
}

std::string battery_header() { return "capacity_wh,n_attempts,overhead_w,battery_legacy_days,battery_flexi_days,battery_reduction\n"; }

std::string battery_line(const ExperimentConfig& c) {
  const auto row = analytic_row(c);
  auto fx = c.scenario.flexi;
  fx.n_attempts = c.battery.n_attempts;
  const double overhead = power::p_src_flexi(c.radio, fx) + power::p_dst_flexi(c.radio, fx);
  return fmt::format("{},{},{},{},{},{}\n", g9(c.battery.capacity_wh), c.battery.n_attempts, g9(overhead),
                     g9(row.battery_legacy_days), g9(row.battery_flexi_days), g9(row.battery_reduction));
}

}  // namespace

std::string resolve_axis(std::string_view axis) {
  static const std::map<std::string, std::string, std::less<>> aliases{
      {"n_attempts", "flexi.n_attempts"}, {"t_data", "flexi.t_data"}, {"t_win", "flexi.t_win"},
      {"t_sync", "beacon.t_sync"},        {"p_tx", "radio.p_tx"},     {"p_rx", "radio.p_rx"},
  };
  const auto it = aliases.find(axis);
  return it == aliases.end() ? std::string(axis) : it->second;
}

SweepSpec parse_sweep(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0 || eq + 1 == text.size()) {
    throw ConfigError("sweep", "expected AXIS=START:STOP:STEPS or AXIS=V1,V2,...");
  }
  SweepSpec s;
  s.axis = resolve_axis(text.substr(0, eq));
  const std::string rhs(text.substr(eq + 1));
  if (rhs.find(':') != std::string::npos) {
    const auto parts = split(rhs, ':');
    const auto steps = parts.size() == 3 ? parse_number(parts[2]) : std::nullopt;
    if (!steps || *steps != std::floor(*steps) || *steps < 2 || *steps > 1e6) {
      throw ConfigError("sweep." + s.axis, "range needs START:STOP:STEPS with an integer STEPS >= 2");
    }
    s.values = linspace(s.axis, parts[0], parts[1], static_cast<int>(*steps));
  } else {
    s.values = split(rhs, ',');
    if (s.values.size() < 2) throw ConfigError("sweep." + s.axis, "a sweep needs at least two points");
    for (const auto& v : s.values) {
      if (v.empty()) throw ConfigError("sweep." + s.axis, "empty value in list");
    }
  }
  return s;
}

ExperimentConfig apply_sweep_value(const ExperimentConfig& base, const std::string& axis, const std::string& value) {
  json tree = json::parse(serialize_config(base));
  json& node = locate(tree, axis);
  if (node.is_object() || node.is_array()) throw ConfigError(axis, "axis must name a scalar");
  node = value_json(value);
  return parse_config(tree.dump());
}

std::string axis_value(const ExperimentConfig& config, const std::string& axis) {
  json tree = json::parse(serialize_config(config));
  const json& node = locate(tree, axis);
  if (node.is_string()) return node.get<std::string>();
  if (node.is_number_float()) return fmt::format("{:.12g}", node.get<double>());
  return node.dump();
}

std::string axis_header(const std::string& axis) {
  const auto dot = axis.rfind('.');
  const std::string leaf = dot == std::string::npos ? axis : axis.substr(dot + 1);
  static const std::vector<std::string> durations{"eps_coarse", "data_len", "data_gap", "horizon",  "offset",
                                                  "period",     "length",   "phase",    "first_at", "sl_drx_cycle",
                                                  "coarse_sync_error"};
  if (leaf.rfind("t_", 0) == 0 || std::find(durations.begin(), durations.end(), leaf) != durations.end()) {
    return leaf + "_ns";
  }
  if (leaf.rfind("p_", 0) == 0) return leaf + "_w";
  return leaf;
}

AnalyticRow analytic_row(const ExperimentConfig& c) {
  AnalyticRow r;
  const auto& fx = c.scenario.flexi;
  const auto bc = c.effective_beacon();
  r.p_src = power::p_src_flexi(c.radio, fx);
  r.p_dst = power::p_dst_flexi(c.radio, fx);
  r.p_rx_beacon = power::p_rx_beacon(c.radio, bc);
  r.p_tx_beacon = power::p_tx_beacon(c.radio, bc);
  r.p_bth = power::beacon_power_threshold(c.radio.p_rx, bc).p_tx;
  auto at_na = fx;
  at_na.n_attempts = c.battery.n_attempts;
  const auto battery = c.battery.model();
  r.battery_legacy_days = power::battery_life(battery, 0.0);
  r.battery_flexi_days =
      power::battery_life(battery, power::p_src_flexi(c.radio, at_na) + power::p_dst_flexi(c.radio, at_na));
  r.battery_reduction = 1.0 - r.battery_flexi_days / r.battery_legacy_days;
  return r;
}

FlowAnalytic analytic_sync_power(const netsim::ScenarioConfig& s, const netsim::FlowStats& flow) {
  const netsim::FlowConfig* fc = nullptr;
  for (const auto& f : s.flows) {
    if (f.src == flow.src && f.dst == flow.dst) fc = &f;
  }
  if (!fc) throw ConfigError("flows", "flow not in scenario");
  const auto& src = device_of(s, flow.src).config;
  const auto& dst = device_of(s, flow.dst).config;
  const auto& fx = s.flexi;
  const auto& bc = s.beacon;
  const bool has_attempts = !flow.attempts.empty();
  const double na = flow.mean_attempts();

  FlowAnalytic out;
  switch (s.method) {
    case SyncMethod::FlexiCoarse:
    case SyncMethod::FlexiColdStart: {
      const double period = fc->period.value_or(fx.t_data).seconds();
      const bool request = s.method == SyncMethod::FlexiColdStart || s.coarse_handshake == protocol::Handshake::TimeRequest;
      if (has_attempts) {
        out.src_w = na * attempt_energy(src.radio, fx.t_ss, fx.t_req, fx.t_rsp, s.piggyback, request) / period;
      }
      double dst_w = dst.radio.p_rx * fx.effective_window().seconds() / dst.sl_drx_cycle.seconds();
      if (request) dst_w += dst.radio.p_tx * fx.t_rsp.seconds() / period;
      out.dst_w = dst_w;
      break;
    }
    case SyncMethod::TxBeacon:
      out.src_w = src.radio.p_rx * bc.t_win.seconds() / bc.t_sync.seconds();
      out.dst_w = dst.radio.p_tx * bc.t_ss.seconds() / bc.t_sync.seconds();
      break;
    case SyncMethod::RxBeacon:
      if (has_attempts) {
        const double period = fc->period.value_or(bc.t_sync).seconds();
        out.src_w = na * attempt_energy(src.radio, bc.t_ss, bc.t_req, bc.t_rsp, s.piggyback, true) / period;
      }
      break;
    case SyncMethod::Legacy:
      break;
  }
  return out;
}

std::string cmd_analytic(const ExperimentConfig& config, const std::optional<SweepSpec>& sweep) {
  std::string out = sweep_header(sweep) +
                    "p_src_w,p_dst_w,p_rx_beacon_w,p_tx_beacon_w,p_bth_w,battery_legacy_days,battery_flexi_days,"
                    "battery_reduction\n";
  for (const auto& [label, c] : expand(config, sweep)) {
    const auto r = analytic_row(c);
    out += fmt::format("{}{},{},{},{},{},{},{},{}\n", label, g9(r.p_src), g9(r.p_dst), g9(r.p_rx_beacon),
                       g9(r.p_tx_beacon), g9(r.p_bth), g9(r.battery_legacy_days), g9(r.battery_flexi_days),
                       g9(r.battery_reduction));
  }
  return out;
}

SimulateOutput cmd_simulate(const ExperimentConfig& config, const SimulateOptions& options) {
  if (options.runs == 0) throw ConfigError("runs", "must be at least 1");
  const auto points = expand(config, options.sweep);
  struct Job {
    std::size_t point;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (std::uint32_t k = 0; k < options.runs; ++k) jobs.push_back({p, points[p].second.seed + k});
  }
  if (options.trace && jobs.size() != 1) throw ConfigError("trace", "a trace needs a single run");

  std::vector<netsim::ScenarioConfig> scenarios;
  for (const auto& [label, c] : points) {
    auto s = c.resolved_scenario();
    s.trace = options.trace;
    scenarios.push_back(std::move(s));
  }

  std::vector<netsim::RunResult> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const auto& j = jobs[i];
        results[i] = netsim::run(scenarios[j.point], j.seed, points[j.point].second.effective_horizon());
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n_threads = std::clamp<std::size_t>(options.jobs, 1, jobs.size());
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SimulateOutput out;
  out.csv = sweep_header(options.sweep) +
            "seed,method,src,dst,data_generated,data_sent,data_delivered,data_dropped,data_missed,sync_successes,"
            "sync_failures,fast_paths,mean_attempts,max_attempts,sync_failure,max_delta_sync_ns,src_sync_w,"
            "src_analytic_w,src_rel_err,dst_sync_w,dst_analytic_w,dst_rel_err\n";
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& r = results[i];
    const auto& s = scenarios[jobs[i].point];
    for (const auto& f : r.flows) {
      std::optional<std::int64_t> max_delta;
      for (const auto& d : r.delta_sync) {
        const bool ours = (d.device == f.src && d.peer == f.dst) || (d.device == f.dst && d.peer == f.src);
        if (ours) max_delta = std::max(max_delta.value_or(0), d.delta.ns());
      }
      const auto ana = analytic_sync_power(s, f);
      const double src_w = r.average_power(f.src, netsim::PowerComponent::Sync);
      const double dst_w = r.average_power(f.dst, netsim::PowerComponent::Sync);
      auto rel = [](double sim, const std::optional<double>& a) -> std::optional<double> {
        if (!a || *a == 0.0) return std::nullopt;
        return (sim - *a) / *a;
      };
      out.csv += fmt::format(
          "{}{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", points[jobs[i].point].first,
          r.seed, netsim::to_string(s.method), protocol::raw(f.src), protocol::raw(f.dst), f.data_generated,
          f.data_sent, f.data_delivered, f.data_dropped, f.data_missed, f.sync_successes, f.sync_failures,
          f.fast_paths, g9(f.mean_attempts()), f.max_attempts(), f.sync_failure() ? "true" : "false",
          max_delta ? std::to_string(*max_delta) : std::string(), g9(src_w), opt9(ana.src_w), opt9(rel(src_w, ana.src_w)),
          g9(dst_w), opt9(ana.dst_w), opt9(rel(dst_w, ana.dst_w)));
    }
    for (const auto& line : r.trace) {
      out.trace += line;
      out.trace += '\n';
    }
  }
  if (options.trace) out.trace = "time_ns,device,event,details\n" + out.trace;
  return out;
}

std::string cmd_battery(const ExperimentConfig& config) { return battery_header() + battery_line(config); }

int exit_code_for(std::exception_ptr error) {
  try {
    std::rethrow_exception(error);
  } catch (const ConfigError&) {
    return kExitConfig;
  } catch (const netsim::ScenarioError&) {
    return kExitConfig;
  } catch (const protocol::ProtocolViolation&) {
    return kExitViolation;
  } catch (...) {
    return kExitError;
  }
}

std::string cmd_reproduce(std::string_view figure) {
  const ExperimentConfig defaults;
  if (figure == "fig5") {
    std::string out = "n_attempts,p_src_w,p_dst_w,p_total_w\n";
    for (const auto& [label, c] : expand(defaults, parse_sweep("n_attempts=1:10:10"))) {
      const auto r = analytic_row(c);
      out += fmt::format("{}{},{},{}\n", label, g9(r.p_src), g9(r.p_dst), g9(r.p_src + r.p_dst));
    }
    return out;
  }
  if (figure == "fig6a") {
    std::string out = "t_sync_ns,t_win_ns,p_rx_beacon_w,p_tx_beacon_w\n";
    for (const auto& [label, c] : expand(defaults, parse_sweep("t_sync=50s:1000s:20"))) {
      const auto r = analytic_row(c);
      out += fmt::format("{}{},{},{}\n", label, c.effective_beacon().t_win.ns(), g9(r.p_rx_beacon), g9(r.p_tx_beacon));
    }
    return out;
  }
  if (figure == "fig6b") {
    std::string out = "p_tx_w,p_rx_beacon_w,p_tx_beacon_w\n";
    for (const auto& [label, c] : expand(defaults, parse_sweep("p_tx=0:0.3:16"))) {
      const auto r = analytic_row(c);
      out += fmt::format("{}{},{}\n", label, g9(r.p_rx_beacon), g9(r.p_tx_beacon));
    }
    return out;
  }
  if (figure == "battery") {
    std::string out = battery_header();
    for (const auto& [label, c] : expand(defaults, parse_sweep("battery.capacity_wh=1,5,20"))) out += battery_line(c);
    return out;
  }
  throw ConfigError("figure", "unknown figure '" + std::string(figure) + "' (fig5, fig6a, fig6b, battery)");
}

}  // namespace sidesync::experiment
