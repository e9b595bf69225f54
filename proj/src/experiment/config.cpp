#include "sidesync/experiment/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sidesync::experiment {

using json = nlohmann::json;
using netsim::DeviceSetup;
using netsim::FlowConfig;
using protocol::DeviceId;

ConfigError::ConfigError(const std::string& path, const std::string& what)
    : std::runtime_error(path.empty() ? what : path + ": " + what), path_(path) {}

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

/// Read-once view of a JSON object; leftover keys are errors.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  const json* get(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string at(const std::string& key) const { return join(path_, key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError(join(path_, it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

Duration to_duration(const json& j, const std::string& path) {
  if (j.is_number_integer()) return Duration::from_ns(j.get<std::int64_t>());
  if (j.is_string()) {
    try {
      return parse_duration_text(j.get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(path, e.what());
    }
  }
  throw ConfigError(path, "expected a duration (integer ns or string with unit)");
}

double to_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

std::int64_t to_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<std::int64_t>();
}

std::uint64_t to_uint(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  throw ConfigError(path, "expected a non-negative integer");
}

bool to_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
  return j.get<bool>();
}

std::string to_str(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

template <typename T, typename F>
void read(Obj& o, const std::string& key, T& out, F conv) {
  if (const json* j = o.get(key)) out = conv(*j, o.at(key));
}

template <typename F>
auto parse_enum(const json& j, const std::string& path, F parse) {
  const std::string s = to_str(j, path);
  try {
    return parse(s);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

protocol::Handshake parse_handshake(const std::string& s) {
  for (auto h : {protocol::Handshake::Direct, protocol::Handshake::SlssOnly, protocol::Handshake::TimeRequest}) {
    if (protocol::to_string(h) == s) return h;
  }
  throw std::invalid_argument("unknown handshake '" + s + "'");
}

netsim::CollisionPolicy parse_collisions(const std::string& s) {
  if (s == "all_lost") return netsim::CollisionPolicy::AllLost;
  if (s == "capture_strongest") return netsim::CollisionPolicy::CaptureStrongest;
  throw std::invalid_argument("unknown collision policy '" + s + "'");
}

std::string collisions_name(netsim::CollisionPolicy p) {
  return p == netsim::CollisionPolicy::AllLost ? "all_lost" : "capture_strongest";
}

void read_radio(Obj o, power::RadioPowerProfile& r) {
  read(o, "p_tx", r.p_tx, to_number);
  read(o, "p_rx", r.p_rx, to_number);
  read(o, "p_sleep", r.p_sleep, to_number);
  o.finish();
}

DeviceSetup read_device(const json& j, const std::string& path, const ExperimentConfig& c) {
  Obj o(j, path);
  DeviceSetup d;
  auto& dc = d.config;
  const json* id = o.get("id");
  if (!id) throw ConfigError(o.at("id"), "required");
  const auto raw_id = to_uint(*id, o.at("id"));
  if (raw_id > UINT32_MAX) throw ConfigError(o.at("id"), "device id out of range");
  dc.id = DeviceId{static_cast<std::uint32_t>(raw_id)};
  dc.imsi = protocol::Imsi{raw_id};
  if (const json* v = o.get("imsi")) dc.imsi = protocol::Imsi{to_uint(*v, o.at("imsi"))};
  if (const json* v = o.get("power_class")) dc.power_class = parse_enum(*v, o.at("power_class"), power::parse_power_class);
  dc.radio = c.radio;
  if (const json* v = o.get("radio")) read_radio(Obj(*v, o.at("radio")), dc.radio);
  dc.sl_drx_cycle = c.scenario.flexi.t_data;
  read(o, "sl_drx_cycle", dc.sl_drx_cycle, to_duration);
  if (const json* v = o.get("coverage")) dc.coverage = parse_enum(*v, o.at("coverage"), protocol::parse_coverage);
  if (const json* v = o.get("drift_ppm")) dc.clock.drift = Drift::from_ppm(to_number(*v, o.at("drift_ppm")));
  if (const json* v = o.get("offset")) dc.clock.initial_offset = to_duration(*v, o.at("offset"));
  if (const json* v = o.get("coarse_sync_error")) dc.coarse_sync_error = to_duration(*v, o.at("coarse_sync_error"));
  if (const json* v = o.get("position")) {
    if (!v->is_array() || v->size() != 2) throw ConfigError(o.at("position"), "expected [x, y] in metres");
    d.position = {to_number((*v)[0], o.at("position[0]")), to_number((*v)[1], o.at("position[1]"))};
  }
  if (const json* v = o.get("busy")) {
    Obj b(*v, o.at("busy"));
    netsim::BusyPattern p;
    read(b, "period", p.period, to_duration);
    read(b, "length", p.length, to_duration);
    read(b, "phase", p.phase, to_duration);
    b.finish();
    d.busy = p;
  }
  o.finish();
  try {
    dc.validate();
    if (d.busy) d.busy->validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
  return d;
}

FlowConfig read_flow(const json& j, const std::string& path) {
  Obj o(j, path);
  FlowConfig f;
  for (const char* key : {"src", "dst"}) {
    const json* v = o.get(key);
    if (!v) throw ConfigError(o.at(key), "required");
    const auto id = to_uint(*v, o.at(key));
    if (id > UINT32_MAX) throw ConfigError(o.at(key), "device id out of range");
    (std::string(key) == "src" ? f.src : f.dst) = DeviceId{static_cast<std::uint32_t>(id)};
  }
  if (const json* v = o.get("period")) f.period = to_duration(*v, o.at("period"));
  if (const json* v = o.get("first_at")) f.first_at = to_duration(*v, o.at("first_at"));
  read(o, "one_shot", f.one_shot, to_bool);
  o.finish();
  return f;
}

std::vector<DeviceSetup> default_devices(const ExperimentConfig& c) {
  std::vector<DeviceSetup> out(2);
  for (std::uint32_t i = 0; i < 2; ++i) {
    auto& dc = out[i].config;
    dc.id = DeviceId{i + 1};
    dc.imsi = protocol::Imsi{1001ULL * (i + 1)};
    dc.radio = c.radio;
    dc.sl_drx_cycle = c.scenario.flexi.t_data;
  }
  out[1].position = {100.0, 0.0};
  return out;
}

json duration_json(Duration d) { return d.ns(); }

}  // namespace

Duration parse_duration_text(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.' || text[i] == '-' ||
                             text[i] == '+')) {
    ++i;
  }
  const std::string number(text.substr(0, i));
  const std::string unit(text.substr(i));
  if (number.empty()) throw std::invalid_argument("duration '" + std::string(text) + "' has no number");
  long double scale = 0;
  if (unit == "ns") scale = 1;
  else if (unit == "us") scale = 1e3L;
  else if (unit == "ms") scale = 1e6L;
  else if (unit == "s") scale = 1e9L;
  else if (unit == "min") scale = 60e9L;
  else if (unit == "h") scale = 3600e9L;
  else throw std::invalid_argument("duration '" + std::string(text) + "' needs a unit: ns, us, ms, s, min or h");
  std::size_t used = 0;
  long double v = 0;
  try {
    v = std::stold(number, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != number.size()) throw std::invalid_argument("duration '" + std::string(text) + "' is not a number");
  const long double ns = v * scale;
  const long double rounded = std::round(ns);
  if (std::fabs(ns - rounded) > 1e-3L || std::fabs(rounded) > 9.2e18L) {
    throw std::invalid_argument("duration '" + std::string(text) + "' is not a whole number of nanoseconds");
  }
  return Duration::from_ns(static_cast<std::int64_t>(rounded));
}

power::BatteryModel BatterySection::model() const {
  const auto reference = power::BatteryModel::calibrated(reference_capacity_wh, baseline_days);
  power::BatteryModel m{capacity_wh, reference.baseline_avg_power};
  m.validate();
  return m;
}

power::BeaconParams ExperimentConfig::effective_beacon() const {
  power::BeaconParams b = scenario.beacon;
  if (beacon_optimal_window) b.t_win = power::optimal_window(b.t_sync, scenario.x_src, scenario.x_dst, scenario.eps_coarse);
  return b;
}

Duration ExperimentConfig::effective_horizon() const {
  if (horizon) return *horizon;
  const bool beacon = scenario.method == netsim::SyncMethod::TxBeacon || scenario.method == netsim::SyncMethod::RxBeacon;
  Duration period = beacon ? scenario.beacon.t_sync : scenario.flexi.t_data;
  for (const auto& f : scenario.flows) {
    if (f.period) period = std::max(period, *f.period);
  }
  for (const auto& d : scenario.devices) period = std::max(period, d.config.sl_drx_cycle);
  return period * 100;
}

netsim::ScenarioConfig ExperimentConfig::resolved_scenario() const {
  netsim::ScenarioConfig s = scenario;
  s.beacon = effective_beacon();
  return s;
}

ExperimentConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  ExperimentConfig c;
  auto& s = c.scenario;
  Obj o(root, "");

  read(o, "seed", c.seed, to_uint);
  if (const json* v = o.get("horizon")) c.horizon = to_duration(*v, "horizon");
  if (const json* v = o.get("method")) s.method = parse_enum(*v, "method", netsim::parse_sync_method);
  if (const json* v = o.get("coarse_handshake")) s.coarse_handshake = parse_enum(*v, "coarse_handshake", parse_handshake);
  if (const json* v = o.get("radio")) read_radio(Obj(*v, "radio"), c.radio);
  if (const json* v = o.get("flexi")) {
    Obj f(*v, "flexi");
    if (const json* n = f.get("n_attempts")) s.flexi.n_attempts = static_cast<int>(to_int(*n, f.at("n_attempts")));
    read(f, "t_data", s.flexi.t_data, to_duration);
    read(f, "t_ss", s.flexi.t_ss, to_duration);
    read(f, "t_req", s.flexi.t_req, to_duration);
    read(f, "t_rsp", s.flexi.t_rsp, to_duration);
    read(f, "t_win", s.flexi.t_win, to_duration);
    f.finish();
  }
  if (const json* v = o.get("beacon")) {
    Obj b(*v, "beacon");
    read(b, "t_sync", s.beacon.t_sync, to_duration);
    if (const json* n = b.get("n_attempts")) s.beacon.n_attempts = static_cast<int>(to_int(*n, b.at("n_attempts")));
    read(b, "t_ss", s.beacon.t_ss, to_duration);
    read(b, "t_req", s.beacon.t_req, to_duration);
    read(b, "t_rsp", s.beacon.t_rsp, to_duration);
    read(b, "t_win", s.beacon.t_win, to_duration);
    read(b, "optimal_window", c.beacon_optimal_window, to_bool);
    b.finish();
  }
  if (const json* v = o.get("drift")) {
    Obj d(*v, "drift");
    if (const json* x = d.get("x_src_ppm")) s.x_src = Drift::from_ppm(to_number(*x, d.at("x_src_ppm")));
    if (const json* x = d.get("x_dst_ppm")) s.x_dst = Drift::from_ppm(to_number(*x, d.at("x_dst_ppm")));
    d.finish();
  }
  read(o, "eps_coarse", s.eps_coarse, to_duration);
  read(o, "piggyback", s.piggyback, to_bool);
  read(o, "ranging", s.ranging, to_bool);
  read(o, "dst_identity_known", s.dst_identity_known, to_bool);
  read(o, "alignment", s.alignment, to_number);
  read(o, "data_len", s.data_len, to_duration);
  read(o, "data_gap", s.data_gap, to_duration);
  if (const json* v = o.get("channel")) {
    Obj ch(*v, "channel");
    read(ch, "comm_range_m", s.comm_range_m, to_number);
    if (const json* p = ch.get("collisions")) s.collisions = parse_enum(*p, ch.at("collisions"), parse_collisions);
    ch.finish();
  }
  if (const json* v = o.get("max_exchanges")) s.max_exchanges = to_uint(*v, "max_exchanges");
  if (const json* v = o.get("battery")) {
    Obj b(*v, "battery");
    read(b, "capacity_wh", c.battery.capacity_wh, to_number);
    read(b, "reference_capacity_wh", c.battery.reference_capacity_wh, to_number);
    read(b, "baseline_days", c.battery.baseline_days, to_number);
    if (const json* n = b.get("n_attempts")) c.battery.n_attempts = static_cast<int>(to_int(*n, b.at("n_attempts")));
    b.finish();
  }

  // Devices depend on the radio and t_data defaults read above.
  if (const json* v = o.get("devices")) {
    if (!v->is_array()) throw ConfigError("devices", "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i) {
      s.devices.push_back(read_device((*v)[i], "devices[" + std::to_string(i) + "]", c));
    }
  }
  bool flows_given = false;
  if (const json* v = o.get("flows")) {
    if (!v->is_array()) throw ConfigError("flows", "expected an array");
    flows_given = true;
    for (std::size_t i = 0; i < v->size(); ++i) s.flows.push_back(read_flow((*v)[i], "flows[" + std::to_string(i) + "]"));
  }
  o.finish();

  if (s.devices.empty()) {
    s.devices = default_devices(c);
    if (!flows_given) s.flows.push_back(FlowConfig{DeviceId{1}, DeviceId{2}, std::nullopt, std::nullopt, false});
  }

  try {
    c.radio.validate();
    s.validate();
    c.effective_beacon().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("", e.what());
  }
  if (c.horizon && *c.horizon <= Duration::zero()) throw ConfigError("horizon", "must be positive");
  if (!(c.battery.capacity_wh > 0.0) || !(c.battery.reference_capacity_wh > 0.0) || !(c.battery.baseline_days > 0.0)) {
    throw ConfigError("battery", "capacities and baseline days must be positive");
  }
  if (c.battery.n_attempts < 1) throw ConfigError("battery.n_attempts", "must be at least 1");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  const auto& s = c.scenario;
  auto radio_json = [](const power::RadioPowerProfile& r) {
    return json{{"p_tx", r.p_tx}, {"p_rx", r.p_rx}, {"p_sleep", r.p_sleep}};
  };
  json root;
  root["seed"] = c.seed;
  if (c.horizon) root["horizon"] = duration_json(*c.horizon);
  root["method"] = netsim::to_string(s.method);
  root["coarse_handshake"] = protocol::to_string(s.coarse_handshake);
  root["radio"] = radio_json(c.radio);
  root["flexi"] = {{"n_attempts", s.flexi.n_attempts}, {"t_data", duration_json(s.flexi.t_data)},
                   {"t_ss", duration_json(s.flexi.t_ss)},     {"t_req", duration_json(s.flexi.t_req)},
                   {"t_rsp", duration_json(s.flexi.t_rsp)},   {"t_win", duration_json(s.flexi.t_win)}};
  root["beacon"] = {{"t_sync", duration_json(s.beacon.t_sync)}, {"n_attempts", s.beacon.n_attempts},
                    {"t_ss", duration_json(s.beacon.t_ss)},     {"t_req", duration_json(s.beacon.t_req)},
                    {"t_rsp", duration_json(s.beacon.t_rsp)},   {"t_win", duration_json(s.beacon.t_win)},
                    {"optimal_window", c.beacon_optimal_window}};
  root["drift"] = {{"x_src_ppm", s.x_src.ppm()}, {"x_dst_ppm", s.x_dst.ppm()}};
  root["eps_coarse"] = duration_json(s.eps_coarse);
  root["piggyback"] = s.piggyback;
  root["ranging"] = s.ranging;
  root["dst_identity_known"] = s.dst_identity_known;
  root["alignment"] = s.alignment;
  root["data_len"] = duration_json(s.data_len);
  root["data_gap"] = duration_json(s.data_gap);
  root["channel"] = {{"comm_range_m", s.comm_range_m}, {"collisions", collisions_name(s.collisions)}};
  if (s.max_exchanges) root["max_exchanges"] = *s.max_exchanges;
  root["battery"] = {{"capacity_wh", c.battery.capacity_wh},
                     {"reference_capacity_wh", c.battery.reference_capacity_wh},
                     {"baseline_days", c.battery.baseline_days},
                     {"n_attempts", c.battery.n_attempts}};

  json devices = json::array();
  for (const auto& d : s.devices) {
    const auto& dc = d.config;
    json j;
    j["id"] = protocol::raw(dc.id);
    j["imsi"] = protocol::raw(dc.imsi);
    j["power_class"] = std::string(power::power_class(dc.power_class).name);
    if (!(dc.radio == c.radio)) j["radio"] = radio_json(dc.radio);
    if (dc.sl_drx_cycle != s.flexi.t_data) j["sl_drx_cycle"] = duration_json(dc.sl_drx_cycle);
    j["coverage"] = protocol::to_string(dc.coverage);
    if (dc.clock.drift) j["drift_ppm"] = dc.clock.drift->ppm();
    if (dc.clock.initial_offset) j["offset"] = duration_json(*dc.clock.initial_offset);
    if (dc.coarse_sync_error) j["coarse_sync_error"] = duration_json(*dc.coarse_sync_error);
    j["position"] = {d.position.x, d.position.y};
    if (d.busy) {
      j["busy"] = {{"period", duration_json(d.busy->period)},
                   {"length", duration_json(d.busy->length)},
                   {"phase", duration_json(d.busy->phase)}};
    }
    devices.push_back(std::move(j));
  }
  root["devices"] = std::move(devices);

  json flows = json::array();
  for (const auto& f : s.flows) {
    json j{{"src", protocol::raw(f.src)}, {"dst", protocol::raw(f.dst)}, {"one_shot", f.one_shot}};
    if (f.period) j["period"] = duration_json(*f.period);
    if (f.first_at) j["first_at"] = duration_json(*f.first_at);
    flows.push_back(std::move(j));
  }
  root["flows"] = std::move(flows);
  return root.dump(2) + "\n";
}

}  // namespace sidesync::experiment
