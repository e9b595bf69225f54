#pragma once

// Invariants every simulator run must satisfy, checked from the trace and
// the energy reports. Each check returns an empty string on success and a
// description of the first violation otherwise.
#include <algorithm>
#include <fmt/format.h>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sidesync/netsim/simulator.hpp"
#include "support/trace.hpp"

namespace prop {

using Interval = std::pair<std::int64_t, std::int64_t>;

inline std::map<std::uint32_t, std::vector<Interval>> tx_intervals(const std::vector<tr::Line>& t) {
  std::map<std::uint32_t, std::vector<Interval>> out;
  for (const auto& l : t) {
    if (l.event == "tx") out[l.dev].emplace_back(l.t, l.t + l.num("len_ns"));
  }
  return out;
}

inline std::int64_t union_length(std::vector<Interval> v, std::int64_t stop) {
  std::sort(v.begin(), v.end());
  std::int64_t total = 0, cur_a = 0, cur_b = 0;
  bool open = false;
  for (auto [a, b] : v) {
    a = std::min(a, stop);
    b = std::min(b, stop);
    if (b <= a) continue;
    if (open && a <= cur_b) {
      cur_b = std::max(cur_b, b);
      continue;
    }
    if (open) total += cur_b - cur_a;
    cur_a = a;
    cur_b = b;
    open = true;
  }
  if (open) total += cur_b - cur_a;
  return total;
}

/// Dwell partitions the horizon, and TX dwell is exactly the union of the
/// traced transmissions (TX outranks every other state).
inline std::string energy_conserved(const sidesync::netsim::RunResult& r, const std::vector<tr::Line>& t) {
  const auto tx = tx_intervals(t);
  for (const auto& d : r.devices) {
    const auto id = sidesync::protocol::raw(d.id);
    if (d.energy.dwell.total() != r.horizon.ns()) {
      return fmt::format("device {}: dwell {} ns != horizon {} ns", id, d.energy.dwell.total(), r.horizon.ns());
    }
    const auto it = tx.find(id);
    const std::int64_t want = it == tx.end() ? 0 : union_length(it->second, r.horizon.ns());
    if (d.energy.dwell.tx() != want) {
      return fmt::format("device {}: tx dwell {} ns != traced {} ns", id, d.energy.dwell.tx(), want);
    }
  }
  return {};
}

/// No decoded reception overlaps a transmission of the same device.
inline std::string half_duplex(const std::vector<tr::Line>& t) {
  const auto tx = tx_intervals(t);
  for (const auto& l : t) {
    if (l.event != "rx") continue;
    const auto it = tx.find(l.dev);
    if (it == tx.end()) continue;
    const std::int64_t a = l.num("start_ns"), b = l.t;
    for (const auto& [s, e] : it->second) {
      if (s < b && a < e) return fmt::format("device {} decoded {} at {} while transmitting [{}, {})", l.dev, l.kind, a, s, e);
    }
  }
  return {};
}

/// Trace time never goes backwards, and every decoded message was sent by
/// its claimed sender exactly one propagation delay earlier.
inline std::string causal(const std::vector<tr::Line>& t) {
  std::map<std::pair<std::uint32_t, std::int64_t>, std::vector<std::string>> sent;
  std::int64_t last = 0;
  for (const auto& l : t) {
    if (l.t < last) return fmt::format("trace time goes back from {} to {}", last, l.t);
    last = l.t;
    if (l.event == "tx") sent[{l.dev, l.t}].push_back(l.kind);
    if (l.event != "rx") continue;
    const std::int64_t start = l.num("start_ns"), delay = l.num("delay_ns");
    if (delay < 0 || start > l.t) return fmt::format("rx at {} has start {} and delay {}", l.t, start, delay);
    const auto from = static_cast<std::uint32_t>(l.num("from"));
    const auto it = sent.find({from, start - delay});
    if (it == sent.end() || std::find(it->second.begin(), it->second.end(), l.kind) == it->second.end()) {
      return fmt::format("device {} decoded {} from {} with no matching transmission at {}", l.dev, l.kind, from, start - delay);
    }
  }
  return {};
}

/// After a fast-path decision the SRC's next transmission is data, not SLSS.
inline std::string fast_path_skips_slss(const std::vector<tr::Line>& t) {
  std::map<std::uint32_t, std::int64_t> pending;  // device → time of FastPath
  for (const auto& l : t) {
    if (l.event == "FastPath") pending[l.dev] = l.t;
    if (l.event != "tx") continue;
    const auto it = pending.find(l.dev);
    if (it == pending.end()) continue;
    if (l.kind != "SLData") return fmt::format("device {} sent {} at {} after fast path at {}", l.dev, l.kind, l.t, it->second);
    pending.erase(it);
  }
  return {};
}

/// Every addressed SLSS decoded by someone else is rejected on the spot, and
/// nobody answers a request that was neither broadcast nor meant for them.
inline std::string pseudo_unique(const std::vector<tr::Line>& t) {
  std::map<std::uint32_t, std::vector<std::string>> asked;  // responder → requesters heard
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto& l = t[i];
    if (l.event == "rx" && (l.kind == "TimeREQ" || l.kind == "SLSS") &&
        (l.kv.at("dst") == "*" || l.kv.at("dst") == std::to_string(l.dev))) {
      asked[l.dev].push_back(l.kv.at("from"));
    }
    if (l.event == "tx" && l.kind == "TimeRSP") {
      const auto& heard = asked[l.dev];
      if (std::find(heard.begin(), heard.end(), l.kv.at("dst")) == heard.end()) {
        return fmt::format("device {} answered {} at {} without a request", l.dev, l.kv.at("dst"), l.t);
      }
    }
    if (l.event != "rx" || l.kind != "SLSS" || l.kv.at("dst") == "*" || l.kv.at("dst") == std::to_string(l.dev)) continue;
    bool rejected = false;
    for (std::size_t j = i + 1; j < t.size() && t[j].t == l.t; ++j) {
      if (t[j].dev == l.dev && t[j].event == "FalseAlarmRejected") rejected = true;
    }
    if (!rejected) return fmt::format("device {} accepted SLSS for {} at {}", l.dev, l.kv.at("dst"), l.t);
  }
  return {};
}

}  // namespace prop
