#pragma once

#include <cstdint>
#include <queue>
#include <stdexcept>
#include <vector>

#include "sidesync/timebase.hpp"

namespace sidesync::netsim {

/// Min-queue of timestamped payloads, popped in (at, seq) order where seq is
/// the insertion counter. Popping out of order is a logic error.
template <typename Payload>
class EventQueue {
 public:
  struct Entry {
    SimTime at;
    std::uint64_t seq;
    Payload payload;
  };

  std::uint64_t push(SimTime at, Payload payload) {
    if (at < last_) throw std::logic_error("event scheduled in the past");
    const auto seq = next_seq_++;
    heap_.push(Entry{at, seq, std::move(payload)});
    return seq;
  }

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  SimTime next_time() const { return heap_.top().at; }
  SimTime last_popped() const { return last_; }

  Entry pop() {
    if (heap_.empty()) throw std::logic_error("pop from empty event queue");
    Entry e = heap_.top();
    heap_.pop();
    if (e.at < last_) throw std::logic_error("event queue popped out of order");
    last_ = e.at;
    return e;
  }

 private:
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  std::uint64_t next_seq_ = 0;
  SimTime last_{};
};

}  // namespace sidesync::netsim
