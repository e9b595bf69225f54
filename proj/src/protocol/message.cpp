#include "sidesync/protocol/message.hpp"

#include <stdexcept>

namespace sidesync::protocol {

std::string to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::Slss: return "SLSS";
    case MessageKind::TimeReq: return "TimeREQ";
    case MessageKind::TimeRsp: return "TimeRSP";
    case MessageKind::SlData: return "SLData";
  }
  return "?";
}

void Message::validate() const {
  if (on_air <= Duration::zero()) throw std::invalid_argument(to_string(kind) + " must have positive air time");
  if ((kind == MessageKind::TimeRsp || kind == MessageKind::Slss) && !timing) {
    throw std::invalid_argument(to_string(kind) + " must carry a timing payload");
  }
  if (carries_request && kind != MessageKind::Slss) throw std::invalid_argument("only SLSS can piggyback a request");
}

bool slss_matches(const Message& msg, DeviceId expected_dst) {
  if (msg.kind != MessageKind::Slss) throw std::invalid_argument("slss_matches called on " + to_string(msg.kind));
  return !msg.dst || *msg.dst == expected_dst;
}

}  // namespace sidesync::protocol
