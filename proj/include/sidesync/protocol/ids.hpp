#pragma once

#include <cstdint>
#include <type_traits>

namespace sidesync::protocol {

enum class DeviceId : std::uint32_t {};
enum class Imsi : std::uint64_t {};

template <typename E>
constexpr std::underlying_type_t<E> raw(E e) {
  return static_cast<std::underlying_type_t<E>>(e);
}

}  // namespace sidesync::protocol
