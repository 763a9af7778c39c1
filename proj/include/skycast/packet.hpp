#pragma once

#include <cstdint>
#include <optional>

#include "skycast/time.hpp"

namespace skycast {

/// dest_vehicle value for uplink packets that are not bound to a particular
/// vehicle (single-stream uplink; the base station decides the fan-out).
inline constexpr std::int32_t kNoVehicle = -1;

/// One UDP datagram as it moves through a bearer queue. payload_bytes is the
/// application payload; overhead_bytes rides along on the wire and in buffer
/// occupancy. residual_bytes is what still has to cross the air interface at
/// the current hop (wire size when freshly enqueued, less after a partial
/// slot grant).
struct Packet {
  std::uint32_t frame_id = 0;
  std::uint16_t fragment_index = 0;
  std::uint16_t fragment_count = 1;
  std::uint32_t payload_bytes = 0;
  std::uint16_t overhead_bytes = 0;
  std::int32_t dest_vehicle = kNoVehicle;
  SimTime created_at = 0;
  SimTime enqueued_at = 0;   // at the current hop
  SimTime eligible_at = 0;   // earliest slot boundary that may schedule it
  std::uint32_t residual_bytes = 0;
  std::optional<SimTime> delivered_at;

  std::uint32_t wire_bytes() const { return payload_bytes + overhead_bytes; }
};

}  // namespace skycast
