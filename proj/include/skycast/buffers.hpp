#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>

#include "skycast/packet.hpp"
#include "skycast/topology.hpp"

namespace skycast {

enum class EnqueueResult : std::uint8_t { Accepted, DroppedOverflow };

/// Conservation counters for one bearer. Every packet ever offered to the
/// queue ends up in exactly one of: delivered, dropped_overflow,
/// dropped_channel, or still queued. ledger_ok() checks that identity and is
/// asserted after every run.
struct BearerCounters {
  std::uint64_t offered_packets = 0;
  std::uint64_t offered_bytes = 0;  // wire bytes
  std::uint64_t delivered_packets = 0;
  std::uint64_t delivered_bytes = 0;
  std::uint64_t dropped_overflow_packets = 0;
  std::uint64_t dropped_overflow_bytes = 0;
  std::uint64_t dropped_channel_packets = 0;
  std::uint64_t dropped_channel_bytes = 0;
};

class BufferAccountingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// One-direction FIFO transmit buffer (UAV->BS, or BS->vehicle k) with
/// drop-tail admission: a packet is accepted only if its whole wire size
/// fits, otherwise it is dropped and the queue is untouched. Service is
/// strictly head-of-line; a partially served head stays put with a reduced
/// residual. Occupancy is the sum of residual sizes and never exceeds
/// capacity.
class Bearer {
 public:
  Bearer(Direction dir, std::int32_t vehicle, std::uint64_t capacity_bytes)
      : dir_(dir), vehicle_(vehicle), capacity_bytes_(capacity_bytes) {}

  Direction direction() const { return dir_; }
  std::int32_t vehicle() const { return vehicle_; }
  std::uint64_t capacity_bytes() const { return capacity_bytes_; }

  EnqueueResult enqueue(Packet p, SimTime now);

  bool empty() const { return queue_.empty(); }
  std::size_t queued_packets() const { return queue_.size(); }
  std::uint64_t occupancy_bytes() const { return occupancy_bytes_; }

  /// Moves the eligibility frontier forward: packets whose eligible_at is at
  /// or before t become visible to the slot scheduler. Amortised O(1) per
  /// packet over a run.
  void advance_eligibility(SimTime t);

  std::size_t eligible_packets() const { return eligible_count_; }
  std::uint64_t eligible_bytes() const { return eligible_bytes_; }

  const Packet& peek(std::size_t index) const { return queue_[index]; }
  const Packet* head() const { return queue_.empty() ? nullptr : &queue_.front(); }

  /// Removes the fully-served head. The head must be eligible.
  Packet pop_head();

  /// Applies a partial grant to the head, reducing its residual.
  void drain_head(std::uint32_t bytes);

  void note_channel_loss(const Packet& p);
  void note_delivery(const Packet& p);

  const BearerCounters& counters() const { return counters_; }
  bool ledger_ok() const;

 private:
  Direction dir_;
  std::int32_t vehicle_;
  std::uint64_t capacity_bytes_;
  std::uint64_t occupancy_bytes_ = 0;
  std::deque<Packet> queue_;
  std::size_t eligible_count_ = 0;
  std::uint64_t eligible_bytes_ = 0;
  BearerCounters counters_;
};

}  // namespace skycast
