#include "skycast/buffers.hpp"

namespace skycast {

EnqueueResult Bearer::enqueue(Packet p, SimTime now) {
  const std::uint64_t wire = p.wire_bytes();
  counters_.offered_packets += 1;
  counters_.offered_bytes += wire;
  if (occupancy_bytes_ + wire > capacity_bytes_) {
    counters_.dropped_overflow_packets += 1;
    counters_.dropped_overflow_bytes += wire;
    return EnqueueResult::DroppedOverflow;
  }
  p.enqueued_at = now;
  if (p.eligible_at < now) p.eligible_at = now;
  p.residual_bytes = static_cast<std::uint32_t>(wire);
  occupancy_bytes_ += wire;
  queue_.push_back(p);
  return EnqueueResult::Accepted;
}

void Bearer::advance_eligibility(SimTime t) {
  while (eligible_count_ < queue_.size() && queue_[eligible_count_].eligible_at <= t) {
    eligible_bytes_ += queue_[eligible_count_].residual_bytes;
    ++eligible_count_;
  }
}

Packet Bearer::pop_head() {
  if (queue_.empty() || eligible_count_ == 0) {
    throw BufferAccountingError("pop_head on empty or ineligible queue head");
  }
  Packet p = queue_.front();
  queue_.pop_front();
  occupancy_bytes_ -= p.residual_bytes;
  eligible_bytes_ -= p.residual_bytes;
  --eligible_count_;
  return p;
}

void Bearer::drain_head(std::uint32_t bytes) {
  if (queue_.empty() || eligible_count_ == 0 || queue_.front().residual_bytes <= bytes) {
    throw BufferAccountingError("partial drain must leave a nonzero residual at the head");
  }
  queue_.front().residual_bytes -= bytes;
  occupancy_bytes_ -= bytes;
  eligible_bytes_ -= bytes;
}

void Bearer::note_channel_loss(const Packet& p) {
  counters_.dropped_channel_packets += 1;
  counters_.dropped_channel_bytes += p.wire_bytes();
}

void Bearer::note_delivery(const Packet& p) {
  counters_.delivered_packets += 1;
  counters_.delivered_bytes += p.wire_bytes();
}

bool Bearer::ledger_ok() const {
  const BearerCounters& c = counters_;
  return c.offered_packets == c.delivered_packets + c.dropped_overflow_packets +
                                  c.dropped_channel_packets + queue_.size();
}

}  // namespace skycast
