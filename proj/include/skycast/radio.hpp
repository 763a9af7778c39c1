#pragma once

#include <cstdint>
#include <vector>

#include "skycast/buffers.hpp"
#include "skycast/engine.hpp"
#include "skycast/topology.hpp"

namespace skycast {

/// How the two directions share air time.
///
/// Decoupled gives each direction its own full set of symbols per slot at its
/// own per-symbol capacity; the configured rates are then per-direction
/// capacities that hold regardless of what the other direction carries. This
/// is the default and the shape under which the model is calibrated.
///
/// SharedTdd splits one set of symbols between the directions every slot in
/// proportion to their backlogged bytes (with a one-symbol floor for a
/// direction with any backlog). Kept for sensitivity studies; with relayed
/// traffic the proportional split couples the directions so strongly that a
/// saturated uplink can only reach the harmonic mean of the two rates.
enum class DuplexMode : std::uint8_t { Decoupled, SharedTdd };

struct SlotConfig {
  SimTime duration = 1'120'000;  // ns
  int symbol_count = 14;
  DuplexMode duplex = DuplexMode::Decoupled;
};

struct SymbolSpan {
  int first = 0;
  int count = 0;
};

/// A run of whole symbols granted to one bearer. vehicle is meaningful for
/// downlink grants only; the uplink has a single bearer.
struct Grant {
  Direction dir = Direction::Uplink;
  std::int32_t vehicle = kNoVehicle;
  SymbolSpan span;
};

struct SlotAllocation {
  SimTime slot_start = 0;
  int ul_pool = 0;  // symbols available to the uplink this slot
  int dl_pool = 0;
  int ul_granted = 0;
  int dl_granted = 0;
  std::vector<Grant> grants;
};

/// Receives packets as their air time completes. The scheduler does not know
/// about channels or relays; the sink applies the loss draw and routes.
class PacketSink {
 public:
  virtual ~PacketSink() = default;
  virtual void on_service_complete(Direction dir, std::int32_t vehicle, Packet&& p,
                                   SimTime now) = 0;
};

struct SchedulerAudit {
  std::uint64_t slots = 0;
  std::uint64_t symbols_granted = 0;
  std::uint64_t double_booked = 0;  // stays 0 unless the allocator is broken
  std::uint64_t over_granted = 0;
};

/// Slot-clocked scheduler. Each slot boundary it snapshots bearer backlogs,
/// sizes whole-symbol grants (a bearer never gets more symbols than
/// ceil(backlog / bytes_per_symbol)), spreads them round-robin one symbol at
/// a time over the backlogged bearers of a direction, and converts the
/// grants into service-completion events with sub-symbol timestamps. Only a
/// single bearer ever occupies a symbol. Packets that arrive after the
/// boundary snapshot wait for the next slot.
class RadioScheduler {
 public:
  RadioScheduler(SlotConfig slot, LinkModel link) : slot_(slot), link_(link) {}

  static double bytes_per_symbol(double rate_bps, double slot_duration_s, int symbol_count);
  double bytes_per_symbol(Direction dir) const;

  const SlotConfig& slot_config() const { return slot_; }
  const SchedulerAudit& audit() const { return audit_; }

  /// Builds the symbol allocation for the slot starting at slot_start.
  /// Advances bearer eligibility frontiers to slot_start first.
  SlotAllocation schedule_slot(SimTime slot_start, Bearer& ul, std::vector<Bearer>& dl);

  /// Turns an allocation into PacketServiceComplete events on the queue.
  /// Full completions pop the bearer head and hand the packet to the sink; a
  /// trailing partial grant reduces the head's residual at grant end.
  void serve(const SlotAllocation& alloc, Bearer& ul, std::vector<Bearer>& dl,
             EventQueue& queue, PacketSink& sink);

 private:
  void allocate_direction(Direction dir, int pool_first, int pool_count,
                          std::vector<Bearer*>& bearers, std::vector<int>& needs,
                          int& cursor, SlotAllocation& out);
  void serve_bearer(Direction dir, Bearer& bearer, const std::vector<int>& symbols,
                    SimTime slot_start, EventQueue& queue, PacketSink& sink);
  void audit_allocation(const SlotAllocation& alloc);

  SlotConfig slot_;
  LinkModel link_;
  int dl_cursor_ = 0;
  SchedulerAudit audit_;
};

}  // namespace skycast
