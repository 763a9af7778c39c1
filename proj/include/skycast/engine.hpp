#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <random>
#include <stdexcept>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "skycast/time.hpp"

namespace skycast {

enum class EventKind : std::uint8_t {
  FrameGeneration,
  SlotBoundary,
  PacketServiceComplete,
  MeasurementFlush,
  SimulationEnd,
};

/// Monotone clock owned by the event queue. now never exceeds end_time.
struct SimClock {
  SimTime now = 0;
  SimTime end_time = 0;
};

struct EventHandle {
  std::uint64_t seq = 0;
};

class SchedulingInPast : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Time-ordered event queue. Events firing at the same instant run in
/// insertion order (ties broken by sequence number), which is what makes a
/// run deterministic for a fixed configuration and seed.
class EventQueue {
 public:
  explicit EventQueue(SimTime end_time) { clock_.end_time = end_time; }

  SimTime now() const { return clock_.now; }
  const SimClock& clock() const { return clock_; }

  /// Schedules action at fire_time. Throws SchedulingInPast if fire_time is
  /// behind the clock.
  EventHandle schedule(SimTime fire_time, EventKind kind, std::function<void()> action);

  /// Removes a not-yet-fired event. Returns false if it already fired or was
  /// never known.
  bool cancel(EventHandle h);

  /// Fires every pending event with fire_time <= end, advancing the clock to
  /// each event in turn and to end afterwards. Returns the number of events
  /// executed (cancelled entries do not count).
  std::uint64_t run_until(SimTime end);

  std::size_t pending() const { return pending_.size(); }

 private:
  struct HeapEntry {
    SimTime fire_time;
    std::uint64_t seq;
  };
  struct Later {
    bool operator()(const HeapEntry& a, const HeapEntry& b) const {
      if (a.fire_time != b.fire_time) return a.fire_time > b.fire_time;
      return a.seq > b.seq;
    }
  };
  struct PendingEvent {
    EventKind kind;
    std::function<void()> action;
  };

  SimClock clock_;
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, Later> heap_;
  std::unordered_map<std::uint64_t, PendingEvent> pending_;
  std::uint64_t next_seq_ = 0;
};

/// Deterministic pseudo-random stream. Streams created with the same
/// (label, seed) pair produce identical output on every platform; distinct
/// labels decorrelate the stochastic concerns of a run (channel draws,
/// vehicle placement, trace jitter) so adding draws to one never perturbs
/// another.
class RngStream {
 public:
  explicit RngStream(std::uint64_t state_seed) : gen_(state_seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1) built from the top 53 bits of the generator output,
  /// avoiding the library distribution objects whose sequences are
  /// implementation-defined.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 gen_;
};

RngStream rng_stream(std::string_view label, std::uint64_t seed);

}  // namespace skycast
