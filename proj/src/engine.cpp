#include "skycast/engine.hpp"

#include <utility>

namespace skycast {

EventHandle EventQueue::schedule(SimTime fire_time, EventKind kind, std::function<void()> action) {
  if (fire_time < clock_.now) {
    throw SchedulingInPast("event scheduled at " + std::to_string(fire_time) +
                           " ns, clock already at " + std::to_string(clock_.now) + " ns");
  }
  const std::uint64_t seq = next_seq_++;
  heap_.push(HeapEntry{fire_time, seq});
  pending_.emplace(seq, PendingEvent{kind, std::move(action)});
  return EventHandle{seq};
}

bool EventQueue::cancel(EventHandle h) {
  return pending_.erase(h.seq) > 0;  // heap entry is skipped lazily on pop
}

std::uint64_t EventQueue::run_until(SimTime end) {
  if (end < clock_.now) {
    throw SchedulingInPast("run_until target behind the clock");
  }
  std::uint64_t fired = 0;
  while (!heap_.empty() && heap_.top().fire_time <= end) {
    const HeapEntry top = heap_.top();
    heap_.pop();
    auto it = pending_.find(top.seq);
    if (it == pending_.end()) continue;  // cancelled
    std::function<void()> action = std::move(it->second.action);
    pending_.erase(it);
    clock_.now = top.fire_time;
    action();
    ++fired;
  }
  clock_.now = end;
  return fired;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

RngStream rng_stream(std::string_view label, std::uint64_t seed) {
  const std::uint64_t material = splitmix64(fnv1a64(label) ^ splitmix64(seed));
  return RngStream(material);
}

}  // namespace skycast
