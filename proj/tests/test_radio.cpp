#include <doctest.h>

#include <cstdint>
#include <vector>

#include "skycast/radio.hpp"

using namespace skycast;

namespace {

Packet wire_packet(std::uint32_t wire, SimTime at = 0) {
  Packet p;
  p.payload_bytes = wire - 28;
  p.overhead_bytes = 28;
  p.created_at = at;
  p.eligible_at = at;
  return p;
}

struct CountingSink : PacketSink {
  std::uint64_t ul_bytes = 0;
  std::vector<std::uint64_t> dl_bytes;
  std::vector<SimTime> ul_times;

  explicit CountingSink(std::size_t vehicles = 0) : dl_bytes(vehicles, 0) {}

  void on_service_complete(Direction dir, std::int32_t vehicle, Packet&& p,
                           SimTime now) override {
    if (dir == Direction::Uplink) {
      ul_bytes += p.wire_bytes();
      ul_times.push_back(now);
    } else {
      dl_bytes[static_cast<std::size_t>(vehicle)] += p.wire_bytes();
    }
  }
};

// Minimal slot chain: snapshot, serve, reschedule, exactly as the simulation
// wires it.
void drive(EventQueue& q, RadioScheduler& s, Bearer& ul, std::vector<Bearer>& dl,
           PacketSink& sink, SimTime t, SimTime end) {
  const SlotAllocation alloc = s.schedule_slot(t, ul, dl);
  s.serve(alloc, ul, dl, q, sink);
  const SimTime next = t + s.slot_config().duration;
  if (next <= end) {
    q.schedule(next, EventKind::SlotBoundary,
               [&q, &s, &ul, &dl, &sink, next, end]() { drive(q, s, ul, dl, sink, next, end); });
  }
}

}  // namespace

TEST_CASE("bytes per symbol follows rate, slot duration, and symbol count") {
  CHECK(RadioScheduler::bytes_per_symbol(380e6, 0.001, 14) ==
        doctest::Approx(3392.857142857143));
  // The default air interface: 1.12 ms, 14 symbols.
  RadioScheduler s(SlotConfig{}, LinkModel{});
  CHECK(s.bytes_per_symbol(Direction::Uplink) == doctest::Approx(3600.0));
  CHECK(s.bytes_per_symbol(Direction::Downlink) == doctest::Approx(8000.0));
}

TEST_CASE("decoupled mode gives each backlogged direction the whole symbol set") {
  RadioScheduler s(SlotConfig{}, LinkModel{});
  Bearer ul(Direction::Uplink, kNoVehicle, 1'000'000);
  std::vector<Bearer> dl;
  dl.emplace_back(Direction::Downlink, 0, 1'000'000);
  ul.enqueue(wire_packet(100'000), 0);
  dl[0].enqueue(wire_packet(100'000), 0);
  const SlotAllocation alloc = s.schedule_slot(0, ul, dl);
  CHECK(alloc.ul_pool == 14);
  CHECK(alloc.dl_pool == 14);
  CHECK(alloc.ul_granted == 14);
  CHECK(alloc.dl_granted == 13);  // ceil(100000 / 8000)
}

TEST_CASE("shared mode splits symbols in proportion to backlog") {
  SlotConfig slot;
  slot.symbol_count = 12;
  slot.duplex = DuplexMode::SharedTdd;
  RadioScheduler s(slot, LinkModel{});
  Bearer ul(Direction::Uplink, kNoVehicle, 1'000'000);
  std::vector<Bearer> dl;
  dl.emplace_back(Direction::Downlink, 0, 1'000'000);

  SUBCASE("only uplink backlogged takes everything") {
    ul.enqueue(wire_packet(50'000), 0);
    const SlotAllocation alloc = s.schedule_slot(0, ul, dl);
    CHECK(alloc.ul_pool == 12);
    CHECK(alloc.dl_pool == 0);
  }
  SUBCASE("only downlink backlogged takes everything") {
    dl[0].enqueue(wire_packet(50'000), 0);
    const SlotAllocation alloc = s.schedule_slot(0, ul, dl);
    CHECK(alloc.ul_pool == 0);
    CHECK(alloc.dl_pool == 12);
  }
  SUBCASE("equal backlogs split evenly") {
    ul.enqueue(wire_packet(6'000), 0);
    dl[0].enqueue(wire_packet(6'000), 0);
    const SlotAllocation alloc = s.schedule_slot(0, ul, dl);
    CHECK(alloc.ul_pool == 6);
    CHECK(alloc.dl_pool == 6);
  }
  SUBCASE("a direction with any backlog keeps at least one symbol") {
    ul.enqueue(wire_packet(100), 0);
    dl[0].enqueue(wire_packet(100'000), 0);
    const SlotAllocation alloc = s.schedule_slot(0, ul, dl);
    CHECK(alloc.ul_pool == 1);
    CHECK(alloc.dl_pool == 11);
  }
}

TEST_CASE("grants never exceed what the backlog needs") {
  RadioScheduler s(SlotConfig{}, LinkModel{});
  Bearer ul(Direction::Uplink, kNoVehicle, 1'000'000);
  std::vector<Bearer> dl;
  dl.emplace_back(Direction::Downlink, 0, 1'000'000);
  dl[0].enqueue(wire_packet(100), 0);  // far less than one symbol
  SlotAllocation alloc = s.schedule_slot(0, ul, dl);
  CHECK(alloc.ul_granted == 0);
  CHECK(alloc.dl_granted == 1);
}

TEST_CASE("packets arriving after the boundary wait for the next slot") {
  RadioScheduler s(SlotConfig{}, LinkModel{});
  Bearer ul(Direction::Uplink, kNoVehicle, 1'000'000);
  std::vector<Bearer> dl;
  Packet late = wire_packet(1'000);
  late.eligible_at = 1;  // just after the boundary at t=0
  ul.enqueue(late, 0);
  SlotAllocation alloc = s.schedule_slot(0, ul, dl);
  CHECK(alloc.ul_granted == 0);
  alloc = s.schedule_slot(1'120'000, ul, dl);
  CHECK(alloc.ul_granted == 1);
}

TEST_CASE("round robin hands each backlogged bearer one symbol at a time") {
  SlotConfig slot;
  slot.symbol_count = 6;
  RadioScheduler s(slot, LinkModel{});
  // With 6 symbols per 1.12 ms slot a downlink symbol carries ~18667 bytes.
  Bearer ul(Direction::Uplink, kNoVehicle, 1'000'000);
  std::vector<Bearer> dl;
  for (int v = 0; v < 3; ++v) {
    dl.emplace_back(Direction::Downlink, v, 1'000'000);
    dl[static_cast<std::size_t>(v)].enqueue(wire_packet(30'000), 0);  // needs 2 symbols
  }
  const SlotAllocation alloc = s.schedule_slot(0, ul, dl);
  std::vector<int> per_bearer(3, 0);
  for (const Grant& g : alloc.grants) {
    per_bearer[static_cast<std::size_t>(g.vehicle)] += g.span.count;
  }
  CHECK(per_bearer == std::vector<int>{2, 2, 2});
  CHECK(alloc.dl_granted == 6);
}

TEST_CASE("the cursor resumes where the previous slot stopped") {
  RadioScheduler s(SlotConfig{}, LinkModel{});
  Bearer ul(Direction::Uplink, kNoVehicle, 1'000'000);
  std::vector<Bearer> dl;
  const int n = 21;
  for (int v = 0; v < n; ++v) {
    dl.emplace_back(Direction::Downlink, v, 10'000'000);
    dl[static_cast<std::size_t>(v)].enqueue(wire_packet(100'000), 0);  // needs 13 symbols
  }
  // 14 symbols over 21 permanently-backlogged bearers: after three slots every
  // bearer has been granted exactly twice.
  std::vector<int> per_bearer(n, 0);
  for (int k = 0; k < 3; ++k) {
    const SlotAllocation alloc = s.schedule_slot(static_cast<SimTime>(k) * 1'120'000, ul, dl);
    CHECK(alloc.dl_granted == 14);
    for (const Grant& g : alloc.grants) {
      per_bearer[static_cast<std::size_t>(g.vehicle)] += g.span.count;
    }
  }
  CHECK(per_bearer == std::vector<int>(n, 2));
}

TEST_CASE("allocation never double-books a symbol across many random slots") {
  RadioScheduler s(SlotConfig{}, LinkModel{});
  RngStream rng = rng_stream("fuzz", 11);
  Bearer ul(Direction::Uplink, kNoVehicle, 1'000'000'000);
  std::vector<Bearer> dl;
  for (int v = 0; v < 8; ++v) dl.emplace_back(Direction::Downlink, v, 1'000'000'000);
  for (int k = 0; k < 12'000; ++k) {
    const SimTime t = static_cast<SimTime>(k) * 1'120'000;
    if (rng.bernoulli(0.7)) {
      ul.enqueue(wire_packet(100 + static_cast<std::uint32_t>(rng.uniform(0, 20'000)), t), t);
    }
    for (auto& b : dl) {
      if (rng.bernoulli(0.5)) {
        b.enqueue(wire_packet(100 + static_cast<std::uint32_t>(rng.uniform(0, 30'000)), t), t);
      }
    }
    const SlotAllocation alloc = s.schedule_slot(t, ul, dl);
    CHECK(alloc.ul_granted <= alloc.ul_pool);
    CHECK(alloc.dl_granted <= alloc.dl_pool);
    // Drain what was granted so backlogs stay bounded.
    while (ul.eligible_packets() > 0) ul.note_delivery(ul.pop_head());
    for (auto& b : dl) {
      while (b.eligible_packets() > 0) b.note_delivery(b.pop_head());
    }
  }
  const SchedulerAudit& audit = s.audit();
  CHECK(audit.slots == 12'000);
  CHECK(audit.double_booked == 0);
  CHECK(audit.over_granted == 0);
}

TEST_CASE("completion timestamps interpolate inside the slot") {
  EventQueue q(10'000'000);
  RadioScheduler s(SlotConfig{}, LinkModel{});
  CountingSink sink;
  Bearer ul(Direction::Uplink, kNoVehicle, 1'000'000);
  std::vector<Bearer> dl;
  // 3600 bytes is one uplink symbol (80 us); 1800 bytes is half of one.
  ul.enqueue(wire_packet(1'800), 0);
  ul.enqueue(wire_packet(3'600), 0);
  const SlotAllocation alloc = s.schedule_slot(0, ul, dl);
  CHECK(alloc.ul_granted == 2);
  s.serve(alloc, ul, dl, q, sink);
  q.run_until(10'000'000);
  REQUIRE(sink.ul_times.size() == 2);
  CHECK(sink.ul_times[0] == 40'000);
  CHECK(sink.ul_times[1] == 120'000);
}

TEST_CASE("a packet larger than one slot's grant finishes in a later slot") {
  EventQueue q(10'000'000);
  RadioScheduler s(SlotConfig{}, LinkModel{});
  CountingSink sink;
  Bearer ul(Direction::Uplink, kNoVehicle, 1'000'000);
  std::vector<Bearer> dl;
  // 100000 bytes needs 28 symbols: slot 0 drains 50400 bytes, slot 1 covers
  // the 49600-byte residual 13.78 symbols in, so the completion lands at
  // 1120000 + round((13 + 49600/3600 - 13) * 80000) = 2222222 ns.
  ul.enqueue(wire_packet(100'000), 0);
  drive(q, s, ul, dl, sink, 0, 5'000'000);
  q.run_until(10'000'000);
  REQUIRE(sink.ul_times.size() == 1);
  CHECK(sink.ul_bytes == 100'000);
  CHECK(sink.ul_times[0] == 2'222'222);
  CHECK(ul.empty());
}

TEST_CASE("a lone saturated uplink achieves its configured rate") {
  const SimTime horizon = secs(1.0);
  EventQueue q(horizon);
  RadioScheduler s(SlotConfig{}, LinkModel{});
  CountingSink sink;
  Bearer ul(Direction::Uplink, kNoVehicle, 100'000'000);
  std::vector<Bearer> dl;
  for (int i = 0; i < 50'000; ++i) ul.enqueue(wire_packet(1'000), 0);
  drive(q, s, ul, dl, sink, 0, horizon);
  q.run_until(horizon);
  const double achieved_bps = static_cast<double>(sink.ul_bytes) * 8.0 / 1.0;
  CHECK(achieved_bps == doctest::Approx(360e6).epsilon(0.01));
}

TEST_CASE("equally backlogged downlink bearers share the aggregate rate") {
  const SimTime horizon = secs(0.3);
  EventQueue q(horizon);
  RadioScheduler s(SlotConfig{}, LinkModel{});
  const std::size_t n = 5;
  CountingSink sink(n);
  Bearer ul(Direction::Uplink, kNoVehicle, 1'000'000);
  std::vector<Bearer> dl;
  for (std::size_t v = 0; v < n; ++v) {
    dl.emplace_back(Direction::Downlink, static_cast<std::int32_t>(v), 100'000'000);
    for (int i = 0; i < 8'000; ++i) {
      dl[v].enqueue(wire_packet(1'000), 0);
    }
  }
  drive(q, s, ul, dl, sink, 0, horizon);
  q.run_until(horizon);
  const double per_bearer = 800e6 / 8.0 / static_cast<double>(n) * 0.3;  // bytes
  std::uint64_t total = 0;
  for (const std::uint64_t b : sink.dl_bytes) {
    CHECK(static_cast<double>(b) == doctest::Approx(per_bearer).epsilon(0.02));
    total += b;
  }
  CHECK(static_cast<double>(total) == doctest::Approx(800e6 / 8.0 * 0.3).epsilon(0.02));
}
