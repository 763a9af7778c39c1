#include "skycast/radio.hpp"

#include <algorithm>
#include <cmath>

namespace skycast {

double RadioScheduler::bytes_per_symbol(double rate_bps, double slot_duration_s,
                                        int symbol_count) {
  return rate_bps * slot_duration_s / symbol_count / 8.0;
}

double RadioScheduler::bytes_per_symbol(Direction dir) const {
  const double rate =
      dir == Direction::Uplink ? link_.uplink_rate_bps : link_.downlink_rate_bps;
  return bytes_per_symbol(rate, to_secs(slot_.duration), slot_.symbol_count);
}

namespace {

int symbols_needed(std::uint64_t backlog_bytes, double bps) {
  if (backlog_bytes == 0) return 0;
  return static_cast<int>(std::ceil(static_cast<double>(backlog_bytes) / bps));
}

}  // namespace

SlotAllocation RadioScheduler::schedule_slot(SimTime slot_start, Bearer& ul,
                                             std::vector<Bearer>& dl) {
  ul.advance_eligibility(slot_start);
  std::uint64_t dl_backlog = 0;
  for (Bearer& b : dl) {
    b.advance_eligibility(slot_start);
    dl_backlog += b.eligible_bytes();
  }
  const std::uint64_t ul_backlog = ul.eligible_bytes();

  SlotAllocation alloc;
  alloc.slot_start = slot_start;
  const int s = slot_.symbol_count;

  if (slot_.duplex == DuplexMode::Decoupled) {
    alloc.ul_pool = ul_backlog > 0 ? s : 0;
    alloc.dl_pool = dl_backlog > 0 ? s : 0;
  } else {
    // Proportional dynamic-TDD split of one symbol set, one-symbol floor for
    // a direction with backlog.
    if (ul_backlog == 0 && dl_backlog == 0) {
      alloc.ul_pool = alloc.dl_pool = 0;
    } else if (dl_backlog == 0) {
      alloc.ul_pool = s;
    } else if (ul_backlog == 0) {
      alloc.dl_pool = s;
    } else {
      const double share = static_cast<double>(ul_backlog) /
                           static_cast<double>(ul_backlog + dl_backlog);
      int ul_syms = static_cast<int>(std::llround(share * s));
      ul_syms = std::clamp(ul_syms, 1, s - 1);
      alloc.ul_pool = ul_syms;
      alloc.dl_pool = s - ul_syms;
    }
  }

  if (alloc.ul_pool > 0) {
    const int need = symbols_needed(ul.eligible_bytes(), bytes_per_symbol(Direction::Uplink));
    const int granted = std::min(need, alloc.ul_pool);
    if (granted > 0) {
      // Shared mode lays the uplink block first; decoupled owns its pool.
      alloc.grants.push_back(Grant{Direction::Uplink, kNoVehicle, SymbolSpan{0, granted}});
      alloc.ul_granted = granted;
    }
  }

  if (alloc.dl_pool > 0) {
    const int pool_first = slot_.duplex == DuplexMode::SharedTdd ? alloc.ul_pool : 0;
    std::vector<Bearer*> bearers;
    std::vector<int> needs;
    bearers.reserve(dl.size());
    needs.reserve(dl.size());
    const double bps = bytes_per_symbol(Direction::Downlink);
    for (Bearer& b : dl) {
      bearers.push_back(&b);
      needs.push_back(symbols_needed(b.eligible_bytes(), bps));
    }
    allocate_direction(Direction::Downlink, pool_first, alloc.dl_pool, bearers, needs,
                       dl_cursor_, alloc);
  }

  audit_allocation(alloc);
  return alloc;
}

void RadioScheduler::allocate_direction(Direction dir, int pool_first, int pool_count,
                                        std::vector<Bearer*>& bearers, std::vector<int>& needs,
                                        int& cursor, SlotAllocation& out) {
  const int n = static_cast<int>(bearers.size());
  if (n == 0) return;
  int remaining = pool_count;
  int next_symbol = pool_first;
  int total_need = 0;
  for (const int need : needs) total_need += need;
  if (total_need == 0) return;

  // One symbol per needy bearer, cyclically from the cursor; the cursor then
  // resumes just past the last bearer granted, so bearers the pool could not
  // reach this slot are first in line next slot.
  int idx = cursor % n;
  int last_granted = -1;
  int scanned_without_grant = 0;
  while (remaining > 0 && scanned_without_grant < n) {
    if (needs[idx] > 0) {
      needs[idx] -= 1;
      remaining -= 1;
      last_granted = idx;
      scanned_without_grant = 0;
      const std::int32_t vehicle = bearers[idx]->vehicle();
      if (!out.grants.empty()) {
        Grant& prev = out.grants.back();
        if (prev.dir == dir && prev.vehicle == vehicle &&
            prev.span.first + prev.span.count == next_symbol) {
          prev.span.count += 1;
          next_symbol += 1;
          out.dl_granted += 1;
          idx = (idx + 1) % n;
          continue;
        }
      }
      out.grants.push_back(Grant{dir, vehicle, SymbolSpan{next_symbol, 1}});
      next_symbol += 1;
      out.dl_granted += 1;
    } else {
      ++scanned_without_grant;
    }
    idx = (idx + 1) % n;
  }
  if (last_granted >= 0) cursor = (last_granted + 1) % n;
}

void RadioScheduler::audit_allocation(const SlotAllocation& alloc) {
  audit_.slots += 1;
  std::uint32_t ul_mask = 0;
  std::uint32_t dl_mask = 0;
  for (const Grant& g : alloc.grants) {
    for (int i = 0; i < g.span.count; ++i) {
      const int sym = g.span.first + i;
      std::uint32_t& mask = g.dir == Direction::Uplink ? ul_mask : dl_mask;
      const std::uint32_t bit = 1u << sym;
      if ((mask & bit) != 0 || sym >= slot_.symbol_count) {
        audit_.double_booked += 1;
      }
      mask |= bit;
      audit_.symbols_granted += 1;
    }
  }
  // In shared mode the two directions also share the one symbol set.
  if (slot_.duplex == DuplexMode::SharedTdd && (ul_mask & dl_mask) != 0) {
    audit_.double_booked += 1;
  }
  if (alloc.ul_granted > alloc.ul_pool || alloc.dl_granted > alloc.dl_pool) {
    audit_.over_granted += 1;
  }
}

void RadioScheduler::serve(const SlotAllocation& alloc, Bearer& ul, std::vector<Bearer>& dl,
                           EventQueue& queue, PacketSink& sink) {
  // Round robin interleaves a bearer's grants, so gather each bearer's
  // symbols (ascending by construction) before walking its queue prefix.
  auto key = [](const Grant& g) { return g.dir == Direction::Uplink ? -1 : g.vehicle; };
  std::vector<std::int32_t> seen;
  for (const Grant& g : alloc.grants) {
    if (std::find(seen.begin(), seen.end(), key(g)) == seen.end()) seen.push_back(key(g));
  }
  std::vector<int> symbols;
  for (const std::int32_t k : seen) {
    symbols.clear();
    Direction dir = Direction::Uplink;
    for (const Grant& g : alloc.grants) {
      if (key(g) != k) continue;
      dir = g.dir;
      for (int i = 0; i < g.span.count; ++i) symbols.push_back(g.span.first + i);
    }
    Bearer& b = k < 0 ? ul : dl[static_cast<std::size_t>(k)];
    serve_bearer(dir, b, symbols, alloc.slot_start, queue, sink);
  }
}

void RadioScheduler::serve_bearer(Direction dir, Bearer& bearer, const std::vector<int>& symbols,
                                  SimTime slot_start, EventQueue& queue, PacketSink& sink) {
  const double bps = bytes_per_symbol(dir);
  const double sym_dur_ns = static_cast<double>(slot_.duration) / slot_.symbol_count;
  const double budget = bps * static_cast<double>(symbols.size());
  const std::int32_t vehicle = bearer.vehicle();

  auto completion_time = [&](double cum_bytes) {
    double pos = cum_bytes / bps;  // in units of granted symbols
    int k = static_cast<int>(pos);
    double frac = pos - k;
    if (k >= static_cast<int>(symbols.size())) {
      k = static_cast<int>(symbols.size()) - 1;
      frac = 1.0;
    } else if (frac < 1e-9 && k > 0) {
      k -= 1;
      frac = 1.0;
    }
    const double offset = (static_cast<double>(symbols[static_cast<std::size_t>(k)]) + frac) *
                          sym_dur_ns;
    return slot_start + static_cast<SimTime>(std::llround(offset));
  };

  double cum = 0.0;
  const std::size_t eligible = bearer.eligible_packets();
  for (std::size_t i = 0; i < eligible; ++i) {
    const Packet& p = bearer.peek(i);
    const double need = static_cast<double>(p.residual_bytes);
    if (cum + need <= budget + 1e-6) {
      cum += need;
      const SimTime at = completion_time(cum);
      Bearer* bp = &bearer;
      PacketSink* sp = &sink;
      EventQueue* qp = &queue;
      queue.schedule(at, EventKind::PacketServiceComplete, [bp, sp, qp, dir, vehicle]() {
        Packet done = bp->pop_head();
        sp->on_service_complete(dir, vehicle, std::move(done), qp->now());
      });
    } else {
      const auto partial = static_cast<std::uint32_t>(budget - cum);
      if (partial >= 1) {
        const int last_sym = symbols.back();
        const SimTime grant_end =
            slot_start + static_cast<SimTime>(std::llround((last_sym + 1) * sym_dur_ns));
        Bearer* bp = &bearer;
        queue.schedule(grant_end, EventKind::PacketServiceComplete,
                       [bp, partial]() { bp->drain_head(partial); });
      }
      break;
    }
  }
}

}  // namespace skycast
