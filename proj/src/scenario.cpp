#include "skycast/scenario.hpp"

#include <cctype>
#include <chrono>
#include <cmath>

namespace skycast {

ScenarioKind parse_scenario(std::string_view name) {
  std::string lower;
  lower.reserve(name.size());
  for (const char c : name) {
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (lower == "mff") return ScenarioKind::MFF;
  if (lower == "bff") return ScenarioKind::BFF;
  if (lower == "bfa") return ScenarioKind::BFA;
  if (lower == "bao") return ScenarioKind::BAO;
  throw UnknownScenario("unknown scenario: " + std::string(name));
}

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::MFF: return "mff";
    case ScenarioKind::BFF: return "bff";
    case ScenarioKind::BFA: return "bfa";
    case ScenarioKind::BAO: return "bao";
  }
  throw UnknownScenario("unknown scenario enum value");
}

RelayRule relay_rule(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::MFF: return {RelayAction::ForwardPerVehicleCopy, false};
    case ScenarioKind::BFF: return {RelayAction::DuplicateToAll, false};
    case ScenarioKind::BFA: return {RelayAction::ProcessThenAnnotateAll, false};
    case ScenarioKind::BAO: return {RelayAction::DuplicateToAll, true};
  }
  throw UnknownScenario("unknown scenario enum value");
}

Simulation::Simulation(const RunParams& params)
    : params_(params),
      rule_(relay_rule(params.scenario)),
      trace_(params.trace ? *params.trace : builtin_trace()),
      queue_(secs(params.sim_time_s)),
      pos_rng_(rng_stream("pos", params.seed)),
      chan_ul_rng_(rng_stream("chan_ul", params.seed)),
      chan_dl_rng_(rng_stream("chan_dl", params.seed)),
      trace_rng_(rng_stream("trace", params.seed)),
      layout_(place_vehicles(params.n, params.deployment, pos_rng_, params.uav_height_m)),
      ul_(Direction::Uplink, kNoVehicle, params.buffer_bytes_ul),
      scheduler_(params.slot, params.link) {
  if (params_.sim_time_s <= 0) throw std::invalid_argument("sim_time must be positive");
  if (params_.warmup_s < 0 || params_.warmup_s >= params_.sim_time_s) {
    throw std::invalid_argument("warmup must lie inside the run");
  }
  if (params_.fps <= 0) throw std::invalid_argument("fps must be positive");

  annotation_bytes_ = annotation_size(params_.n, params_.profile.box_size_bytes);
  annotation_plan_ = fragment(annotation_bytes_, params_.profile.udp_payload_bytes);
  dl_delay_ = secs(params_.dl_pipeline_s);
  annotate_delay_ = secs(params_.dl_pipeline_s + params_.processing_delay_s);

  dl_.reserve(static_cast<std::size_t>(params_.n));
  for (int v = 0; v < params_.n; ++v) {
    dl_.emplace_back(Direction::Downlink, v, params_.buffer_bytes_dl);
  }

  metrics_.open_window(secs(params_.warmup_s), secs(params_.sim_time_s));

  double rate = params_.fps;
  if (rule_.uav_sends_annotations && params_.profile.annotation_rate_hz > 0) {
    rate = params_.profile.annotation_rate_hz;
  }
  std::vector<std::int32_t> destinations;
  if (rule_.action == RelayAction::ForwardPerVehicleCopy) {
    for (int v = 0; v < params_.n; ++v) destinations.push_back(v);
  } else {
    destinations.push_back(kNoVehicle);
  }
  source_ = std::make_unique<FrameSource>(
      queue_, rate, params_.profile.udp_payload_bytes, params_.profile.per_packet_overhead_bytes,
      std::move(destinations), secs(params_.sim_time_s), [this]() { return next_frame_bytes(); },
      [this](Packet&& p) { emit_uplink(std::move(p)); });
}

std::uint32_t Simulation::next_frame_bytes() {
  if (rule_.uav_sends_annotations) return annotation_bytes_;
  const TraceEntry& e = trace_entry_for(trace_, params_.n);
  const double bytes = params_.profile.size_jitter
                           ? trace_rng_.uniform(e.low_bytes, e.high_bytes)
                           : e.mean_bytes;
  return static_cast<std::uint32_t>(std::ceil(bytes));
}

MetricRecord Simulation::run() {
  const auto wall_start = std::chrono::steady_clock::now();

  source_->start();
  queue_.schedule(0, EventKind::SlotBoundary, [this]() { on_slot(0); });
  queue_.run_until(secs(params_.sim_time_s));

  MetricRecord r;
  r.scenario = std::string(to_string(params_.scenario));
  r.n = params_.n;
  r.fps = params_.fps;
  r.seed = params_.seed;
  metrics_.fill(r);

  const BearerCounters& u = ul_.counters();
  r.sent_ul = u.offered_packets;
  r.delivered_ul = u.delivered_packets;
  r.dropped_buf_ul = u.dropped_overflow_packets;
  r.dropped_ch_ul = u.dropped_channel_packets;
  r.queued_ul_end = ul_.queued_packets();
  r.ledger_ok = ul_.ledger_ok();
  for (const Bearer& b : dl_) {
    const BearerCounters& c = b.counters();
    r.sent_dl += c.offered_packets;
    r.delivered_dl += c.delivered_packets;
    r.dropped_buf_dl += c.dropped_overflow_packets;
    r.dropped_ch_dl += c.dropped_channel_packets;
    r.queued_dl_end += b.queued_packets();
    r.ledger_ok = r.ledger_ok && b.ledger_ok();
  }
  r.offered_ul_payload_bytes = source_->counters().payload_bytes;

  const auto wall_end = std::chrono::steady_clock::now();
  r.wall_seconds = std::chrono::duration<double>(wall_end - wall_start).count();
  return r;
}

void Simulation::on_slot(SimTime slot_start) {
  const SlotAllocation alloc = scheduler_.schedule_slot(slot_start, ul_, dl_);
  scheduler_.serve(alloc, ul_, dl_, queue_, *this);
  // Chained after serve() so equal-time service completions fire before the
  // next boundary snapshot.
  const SimTime next = slot_start + params_.slot.duration;
  queue_.schedule(next, EventKind::SlotBoundary, [this, next]() { on_slot(next); });
}

void Simulation::emit_uplink(Packet&& p) {
  const SimTime now = queue_.now();
  switch (rule_.action) {
    case RelayAction::ForwardPerVehicleCopy:
      metrics_.add_intended(1);
      break;
    case RelayAction::DuplicateToAll:
      metrics_.add_intended(static_cast<std::uint64_t>(params_.n));
      break;
    case RelayAction::ProcessThenAnnotateAll:
      break;  // counted per resolved frame
  }
  const Packet probe = p;
  const EnqueueResult res = ul_.enqueue(std::move(p), now);
  if (res == EnqueueResult::DroppedOverflow &&
      rule_.action == RelayAction::ProcessThenAnnotateAll) {
    note_frame_fragment(probe, false, now);
  }
}

void Simulation::on_service_complete(Direction dir, std::int32_t vehicle, Packet&& p,
                                     SimTime now) {
  if (dir == Direction::Uplink) {
    if (channel_draw(params_.link, Direction::Uplink, chan_ul_rng_) == DeliveryOutcome::Lost) {
      ul_.note_channel_loss(p);
      if (rule_.action == RelayAction::ProcessThenAnnotateAll) {
        note_frame_fragment(p, false, now);
      }
      return;
    }
    ul_.note_delivery(p);
    metrics_.record_ul_delivery(p.enqueued_at, now, p.wire_bytes());
    relay_to_vehicles(p, now);
    return;
  }
  if (vehicle < 0 || vehicle >= params_.n) {
    throw std::logic_error("downlink completion for unknown vehicle");
  }
  Bearer& b = dl_[static_cast<std::size_t>(vehicle)];
  if (channel_draw(params_.link, Direction::Downlink, chan_dl_rng_) == DeliveryOutcome::Lost) {
    b.note_channel_loss(p);
    return;
  }
  b.note_delivery(p);
  metrics_.record_dl_delivery(p.enqueued_at, now, p.wire_bytes());
  metrics_.add_delivered_unit();
}

void Simulation::relay_to_vehicles(const Packet& p, SimTime now) {
  switch (rule_.action) {
    case RelayAction::ForwardPerVehicleCopy:
      enqueue_downlink(p.dest_vehicle, p, now, dl_delay_);
      return;
    case RelayAction::DuplicateToAll:
      for (int v = 0; v < params_.n; ++v) enqueue_downlink(v, p, now, dl_delay_);
      return;
    case RelayAction::ProcessThenAnnotateAll:
      note_frame_fragment(p, true, now);
      return;
  }
}

void Simulation::enqueue_downlink(std::int32_t vehicle, Packet p, SimTime now,
                                  SimTime extra_delay) {
  if (vehicle < 0 || vehicle >= params_.n) {
    throw std::logic_error("downlink enqueue for unknown vehicle");
  }
  p.dest_vehicle = vehicle;
  p.eligible_at = now + extra_delay;
  p.delivered_at.reset();
  dl_[static_cast<std::size_t>(vehicle)].enqueue(std::move(p), now);
}

void Simulation::note_frame_fragment(const Packet& p, bool delivered, SimTime now) {
  if (frames_.size() <= p.frame_id) frames_.resize(p.frame_id + 1);
  FrameAssembly& fa = frames_[p.frame_id];
  if (fa.expected == 0) fa.expected = p.fragment_count;
  (delivered ? fa.delivered : fa.lost) += 1;
  if (fa.delivered + fa.lost != fa.expected) return;

  // Frame resolved. Every vehicle was owed the annotation packets for it,
  // whether or not the frame survived reassembly.
  metrics_.add_intended(static_cast<std::uint64_t>(params_.n) *
                        annotation_plan_.fragment_count);
  if (fa.lost > 0) return;
  for (int v = 0; v < params_.n; ++v) {
    for (std::uint32_t j = 0; j < annotation_plan_.fragment_count; ++j) {
      Packet a;
      a.frame_id = p.frame_id;
      a.fragment_index = static_cast<std::uint16_t>(j);
      a.fragment_count = static_cast<std::uint16_t>(annotation_plan_.fragment_count);
      a.payload_bytes = annotation_plan_.payload_of(j);
      a.overhead_bytes = params_.profile.per_packet_overhead_bytes;
      a.created_at = now;
      enqueue_downlink(v, a, now, annotate_delay_);
    }
  }
}

}  // namespace skycast
