#include "skycast/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace skycast {

const std::vector<TraceEntry>& builtin_trace() {
  static const std::vector<TraceEntry> trace = {
      {4, 160529.0, 160402.2, 160702.8},
      {5, 159668.0, 159571.59, 159774.2},
      {6, 153324.6, 153060.2, 153532.4},
      {7, 151629.2, 151433.4, 151865.05},
      {8, 146249.2, 145241.6, 147188.6},
      {9, 149530.2, 149240.4, 149734.4},
      {10, 139844.8, 136945.6, 141508.2},
      {11, 143601.0, 143091.6, 143997.2},
      {12, 146011.0, 145461.8, 146585.555},
      {13, 140527.2, 135552.2, 144530.2},
      {14, 146486.6, 145890.4, 147082.8},
      {15, 144966.4, 143832.4, 145768.8},
      {16, 148324.2, 148217.6, 148429.4},
      {17, 148367.0, 148195.4, 148532.8},
      {18, 147567.8, 145550.6, 148658.57},
      {19, 149139.4, 149097.965, 149175.6},
      {20, 155336.2, 154661.0, 155950.74},
      {21, 163442.2, 161325.945, 164593.8},
  };
  return trace;
}

const TraceEntry& trace_entry_for(const std::vector<TraceEntry>& trace, int vehicle_count) {
  if (trace.empty()) throw std::invalid_argument("trace_entry_for: empty trace");
  const TraceEntry* best = &trace.front();
  for (const TraceEntry& e : trace) {
    if (e.vehicle_count == vehicle_count) return e;
    if (std::abs(e.vehicle_count - vehicle_count) <
        std::abs(best->vehicle_count - vehicle_count)) {
      best = &e;
    }
  }
  return *best;
}

std::vector<TraceEntry> load_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  std::vector<TraceEntry> trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.empty()) continue;
    char* end = nullptr;
    const long n = std::strtol(fields[0].c_str(), &end, 10);
    if (end == fields[0].c_str()) {
      if (line_no == 1) continue;  // header
      throw std::runtime_error("bad trace row at line " + std::to_string(line_no));
    }
    if (fields.size() < 2 || (fields.size() != 2 && fields.size() != 4)) {
      throw std::runtime_error("bad trace row at line " + std::to_string(line_no) +
                               ": want vehicle_count,mean[,low,high]");
    }
    TraceEntry e;
    e.vehicle_count = static_cast<int>(n);
    try {
      e.mean_bytes = std::stod(fields[1]);
      e.low_bytes = fields.size() == 4 ? std::stod(fields[2]) : e.mean_bytes;
      e.high_bytes = fields.size() == 4 ? std::stod(fields[3]) : e.mean_bytes;
    } catch (const std::exception&) {
      throw std::runtime_error("bad trace row at line " + std::to_string(line_no));
    }
    if (e.mean_bytes <= 0 || e.low_bytes > e.mean_bytes || e.high_bytes < e.mean_bytes) {
      throw std::runtime_error("inconsistent trace row at line " + std::to_string(line_no));
    }
    trace.push_back(e);
  }
  if (trace.empty()) throw std::runtime_error("trace file has no rows: " + path);
  return trace;
}

std::uint32_t annotation_size(int vehicle_count, double box_size_bytes) {
  return static_cast<std::uint32_t>(std::ceil(vehicle_count * box_size_bytes));
}

FragmentPlan fragment(std::uint32_t frame_bytes, std::uint32_t udp_payload_bytes) {
  FragmentPlan plan;
  if (frame_bytes == 0 || udp_payload_bytes == 0) return plan;
  plan.fragment_count = (frame_bytes + udp_payload_bytes - 1) / udp_payload_bytes;
  plan.full_payload = udp_payload_bytes;
  plan.last_payload = frame_bytes - (plan.fragment_count - 1) * udp_payload_bytes;
  return plan;
}

FrameSource::FrameSource(EventQueue& queue, double rate_hz, std::uint32_t udp_payload_bytes,
                         std::uint16_t overhead_bytes, std::vector<std::int32_t> destinations,
                         SimTime stop_time, std::function<std::uint32_t()> next_frame_bytes,
                         std::function<void(Packet&&)> emit)
    : queue_(queue),
      rate_hz_(rate_hz),
      udp_payload_bytes_(udp_payload_bytes),
      overhead_bytes_(overhead_bytes),
      destinations_(std::move(destinations)),
      stop_time_(stop_time),
      next_frame_bytes_(std::move(next_frame_bytes)),
      emit_(std::move(emit)) {
  if (rate_hz_ <= 0) throw std::invalid_argument("FrameSource: rate must be positive");
  if (destinations_.empty()) throw std::invalid_argument("FrameSource: no destinations");
}

SimTime FrameSource::frame_time(std::uint32_t frame_id) const {
  return static_cast<SimTime>(std::llround(frame_id * 1e9 / rate_hz_));
}

void FrameSource::start() {
  if (frame_time(0) < stop_time_) {
    queue_.schedule(frame_time(0), EventKind::FrameGeneration, [this]() { on_frame(0); });
  }
}

void FrameSource::on_frame(std::uint32_t frame_id) {
  plan_ = fragment(next_frame_bytes_(), udp_payload_bytes_);
  frame_start_ = frame_time(frame_id);
  frame_period_ = frame_time(frame_id + 1) - frame_start_;
  counters_.frames += 1;
  emit_fragment(frame_id, 0);
  if (plan_.fragment_count > 1) on_fragment(frame_id, 0);
  const SimTime next = frame_time(frame_id + 1);
  if (next < stop_time_) {
    queue_.schedule(next, EventKind::FrameGeneration,
                    [this, frame_id]() { on_frame(frame_id + 1); });
  }
}

void FrameSource::on_fragment(std::uint32_t frame_id, std::uint32_t index) {
  // Chain to fragment index+1, paced so the frame's fragments spread evenly
  // across its own period.
  const std::uint32_t next = index + 1;
  const SimTime at =
      frame_start_ + static_cast<SimTime>(next) * frame_period_ / plan_.fragment_count;
  queue_.schedule(at, EventKind::FrameGeneration, [this, frame_id, next]() {
    emit_fragment(frame_id, next);
    if (next + 1 < plan_.fragment_count) on_fragment(frame_id, next);
  });
}

void FrameSource::emit_fragment(std::uint32_t frame_id, std::uint32_t index) {
  for (const std::int32_t dest : destinations_) {
    Packet p;
    p.frame_id = frame_id;
    p.fragment_index = static_cast<std::uint16_t>(index);
    p.fragment_count = static_cast<std::uint16_t>(plan_.fragment_count);
    p.payload_bytes = plan_.payload_of(index);
    p.overhead_bytes = overhead_bytes_;
    p.dest_vehicle = dest;
    p.created_at = queue_.now();
    counters_.packets += 1;
    counters_.payload_bytes += p.payload_bytes;
    emit_(std::move(p));
  }
}

}  // namespace skycast
