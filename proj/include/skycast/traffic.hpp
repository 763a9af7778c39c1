#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "skycast/engine.hpp"
#include "skycast/packet.hpp"

namespace skycast {

/// Camera frame size statistics for one deployment size: the mean encoded
/// frame in bytes plus the spread observed across captures. Frames depend on
/// the vehicle count because the cameras watch the deployment area.
struct TraceEntry {
  int vehicle_count = 0;
  double mean_bytes = 0.0;
  double low_bytes = 0.0;
  double high_bytes = 0.0;
};

/// Built-in frame-size series covering 4..21 vehicles.
const std::vector<TraceEntry>& builtin_trace();

/// Entry for the given vehicle count; counts outside the covered range clamp
/// to the nearest endpoint. Throws std::invalid_argument on an empty trace.
const TraceEntry& trace_entry_for(const std::vector<TraceEntry>& trace, int vehicle_count);

/// Loads a trace from CSV lines of the form
///   vehicle_count,mean_bytes[,low_bytes,high_bytes]
/// A header line is skipped if the first field is not numeric. Missing
/// low/high default to the mean. Throws std::runtime_error on unreadable
/// files or malformed rows.
std::vector<TraceEntry> load_trace_csv(const std::string& path);

/// Bytes of one annotation packet payload: one fixed-size box per vehicle,
/// rounded up to whole bytes.
std::uint32_t annotation_size(int vehicle_count, double box_size_bytes);

/// How one application payload splits into UDP packets.
struct FragmentPlan {
  std::uint32_t fragment_count = 0;
  std::uint32_t full_payload = 0;  // bytes in every fragment but the last
  std::uint32_t last_payload = 0;

  std::uint32_t payload_of(std::uint32_t index) const {
    return index + 1 == fragment_count ? last_payload : full_payload;
  }
  std::uint64_t total_bytes() const {
    return fragment_count == 0
               ? 0
               : static_cast<std::uint64_t>(fragment_count - 1) * full_payload + last_payload;
  }
};

FragmentPlan fragment(std::uint32_t frame_bytes, std::uint32_t udp_payload_bytes);

/// Source-side knobs shared by every sender.
struct SourceProfile {
  double frame_rate_hz = 30.0;
  double annotation_rate_hz = 0.0;  // 0 means same as frame_rate_hz
  double box_size_bytes = 39.7;
  std::uint32_t udp_payload_bytes = 1472;
  std::uint16_t per_packet_overhead_bytes = 28;
  bool size_jitter = false;  // draw each frame uniform in [low, high]
};

/// Emits one logical stream of periodic frames, each split into UDP-sized
/// fragments paced evenly across the frame period. Frame k starts at
/// round(k * 1e9 / rate) ns, so long runs accumulate no phase drift; a frame
/// is generated while its start lies strictly before stop_time and all its
/// fragments land inside its own period. When several destinations are
/// given, every fragment is emitted once per destination at the same
/// instant, modelling per-vehicle copies of the same capture.
class FrameSource {
 public:
  struct Counters {
    std::uint64_t frames = 0;
    std::uint64_t packets = 0;
    std::uint64_t payload_bytes = 0;
  };

  FrameSource(EventQueue& queue, double rate_hz, std::uint32_t udp_payload_bytes,
              std::uint16_t overhead_bytes, std::vector<std::int32_t> destinations,
              SimTime stop_time, std::function<std::uint32_t()> next_frame_bytes,
              std::function<void(Packet&&)> emit);

  /// Schedules the first frame at t=0. Call once.
  void start();

  const Counters& counters() const { return counters_; }

  SimTime frame_time(std::uint32_t frame_id) const;

 private:
  void on_frame(std::uint32_t frame_id);
  void on_fragment(std::uint32_t frame_id, std::uint32_t index);
  void emit_fragment(std::uint32_t frame_id, std::uint32_t index);

  EventQueue& queue_;
  double rate_hz_;
  std::uint32_t udp_payload_bytes_;
  std::uint16_t overhead_bytes_;
  std::vector<std::int32_t> destinations_;
  SimTime stop_time_;
  std::function<std::uint32_t()> next_frame_bytes_;
  std::function<void(Packet&&)> emit_;
  FragmentPlan plan_;  // plan of the frame currently being emitted
  SimTime frame_start_ = 0;
  SimTime frame_period_ = 0;
  Counters counters_;
};

}  // namespace skycast
