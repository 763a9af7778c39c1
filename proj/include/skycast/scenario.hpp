#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "skycast/buffers.hpp"
#include "skycast/engine.hpp"
#include "skycast/metrics.hpp"
#include "skycast/radio.hpp"
#include "skycast/topology.hpp"
#include "skycast/traffic.hpp"

namespace skycast {

/// Dissemination strategies.
///
/// MFF: the UAV uplinks one full-frame stream per vehicle; the base station
/// forwards each stream to its vehicle unchanged.
/// BFF: the UAV uplinks a single full-frame stream; the base station
/// duplicates every packet to every vehicle.
/// BFA: the UAV uplinks a single full-frame stream; the base station
/// reassembles each frame, runs detection, and sends every vehicle a small
/// annotation packet instead of the frame.
/// BAO: the UAV runs detection on board and uplinks only annotations; the
/// base station duplicates them to every vehicle.
enum class ScenarioKind : std::uint8_t { MFF, BFF, BFA, BAO };

class UnknownScenario : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

ScenarioKind parse_scenario(std::string_view name);  // case-insensitive
std::string_view to_string(ScenarioKind kind);

enum class RelayAction : std::uint8_t {
  ForwardPerVehicleCopy,  // uplink packets carry their destination
  DuplicateToAll,
  ProcessThenAnnotateAll,  // reassemble the frame, then annotate every vehicle
};

struct RelayRule {
  RelayAction action = RelayAction::ForwardPerVehicleCopy;
  bool uav_sends_annotations = false;
};

RelayRule relay_rule(ScenarioKind kind);

struct RunParams {
  ScenarioKind scenario = ScenarioKind::MFF;
  int n = 4;
  double fps = 30.0;
  std::uint64_t seed = 1;
  double sim_time_s = 15.0;
  double warmup_s = 0.5;
  LinkModel link;
  SlotConfig slot;
  std::uint64_t buffer_bytes_ul = 10'000'000;
  std::uint64_t buffer_bytes_dl = 10'000'000;
  SourceProfile profile;
  double processing_delay_s = 0.0;   // extra base-station compute before annotating
  double dl_pipeline_s = 0.000375;   // base-station receive/forward pipeline
  Rect deployment;
  double uav_height_m = 50.0;
  const std::vector<TraceEntry>* trace = nullptr;  // null selects the built-in series
};

/// One cell of the study: builds the topology, bearers, scheduler, and
/// source for the given parameters, runs the event loop to sim_time, and
/// reduces the observations to a MetricRecord. Single-shot: construct, call
/// run() once.
class Simulation : private PacketSink {
 public:
  explicit Simulation(const RunParams& params);

  MetricRecord run();

  const NodeLayout& layout() const { return layout_; }
  const SchedulerAudit& scheduler_audit() const { return scheduler_.audit(); }

 private:
  struct FrameAssembly {
    std::uint32_t expected = 0;
    std::uint32_t delivered = 0;
    std::uint32_t lost = 0;
  };

  void on_service_complete(Direction dir, std::int32_t vehicle, Packet&& p,
                           SimTime now) override;
  void on_slot(SimTime slot_start);
  void emit_uplink(Packet&& p);
  void relay_to_vehicles(const Packet& p, SimTime now);
  void enqueue_downlink(std::int32_t vehicle, Packet p, SimTime now, SimTime extra_delay);
  void note_frame_fragment(const Packet& p, bool delivered, SimTime now);
  std::uint32_t next_frame_bytes();

  RunParams params_;
  RelayRule rule_;
  std::vector<TraceEntry> trace_;
  std::uint32_t annotation_bytes_ = 0;
  FragmentPlan annotation_plan_;
  SimTime dl_delay_ = 0;        // pipeline only
  SimTime annotate_delay_ = 0;  // pipeline plus processing

  EventQueue queue_;
  RngStream pos_rng_;
  RngStream chan_ul_rng_;
  RngStream chan_dl_rng_;
  RngStream trace_rng_;
  NodeLayout layout_;
  Bearer ul_;
  std::vector<Bearer> dl_;
  RadioScheduler scheduler_;
  MetricsCollector metrics_;
  std::unique_ptr<FrameSource> source_;
  std::vector<FrameAssembly> frames_;
};

}  // namespace skycast
