#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "skycast/time.hpp"

namespace skycast {

/// Results of one run cell. The CSV row carries the fields up to the second
/// counter block; the rest backs tests and run summaries.
struct MetricRecord {
  std::string scenario;
  int n = 0;
  double fps = 0.0;
  std::uint64_t seed = 0;

  double throughput_mbps = 0.0;  // datagram bytes (payload + overhead) delivered to vehicles,
                                 // measurement window only
  std::optional<double> l1_ms;       // mean air latency UAV -> base station
  std::optional<double> l2_ms;       // mean base station -> vehicle, queueing included
  std::optional<double> latency_ms;  // l1 + l2
  std::optional<double> reliability_pct;  // delivered / intended units, whole run

  std::uint64_t sent_ul = 0;
  std::uint64_t delivered_ul = 0;
  std::uint64_t dropped_buf_ul = 0;
  std::uint64_t dropped_ch_ul = 0;
  std::uint64_t sent_dl = 0;
  std::uint64_t delivered_dl = 0;
  std::uint64_t dropped_buf_dl = 0;
  std::uint64_t dropped_ch_dl = 0;

  // Diagnostics, not serialized.
  std::uint64_t queued_ul_end = 0;
  std::uint64_t queued_dl_end = 0;
  std::uint64_t offered_ul_payload_bytes = 0;
  std::uint64_t intended_units = 0;
  std::uint64_t delivered_units = 0;
  double wall_seconds = 0.0;
  bool ledger_ok = true;
};

std::string csv_header();
void append_csv_row(std::string& out, const MetricRecord& r);

/// Accumulates one run's observations. Latency means and throughput are
/// restricted to deliveries whose completion falls inside the measurement
/// window; the reliability ratio spans the whole run.
class MetricsCollector {
 public:
  /// Measurement window [start, end).
  void open_window(SimTime start, SimTime end);
  bool in_window(SimTime t) const { return t >= start_ && t < end_; }

  void record_ul_delivery(SimTime enqueued_at, SimTime delivered_at, std::uint32_t wire_bytes);
  void record_dl_delivery(SimTime enqueued_at, SimTime delivered_at, std::uint32_t wire_bytes);

  void add_intended(std::uint64_t units) { intended_ += units; }
  void add_delivered_unit() { delivered_units_ += 1; }

  std::uint64_t intended_units() const { return intended_; }
  std::uint64_t delivered_units() const { return delivered_units_; }

  /// Writes the derived fields (throughput, latencies, reliability, unit
  /// counts) into the record; identity and counter fields are the caller's.
  void fill(MetricRecord& r) const;

 private:
  SimTime start_ = 0;
  SimTime end_ = 0;
  double l1_sum_ms_ = 0.0;
  std::uint64_t l1_count_ = 0;
  double l2_sum_ms_ = 0.0;
  std::uint64_t l2_count_ = 0;
  std::uint64_t dl_window_bytes_ = 0;
  std::uint64_t intended_ = 0;
  std::uint64_t delivered_units_ = 0;
};

}  // namespace skycast
