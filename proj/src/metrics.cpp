#include "skycast/metrics.hpp"

#include <cstdio>

namespace skycast {

namespace {

void append_f6(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  out += buf;
}

void append_opt(std::string& out, const std::optional<double>& v) {
  if (v) append_f6(out, *v);
}

void append_u64(std::string& out, std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(v));
  out += buf;
}

}  // namespace

std::string csv_header() {
  return "scenario,n,fps,seed,throughput_mbps,l1_ms,l2_ms,latency_ms,reliability_pct,"
         "sent_ul,delivered_ul,dropped_buf_ul,dropped_ch_ul,"
         "sent_dl,delivered_dl,dropped_buf_dl,dropped_ch_dl\n";
}

void append_csv_row(std::string& out, const MetricRecord& r) {
  char buf[64];
  out += r.scenario;
  out += ',';
  std::snprintf(buf, sizeof buf, "%d", r.n);
  out += buf;
  out += ',';
  std::snprintf(buf, sizeof buf, "%g", r.fps);
  out += buf;
  out += ',';
  append_u64(out, r.seed);
  out += ',';
  append_f6(out, r.throughput_mbps);
  out += ',';
  append_opt(out, r.l1_ms);
  out += ',';
  append_opt(out, r.l2_ms);
  out += ',';
  append_opt(out, r.latency_ms);
  out += ',';
  append_opt(out, r.reliability_pct);
  for (const std::uint64_t v :
       {r.sent_ul, r.delivered_ul, r.dropped_buf_ul, r.dropped_ch_ul, r.sent_dl,
        r.delivered_dl, r.dropped_buf_dl, r.dropped_ch_dl}) {
    out += ',';
    append_u64(out, v);
  }
  out += '\n';
}

void MetricsCollector::open_window(SimTime start, SimTime end) {
  start_ = start;
  end_ = end;
}

void MetricsCollector::record_ul_delivery(SimTime enqueued_at, SimTime delivered_at,
                                          std::uint32_t wire_bytes) {
  (void)wire_bytes;
  if (!in_window(delivered_at)) return;
  l1_sum_ms_ += to_millis(delivered_at - enqueued_at);
  l1_count_ += 1;
}

void MetricsCollector::record_dl_delivery(SimTime enqueued_at, SimTime delivered_at,
                                          std::uint32_t wire_bytes) {
  if (!in_window(delivered_at)) return;
  l2_sum_ms_ += to_millis(delivered_at - enqueued_at);
  l2_count_ += 1;
  dl_window_bytes_ += wire_bytes;
}

void MetricsCollector::fill(MetricRecord& r) const {
  const double window_s = to_secs(end_ - start_);
  r.throughput_mbps =
      window_s > 0 ? static_cast<double>(dl_window_bytes_) * 8.0 / window_s / 1e6 : 0.0;
  if (l1_count_ > 0) r.l1_ms = l1_sum_ms_ / static_cast<double>(l1_count_);
  if (l2_count_ > 0) r.l2_ms = l2_sum_ms_ / static_cast<double>(l2_count_);
  if (r.l1_ms && r.l2_ms) {
    r.latency_ms = *r.l1_ms + *r.l2_ms;
  } else if (r.l1_ms) {
    r.latency_ms = r.l1_ms;
  } else if (r.l2_ms) {
    r.latency_ms = r.l2_ms;
  }
  if (intended_ > 0) {
    r.reliability_pct =
        100.0 * static_cast<double>(delivered_units_) / static_cast<double>(intended_);
  }
  r.intended_units = intended_;
  r.delivered_units = delivered_units_;
}

}  // namespace skycast
