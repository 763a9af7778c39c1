#include "skycast/runner.hpp"

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "skycast/traffic.hpp"

namespace skycast {

std::vector<int> int_range(int lo, int hi) {
  std::vector<int> out;
  for (int v = lo; v <= hi; ++v) out.push_back(v);
  return out;
}

void validate(const RunConfig& cfg) {
  if (cfg.scenarios.empty()) throw ConfigError("no scenarios selected");
  if (cfg.vehicles.empty()) throw ConfigError("no vehicle counts selected");
  if (cfg.fps.empty()) throw ConfigError("no frame rates selected");
  if (cfg.seeds.empty()) throw ConfigError("no seeds selected");
  for (const int n : cfg.vehicles) {
    if (n < 1) throw ConfigError("vehicle count must be at least 1");
  }
  for (const double f : cfg.fps) {
    if (f <= 0) throw ConfigError("frame rate must be positive");
  }
  if (cfg.sim_time_s <= 0) throw ConfigError("sim_time must be positive");
  if (cfg.warmup_s < 0 || cfg.warmup_s >= cfg.sim_time_s) {
    throw ConfigError("warmup must lie inside the run");
  }
  if (cfg.link.uplink_rate_bps <= 0 || cfg.link.downlink_rate_bps <= 0) {
    throw ConfigError("link rates must be positive");
  }
  for (const double p : {cfg.link.loss_prob_ul, cfg.link.loss_prob_dl}) {
    if (p < 0 || p > 1) throw ConfigError("loss probability must lie in [0, 1]");
  }
  if (cfg.slot.duration <= 0 || cfg.slot.symbol_count < 1 || cfg.slot.symbol_count > 32) {
    throw ConfigError("slot must have positive duration and 1..32 symbols");
  }
  if (cfg.buffer_bytes == 0) throw ConfigError("buffer must hold at least one packet");
  if (cfg.profile.udp_payload_bytes == 0) throw ConfigError("udp payload must be positive");
  if (cfg.profile.box_size_bytes <= 0) throw ConfigError("box size must be positive");
  if (cfg.processing_delay_s < 0 || cfg.dl_pipeline_s < 0) {
    throw ConfigError("delays must be nonnegative");
  }
  if (cfg.jobs < 0) throw ConfigError("jobs must be nonnegative");
}

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

void feed(std::uint64_t& h, const std::string& s) { h = fnv1a(h, s.data(), s.size()); }

void feed(std::uint64_t& h, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g|", v);
  h = fnv1a(h, buf, std::strlen(buf));
}

void feed(std::uint64_t& h, std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%llu|", static_cast<unsigned long long>(v));
  h = fnv1a(h, buf, std::strlen(buf));
}

std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::uint64_t config_hash(const RunConfig& cfg) {
  std::uint64_t h = 1469598103934665603ull;
  feed(h, std::string("scenarios:"));
  for (const ScenarioKind s : cfg.scenarios) feed(h, std::string(to_string(s)));
  feed(h, std::string("vehicles:"));
  for (const int n : cfg.vehicles) feed(h, static_cast<std::uint64_t>(n));
  feed(h, std::string("fps:"));
  for (const double f : cfg.fps) feed(h, f);
  feed(h, std::string("seeds:"));
  for (const std::uint64_t s : cfg.seeds) feed(h, s);
  feed(h, cfg.sim_time_s);
  feed(h, cfg.warmup_s);
  feed(h, cfg.link.uplink_rate_bps);
  feed(h, cfg.link.downlink_rate_bps);
  feed(h, cfg.link.loss_prob_ul);
  feed(h, cfg.link.loss_prob_dl);
  feed(h, static_cast<std::uint64_t>(cfg.slot.duration));
  feed(h, static_cast<std::uint64_t>(cfg.slot.symbol_count));
  feed(h, static_cast<std::uint64_t>(cfg.slot.duplex == DuplexMode::SharedTdd ? 1 : 0));
  feed(h, cfg.buffer_bytes);
  feed(h, cfg.profile.frame_rate_hz);
  feed(h, cfg.profile.annotation_rate_hz);
  feed(h, cfg.profile.box_size_bytes);
  feed(h, static_cast<std::uint64_t>(cfg.profile.udp_payload_bytes));
  feed(h, static_cast<std::uint64_t>(cfg.profile.per_packet_overhead_bytes));
  feed(h, static_cast<std::uint64_t>(cfg.profile.size_jitter ? 1 : 0));
  feed(h, cfg.processing_delay_s);
  feed(h, cfg.dl_pipeline_s);
  feed(h, std::string("trace:") + cfg.trace_file);
  return h;
}

RunConfig figure_recipe(std::string_view name) {
  RunConfig cfg;
  if (name == "fig3a" || name == "fig3b" || name == "fig3c") {
    cfg.out_path = std::string(name) + ".csv";
    return cfg;
  }
  if (name == "fig4") {
    cfg.scenarios = {ScenarioKind::BFA};
    cfg.fps = {30.0};
    cfg.out_path = "fig4.csv";
    return cfg;
  }
  throw UnknownFigure("unknown figure: " + std::string(name));
}

SweepResult run_sweep(const RunConfig& cfg) {
  validate(cfg);

  std::vector<TraceEntry> loaded_trace;
  const std::vector<TraceEntry>* trace = nullptr;
  if (!cfg.trace_file.empty()) {
    try {
      loaded_trace = load_trace_csv(cfg.trace_file);
    } catch (const std::runtime_error& e) {
      throw IoError(e.what());
    }
    trace = &loaded_trace;
  }

  struct Cell {
    ScenarioKind scenario;
    int n;
    double fps;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const ScenarioKind s : cfg.scenarios) {
    for (const int n : cfg.vehicles) {
      for (const double f : cfg.fps) {
        for (const std::uint64_t seed : cfg.seeds) cells.push_back({s, n, f, seed});
      }
    }
  }

  SweepResult result;
  result.records.resize(cells.size());

  auto run_cell = [&](std::size_t i) {
    const Cell& c = cells[i];
    RunParams params;
    params.scenario = c.scenario;
    params.n = c.n;
    params.fps = c.fps;
    params.seed = c.seed;
    params.sim_time_s = cfg.sim_time_s;
    params.warmup_s = cfg.warmup_s;
    params.link = cfg.link;
    params.slot = cfg.slot;
    params.buffer_bytes_ul = cfg.buffer_bytes;
    params.buffer_bytes_dl = cfg.buffer_bytes;
    params.profile = cfg.profile;
    params.processing_delay_s = cfg.processing_delay_s;
    params.dl_pipeline_s = cfg.dl_pipeline_s;
    params.trace = trace;
    Simulation sim(params);
    result.records[i] = sim.run();
  };

  unsigned workers = cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs)
                                  : std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  if (workers > cells.size()) workers = static_cast<unsigned>(cells.size());

  if (workers <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= cells.size()) return;
          try {
            run_cell(i);
          } catch (...) {
            const std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            return;
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  result.provenance.config_hash = config_hash(cfg);
  result.provenance.tool_version = std::string(kToolVersion);
  result.provenance.timestamp = utc_timestamp();
  return result;
}

void write_csv(const SweepResult& result, const std::string& path) {
  std::string out = csv_header();
  for (const MetricRecord& r : result.records) append_csv_row(out, r);

  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) {
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) throw IoError("cannot create " + p.parent_path().string() + ": " + ec.message());
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  f.flush();
  if (!f) throw IoError("write failed: " + path);
}

void write_provenance(const SweepResult& result, const std::string& csv_path) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(result.provenance.config_hash));
  nlohmann::json j = {
      {"config_hash", hash},
      {"tool_version", result.provenance.tool_version},
      {"timestamp", result.provenance.timestamp},
      {"records", result.records.size()},
  };
  const std::string path = csv_path + ".meta.json";
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << j.dump(2) << '\n';
  if (!f) throw IoError("write failed: " + path);
}

namespace {

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  for (const char c : text) {
    if (c == ',') {
      out.push_back(item);
      item.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      item.push_back(c);
    }
  }
  out.push_back(item);
  return out;
}

long long parse_ll(const std::string& text) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &pos);
  } catch (const std::exception&) {
    throw ConfigError("not an integer: '" + text + "'");
  }
  if (pos != text.size()) throw ConfigError("not an integer: '" + text + "'");
  return v;
}

template <typename T>
std::vector<T> parse_integers(const std::string& text) {
  std::vector<T> out;
  for (const std::string& item : split_commas(text)) {
    if (item.empty()) throw ConfigError("empty item in list: '" + text + "'");
    const std::size_t dots = item.find("..");
    if (dots != std::string::npos) {
      const long long lo = parse_ll(item.substr(0, dots));
      const long long hi = parse_ll(item.substr(dots + 2));
      if (lo > hi) throw ConfigError("descending range: '" + item + "'");
      for (long long v = lo; v <= hi; ++v) out.push_back(static_cast<T>(v));
    } else {
      out.push_back(static_cast<T>(parse_ll(item)));
    }
  }
  return out;
}

}  // namespace

std::vector<int> parse_int_list(const std::string& text) { return parse_integers<int>(text); }

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  return parse_integers<std::uint64_t>(text);
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const std::string& item : split_commas(text)) {
    if (item.empty()) throw ConfigError("empty item in list: '" + text + "'");
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      throw ConfigError("not a number: '" + item + "'");
    }
    if (pos != item.size()) throw ConfigError("not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<ScenarioKind> parse_scenario_list(const std::string& text) {
  std::vector<ScenarioKind> out;
  for (const std::string& item : split_commas(text)) {
    if (item == "all") {
      out.insert(out.end(), {ScenarioKind::MFF, ScenarioKind::BFF, ScenarioKind::BFA,
                             ScenarioKind::BAO});
      continue;
    }
    try {
      out.push_back(parse_scenario(item));
    } catch (const UnknownScenario& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

RunConfig load_config_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad JSON in " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object: " + path);

  RunConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "scenarios") {
        cfg.scenarios = parse_scenario_list(value.is_string()
                                                ? value.get<std::string>()
                                                : [&value]() {
                                                    std::string joined;
                                                    for (const auto& v : value) {
                                                      if (!joined.empty()) joined += ',';
                                                      joined += v.get<std::string>();
                                                    }
                                                    return joined;
                                                  }());
      } else if (key == "vehicles") {
        cfg.vehicles = value.is_string() ? parse_int_list(value.get<std::string>())
                                         : value.get<std::vector<int>>();
      } else if (key == "fps") {
        cfg.fps = value.is_string() ? parse_double_list(value.get<std::string>())
                                    : value.get<std::vector<double>>();
      } else if (key == "seeds") {
        cfg.seeds = value.is_string() ? parse_seed_list(value.get<std::string>())
                                      : value.get<std::vector<std::uint64_t>>();
      } else if (key == "sim_time") {
        cfg.sim_time_s = value.get<double>();
      } else if (key == "warmup") {
        cfg.warmup_s = value.get<double>();
      } else if (key == "uplink_rate") {
        cfg.link.uplink_rate_bps = value.get<double>();
      } else if (key == "downlink_rate") {
        cfg.link.downlink_rate_bps = value.get<double>();
      } else if (key == "loss_prob") {
        cfg.link.loss_prob_ul = cfg.link.loss_prob_dl = value.get<double>();
      } else if (key == "loss_prob_ul") {
        cfg.link.loss_prob_ul = value.get<double>();
      } else if (key == "loss_prob_dl") {
        cfg.link.loss_prob_dl = value.get<double>();
      } else if (key == "slot_duration_us") {
        cfg.slot.duration = static_cast<SimTime>(std::llround(value.get<double>() * 1000.0));
      } else if (key == "symbols_per_slot") {
        cfg.slot.symbol_count = value.get<int>();
      } else if (key == "duplex") {
        const std::string mode = value.get<std::string>();
        if (mode == "decoupled") {
          cfg.slot.duplex = DuplexMode::Decoupled;
        } else if (mode == "shared_tdd") {
          cfg.slot.duplex = DuplexMode::SharedTdd;
        } else {
          throw ConfigError("duplex must be 'decoupled' or 'shared_tdd'");
        }
      } else if (key == "buffer_bytes") {
        cfg.buffer_bytes = value.get<std::uint64_t>();
      } else if (key == "annotation_rate") {
        cfg.profile.annotation_rate_hz = value.get<double>();
      } else if (key == "box_size_bytes") {
        cfg.profile.box_size_bytes = value.get<double>();
      } else if (key == "udp_payload_bytes") {
        cfg.profile.udp_payload_bytes = value.get<std::uint32_t>();
      } else if (key == "overhead_bytes") {
        cfg.profile.per_packet_overhead_bytes = value.get<std::uint16_t>();
      } else if (key == "size_jitter") {
        cfg.profile.size_jitter = value.get<bool>();
      } else if (key == "processing_delay") {
        cfg.processing_delay_s = value.get<double>();
      } else if (key == "dl_pipeline") {
        cfg.dl_pipeline_s = value.get<double>();
      } else if (key == "trace_file") {
        cfg.trace_file = value.get<std::string>();
      } else if (key == "out") {
        cfg.out_path = value.get<std::string>();
      } else if (key == "jobs") {
        cfg.jobs = value.get<int>();
      } else {
        throw ConfigError("unknown config key: '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad value in " + path + ": " + e.what());
  }
  return cfg;
}

}  // namespace skycast
