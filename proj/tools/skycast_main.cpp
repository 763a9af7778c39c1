#include <chrono>
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "skycast/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Packet-level simulator of UAV-to-vehicle video dissemination over one "
               "mmWave cell: sweeps strategy, vehicle count, frame rate, and seed, and "
               "writes one CSV row per run."};
  app.set_version_flag("--version", std::string(skycast::kToolVersion));

  std::string config_path;
  std::string figure;
  std::string scenarios;
  std::string vehicles;
  std::string fps;
  std::string seeds;
  double sim_time = -1;
  double uplink_rate = -1;
  double downlink_rate = -1;
  std::uint64_t buffer_bytes = 0;
  double loss_prob = -1;
  std::string trace_file;
  std::string out_path;
  int jobs = -1;

  app.add_option("--config", config_path, "JSON config file; CLI flags override it");
  app.add_option("--figure", figure,
                 "Canned sweep: fig3a, fig3b, fig3c, or fig4; CLI flags override it");
  app.add_option("--scenario", scenarios, "Strategies to run: mff,bff,bfa,bao or 'all'");
  app.add_option("--vehicles", vehicles, "Vehicle counts, e.g. '4..21' or '4,8,12'");
  app.add_option("--fps", fps, "Frame rates, e.g. '15,30'");
  app.add_option("--seeds", seeds, "Seeds, e.g. '1..5' or '7'");
  app.add_option("--sim-time", sim_time, "Simulated seconds per run");
  app.add_option("--uplink-rate", uplink_rate, "Uplink capacity in bit/s");
  app.add_option("--downlink-rate", downlink_rate, "Downlink aggregate capacity in bit/s");
  app.add_option("--buffer-bytes", buffer_bytes, "Transmit buffer per bearer in bytes");
  app.add_option("--loss-prob", loss_prob, "Packet loss probability, both directions");
  app.add_option("--trace-file", trace_file,
                 "Frame-size trace CSV (vehicle_count,mean_bytes[,low,high])");
  app.add_option("--out", out_path, "Output CSV path");
  app.add_option("--jobs", jobs, "Parallel runs (0 = all hardware threads)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (!config_path.empty() && !figure.empty()) {
      throw skycast::ConfigError("--config and --figure are mutually exclusive");
    }
    skycast::RunConfig cfg;
    if (!figure.empty()) {
      cfg = skycast::figure_recipe(figure);
    } else if (!config_path.empty()) {
      cfg = skycast::load_config_json(config_path);
    }
    if (!scenarios.empty()) cfg.scenarios = skycast::parse_scenario_list(scenarios);
    if (!vehicles.empty()) cfg.vehicles = skycast::parse_int_list(vehicles);
    if (!fps.empty()) cfg.fps = skycast::parse_double_list(fps);
    if (!seeds.empty()) cfg.seeds = skycast::parse_seed_list(seeds);
    if (sim_time >= 0) cfg.sim_time_s = sim_time;
    if (uplink_rate >= 0) cfg.link.uplink_rate_bps = uplink_rate;
    if (downlink_rate >= 0) cfg.link.downlink_rate_bps = downlink_rate;
    if (buffer_bytes > 0) cfg.buffer_bytes = buffer_bytes;
    if (loss_prob >= 0) cfg.link.loss_prob_ul = cfg.link.loss_prob_dl = loss_prob;
    if (!trace_file.empty()) cfg.trace_file = trace_file;
    if (!out_path.empty()) cfg.out_path = out_path;
    if (jobs >= 0) cfg.jobs = jobs;

    const auto t0 = std::chrono::steady_clock::now();
    const skycast::SweepResult result = skycast::run_sweep(cfg);
    skycast::write_csv(result, cfg.out_path);
    skycast::write_provenance(result, cfg.out_path);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("wrote %s: %zu records in %.1f s\n", cfg.out_path.c_str(),
                result.records.size(), elapsed);
    return kExitOk;
  } catch (const skycast::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const skycast::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const skycast::UnknownFigure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
}
