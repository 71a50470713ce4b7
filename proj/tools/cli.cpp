// Copyright 2026 The swingup Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "manifest.hpp"
#include "swingup/error.hpp"
#include "swingup/estimators.hpp"
#include "swingup/protocols.hpp"
#include "swingup/serialize.hpp"

#ifndef SWINGUP_VERSION
#define SWINGUP_VERSION "unknown"
#endif

namespace swingup::cli {
namespace {

namespace fs = std::filesystem;
using protocols::ExperimentConfig;

constexpr double kPi = 3.14159265358979323846;

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string out_dir;
};

// Collects outputs in memory; nothing touches the disk until a command has
// finished computing.
class Session {
 public:
  Session(const Globals& g, std::string command, std::ostream& out, spdlog::logger& log)
      : globals_(g), out_(out), log_(log) {
    manifest_.command = std::move(command);
    manifest_.tool_version = SWINGUP_VERSION;
    manifest_.started = utc_now();
    cfg_ = g.config_path.empty() ? ExperimentConfig::defaults() : ExperimentConfig::load(g.config_path);
    if (g.seed) cfg_.run.seed = *g.seed;
    if (g.workers) cfg_.run.workers = *g.workers;
    if (!g.out_dir.empty()) cfg_.run.output_dir = g.out_dir;
    cfg_.validate();
    log_.info("config {} (hash {})", g.config_path.empty() ? "<defaults>" : g.config_path,
              hash_hex(fnv1a64(cfg_.source_text)));
  }

  const ExperimentConfig& config() const { return cfg_; }
  std::ostream& out() { return out_; }
  spdlog::logger& log() { return log_; }

  void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }

  void commit() {
    const fs::path dir(cfg_.run.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorKind::kIo, "cannot create output directory " + dir.string());
    if (!cfg_.source_text.empty()) add("config.ini", cfg_.source_text);
    for (const auto& [name, content] : files_) {
      io::write_file((dir / name).string(), content);
      manifest_.outputs.push_back(name);
    }
    manifest_.config_hash = hash_hex(fnv1a64(cfg_.source_text));
    manifest_.has_seed = cfg_.run.seed.has_value();
    manifest_.seed = cfg_.run.seed.value_or(0);
    manifest_.workers = cfg_.run.workers;
    manifest_.finished = utc_now();
    io::write_file((dir / "manifest.json").string(), manifest_.to_json());
    log_.info("wrote {} files to {}", files_.size() + 1, dir.string());
  }

 private:
  const Globals& globals_;
  std::ostream& out_;
  spdlog::logger& log_;
  ExperimentConfig cfg_;
  RunManifest manifest_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string num(double v) { return io::format_number(v); }

void print_pulse_report(std::ostream& out, const pulse::SpectralEnvelope& s, const pulse::TemporalEnvelope& p,
                        const pulse::AutocorrelationTrace& ac) {
  const double bw = s.power_fwhm();
  const double tau = pulse::intensity_fwhm(p);
  char line[512];
  std::snprintf(line, sizeof line,
                "spectral FWHM     %12.6g GHz\n"
                "intensity FWHM    %12.6g ps\n"
                "time-bandwidth    %12.6g\n"
                "pulse area        %12.6g pi\n"
                "energy            %12.6g pJ\n"
                "autocorr FWHM     %12.6g ps\n",
                bw, tau, bw * tau * 1e-3, pulse::pulse_area(p) / kPi, s.energy(), ac.fwhm());
  out << line;
}

int cmd_pulse(Session& s, const std::string& mode) {
  const auto& cfg = s.config();
  const auto spectrum = protocols::carve(cfg.pulse, cfg.pulse.amplitude);
  const auto temporal = pulse::to_time(spectrum, protocols::calibration(cfg.pulse));
  const auto ac = pulse::autocorrelation(temporal);
  print_pulse_report(s.out(), spectrum, temporal, ac);
  if (mode == "design") {
    s.add("spectrum.csv", io::spectrum_csv(spectrum));
    s.add("temporal.csv", io::temporal_csv(temporal));
    s.add("autocorrelation.csv", io::autocorrelation_csv(ac));
    s.commit();
  }
  return kExitOk;
}

int cmd_evolve(Session& s, bool quasi_cw) {
  const auto& cfg = s.config();
  if (quasi_cw) {
    const auto q = protocols::run_quasi_cw_experiment(cfg);
    std::ostringstream csv;
    csv << "# {\"kind\":\"quasi_cw\",\"units\":{\"time\":\"ns\"}}\ntime,population\n";
    for (std::size_t i = 0; i < q.times.size(); ++i) csv << num(q.times[i]) << ',' << num(q.population[i]) << '\n';
    s.out() << io::fit_report(q.fit);
    s.add("quasi_cw.csv", csv.str());
    s.add("quasi_cw_fit.json", io::fit_result_json(q.fit));
    s.commit();
    return kExitOk;
  }
  const auto model = protocols::build_model(cfg.emitter);
  const auto p = protocols::design_pulse(cfg.pulse, cfg.pulse.amplitude);
  const auto traj = dynamics::evolve(model, dynamics::ground_state(model), p);
  const auto& rho = traj.final_state();
  for (std::size_t i = 0; i < model.dimension(); ++i) {
    s.out() << "population |" << model.levels()[i].label << ">  "
            << num(rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real()) << '\n';
  }
  s.out() << "steps " << traj.size() << '\n';
  s.add("trajectory.csv", io::trajectory_csv(traj, model));
  s.commit();
  return kExitOk;
}

int cmd_scan(Session& s, bool extension, bool controls) {
  const auto& cfg = s.config();
  const auto grid = protocols::run_super_scan(cfg);
  const std::size_t top = grid.amplitude.size() - 1;
  const std::size_t arg = grid.argmax_in_row(top);
  s.out() << "max-amplitude row: best inversion " << num(grid.at(top, arg)) << " at " << num(grid.detuning[arg])
          << " GHz\n";
  s.out() << "grid maximum " << num(grid.max_value()) << '\n';
  s.add("scan.csv", io::scan_grid_csv(grid));
  s.add("scan.json", io::scan_grid_json(grid));
  s.add("scan.svg", io::heatmap_svg(grid));
  if (extension) {
    const auto ext = protocols::run_super_power_extension(cfg, cfg.super.multipliers);
    for (std::size_t i = 0; i < ext.multipliers.size(); ++i)
      s.out() << "multiplier " << num(ext.multipliers[i]) << ": " << num(ext.best_inversion[i]) << " at "
              << num(ext.best_detuning[i]) << " GHz\n";
    for (const auto& w : ext.warnings) s.log().warn("{}", w);
    s.add("power_extension.csv", io::power_extension_csv(ext));
  }
  if (controls) {
    s.out() << "fixed color alone: " << num(protocols::run_single_pulse_control(cfg, protocols::SuperColor::kFixed))
            << '\n';
    s.out() << "scanned color alone: "
            << num(protocols::run_single_pulse_control(cfg, protocols::SuperColor::kScanned)) << '\n';
  }
  s.commit();
  if (!grid.failures.empty()) {
    s.log().error("{} grid points failed", grid.failures.size());
    for (const auto& f : grid.failures)
      s.log().error("amplitude {} detuning {}: {}", num(grid.amplitude[f.row]), num(grid.detuning[f.col]), f.message);
    return kExitPartial;
  }
  return kExitOk;
}

// Header JSON of a CSV written by this tool, or null.
nlohmann::json csv_header(const std::string& text) {
  if (text.rfind("# ", 0) != 0) return nullptr;
  const auto end = text.find('\n');
  return nlohmann::json::parse(text.substr(2, end == std::string::npos ? std::string::npos : end - 2), nullptr, false);
}

int cmd_fit(Session& s, const std::string& data_path, const std::string& model, std::optional<double> irf_sigma,
            double t1, bool counts) {
  static const std::vector<std::string> kModels{"lifetime", "rabi", "quasi_cw"};
  if (std::find(kModels.begin(), kModels.end(), model) == kModels.end())
    throw ConfigError(0, "unknown fit model '" + model + "' (available: lifetime, rabi, quasi_cw)");
  std::ifstream in(data_path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot read data file " + data_path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  io::Table table;
  fit::FitResult result;
  try {
    table = io::parse_csv(text);
    if (model == "lifetime") {
      photonstats::DecayHistogram h;
      const auto& lo = table.column("bin_start");
      const auto& hi = table.column("bin_end");
      const auto& c = table.column("counts");
      h.bin_edges = lo;
      if (!hi.empty()) h.bin_edges.push_back(hi.back());
      for (double v : c) {
        if (v < 0.0 || v != std::floor(v)) throw ConfigError(0, "histogram counts must be non-negative integers");
        h.counts.push_back(static_cast<std::uint64_t>(v));
        h.total_events += static_cast<std::uint64_t>(v);
      }
      const auto header = csv_header(text);
      double sigma = 0.0;
      if (irf_sigma) {
        sigma = *irf_sigma;
      } else if (header.is_object() && header.contains("irf_sigma") && header["irf_sigma"].is_number()) {
        sigma = header["irf_sigma"].get<double>();
      }
      h.irf_sigma = sigma;
      result = estimators::fit_lifetime(h);
    } else if (model == "rabi") {
      result = estimators::fit_damped_rabi(table.column("amplitude"), table.column("counts"));
    } else {
      estimators::QuasiCwFitOptions opts;
      opts.t1 = t1;
      opts.counts = counts;
      const auto& y = counts ? table.column("counts") : table.column("population");
      result = estimators::fit_quasi_cw(table.column("time"), y, opts);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kShape) throw ConfigError(0, std::string("data does not match model: ") + e.what());
    throw;
  }

  s.out() << "model " << model << " (" << table.rows() << " rows)\n" << io::fit_report(result);
  if (model == "rabi") {
    const double gamma = result.value("gamma");
    s.out() << "damping amplitude a_d " << (gamma > 0.0 ? num(1.0 / gamma) : std::string("inf")) << " sqrt(pJ)\n";
    if (result.converged) {
      const auto f = estimators::estimate_inversion_fidelity(result);
      s.out() << "inversion fidelity " << num(f.value) << " +- " << num(f.error) << '\n';
    }
  }
  s.add("fit_" + model + ".json", io::fit_result_json(result));
  s.commit();
  return kExitOk;
}

int cmd_g2(Session& s) {
  const auto r = protocols::run_g2_experiment(s.config());
  s.out() << "g2(0) " << num(r.g2_zero) << " (emitter alone " << num(r.g2_signal) << ")\n";
  s.out() << "signal/pulse " << num(r.signal_per_pulse) << "  background/pulse " << num(r.background_per_pulse)
          << '\n';
  s.add("g2.json", io::g2_report_json(r));
  s.add("coincidences.csv", io::coincidence_histogram_csv(r.histogram));
  s.commit();
  return kExitOk;
}

int cmd_lifetime(Session& s) {
  const auto r = protocols::run_lifetime_experiment(s.config());
  s.out() << "excited population " << num(r.excited_population) << "  events " << r.histogram.total_events << '\n';
  if (r.flagged) s.log().warn("{}", r.note);
  if (!r.histogram.counts.empty()) s.add("decay_histogram.csv", io::decay_histogram_csv(r.histogram));
  if (r.fit) {
    s.out() << io::fit_report(*r.fit);
    s.add("lifetime_fit.json", io::fit_result_json(*r.fit));
  }
  s.commit();
  return kExitOk;
}

int cmd_rabi(Session& s) {
  const auto& cfg = s.config();
  const auto sweep = protocols::run_rabi_sweep(cfg);
  s.add("rabi_sweep.csv", io::rabi_sweep_csv(sweep));
  if (!sweep.counts.empty()) {
    const auto f = estimators::fit_damped_rabi(sweep.amplitude, sweep.counts);
    s.out() << io::fit_report(f);
    s.add("fit_rabi.json", io::fit_result_json(f));
  } else {
    const double a_pi = protocols::calibrate_pi(cfg);
    s.out() << "pi amplitude " << num(a_pi) << " sqrt(pJ) (energy " << num(a_pi * a_pi) << " pJ)\n";
  }
  s.commit();
  return kExitOk;
}

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto log = std::make_shared<spdlog::logger>("swingup", sink);
  log->set_pattern("[%l] %v");
  log->set_level(spdlog::level::warn);
  if (const char* env = std::getenv("SWINGUP_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only accept real level names.
    if (level != spdlog::level::off || std::string(env) == "off") log->set_level(level);
  }
  return log;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"swingup: spectral pulse carving and quantum-emitter excitation simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "Experiment config (INI)");
  app.add_option("--seed", g.seed, "RNG seed for stochastic synthesis");
  app.add_option("--workers", g.workers, "Worker threads for grid scans")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "Output directory (default: [run] output_dir)");
  app.set_version_flag("--version", SWINGUP_VERSION);

  std::function<int(Session&)> action;
  std::string command;

  auto* pulse_cmd = app.add_subcommand("pulse", "Design or inspect the configured pulse");
  std::string pulse_mode = "inspect";
  pulse_cmd->add_option("mode", pulse_mode, "design (write CSVs) or inspect (report only)")
      ->check(CLI::IsMember({"design", "inspect"}));
  pulse_cmd->callback([&] { action = [&](Session& s) { return cmd_pulse(s, pulse_mode); }; });

  auto* evolve_cmd = app.add_subcommand("evolve", "Evolve the emitter under the configured pulse");
  bool quasi_cw = false;
  evolve_cmd->add_flag("--quasi-cw", quasi_cw, "Constant resonant drive from [quasi_cw] with a Bloch fit");
  evolve_cmd->callback([&] { action = [&](Session& s) { return cmd_evolve(s, quasi_cw); }; });

  auto* scan_cmd = app.add_subcommand("scan", "Two-color swing-up detuning x amplitude scan");
  bool extension = false, controls = false;
  scan_cmd->add_flag("--extension", extension, "Also run the power extension over [super] multipliers");
  scan_cmd->add_flag("--controls", controls, "Also report single-color control maxima");
  scan_cmd->callback([&] { action = [&](Session& s) { return cmd_scan(s, extension, controls); }; });

  auto* fit_cmd = app.add_subcommand("fit", "Fit a data file with a named model");
  std::string data_path, fit_model;
  std::optional<double> irf_sigma;
  double fit_t1 = dynamics::kPaperT1Ns;
  bool fit_counts = false;
  fit_cmd->add_option("data", data_path, "CSV data file")->required();
  fit_cmd->add_option("--model", fit_model, "lifetime, rabi or quasi_cw")->required();
  fit_cmd->add_option("--irf-sigma", irf_sigma, "IRF sigma in ns (lifetime; default from the CSV header)");
  fit_cmd->add_option("--t1", fit_t1, "Fixed T1 in ns (quasi_cw)");
  fit_cmd->add_flag("--counts", fit_counts, "quasi_cw data are counts: fit scale and offset");
  fit_cmd->callback([&] {
    action = [&](Session& s) { return cmd_fit(s, data_path, fit_model, irf_sigma, fit_t1, fit_counts); };
  });

  auto* g2_cmd = app.add_subcommand("g2", "Pulsed second-order correlation");
  g2_cmd->callback([&] { action = [&](Session& s) { return cmd_g2(s); }; });
  auto* lifetime_cmd = app.add_subcommand("lifetime", "Synthetic lifetime histogram and fit");
  lifetime_cmd->callback([&] { action = [&](Session& s) { return cmd_lifetime(s); }; });
  auto* rabi_cmd = app.add_subcommand("rabi", "Rabi sweep over pulse amplitude");
  rabi_cmd->callback([&] { action = [&](Session& s) { return cmd_rabi(s); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  for (const auto* sub : app.get_subcommands()) command = sub->get_name();

  auto log = make_logger(err);
  try {
    Session session(g, command, out, *log);
    return action(session);
  } catch (const ConfigError& e) {
    if (e.line() > 0) {
      log->error("config error at line {}: {}", e.line(), e.what());
    } else {
      log->error("config error: {}", e.what());
    }
    return kExitConfig;
  } catch (const Error& e) {
    log->error("{}: {}", to_string(e.kind()), e.what());
    return kExitFailure;
  } catch (const std::exception& e) {
    log->error("{}", e.what());
    return kExitFailure;
  }
}

}  // namespace swingup::cli
