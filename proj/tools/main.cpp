// Command line front end: sweep / breed / wigner / replay / bounds.
// Exit code 0 on success; errors go to stderr with a nonzero exit code.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gridbreeder/breeding.hpp"
#include "gridbreeder/errors.hpp"
#include "gridbreeder/experiments.hpp"
#include "gridbreeder/pe_map.hpp"
#include "gridbreeder/record_io.hpp"
#include "gridbreeder/wigner_io.hpp"

namespace fs = std::filesystem;
using namespace gridbreeder;

namespace {

// GRIDBREEDER_OUT overrides the configured output directory.
fs::path resolve_out_dir(const std::string& configured) {
  if (const char* env = std::getenv("GRIDBREEDER_OUT"); env && *env)
    return fs::path(env);
  return fs::path(configured);
}

nlohmann::json report_json(const SqueezingReport& report) {
  nlohmann::json j;
  j["theta_p"] = report.theta_p;
  j["delta_p"] = report.delta_p;
  j["theta_q"] = report.theta_q;
  j["delta_q"] = report.delta_q;
  j["correction"] = {report.correction.real(), report.correction.imag()};
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

struct CommonOpts {
  std::string config_path;
  ProtocolConfig config;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file (flags override it)");
    cmd->add_option("--seed", config.seed, "RNG seed");
    cmd->add_option("--rounds", config.rounds_max, "breeding rounds M");
    cmd->add_option("--delta", config.delta, "initial squeezing Delta");
    cmd->add_option("--xi", config.xi, "target grid spacing xi");
    cmd->add_option("--reps", config.repetitions, "Monte Carlo repetitions");
    cmd->add_flag("--preshift", config.preshift,
                  "center each cat with a D(-alpha/2) pre-displacement");
    cmd->add_option("--out", config.output_dir, "output directory");
  }

  // CLI11 has already stored flag values; re-apply them on top of the file.
  ProtocolConfig resolve(const CLI::App* cmd) const {
    if (config_path.empty()) return config;
    ProtocolConfig merged = load_config(config_path);
    if (cmd->count("--seed")) merged.seed = config.seed;
    if (cmd->count("--rounds")) merged.rounds_max = config.rounds_max;
    if (cmd->count("--delta")) merged.delta = config.delta;
    if (cmd->count("--xi")) merged.xi = config.xi;
    if (cmd->count("--reps")) merged.repetitions = config.repetitions;
    if (cmd->count("--preshift")) merged.preshift = config.preshift;
    if (cmd->count("--out")) merged.output_dir = config.output_dir;
    return merged;
  }
};

int cmd_sweep(const ProtocolConfig& config, const std::string& variants_csv) {
  ProtocolConfig cfg = config;
  if (!variants_csv.empty()) {
    cfg.variants.clear();
    std::stringstream ss(variants_csv);
    std::string name;
    while (std::getline(ss, name, ','))
      if (!name.empty()) cfg.variants.push_back(variant_from_string(name));
  }
  fs::path dir = resolve_out_dir(cfg.output_dir);
  fs::create_directories(dir);
  SweepResult result = run_sweep(cfg);
  fs::path csv = dir / "sweep.csv";
  emit_csv(result, csv);
  std::cout << "wrote " << csv.string() << " (" << result.cells.size()
            << " cells)\n";
  return 0;
}

int cmd_breed(const ProtocolConfig& config, const std::string& protocol_name) {
  ProtocolConfig cfg = config;
  cfg.protocol = protocol_from_string(protocol_name);
  fs::path dir = resolve_out_dir(cfg.output_dir);
  fs::create_directories(dir);

  CounterRng rng = CounterRng::derive(cfg.seed, "breed", cfg.rounds_max, 0);
  RunResult run = cfg.protocol == Protocol::Slow ? run_slow_breeding(cfg, rng)
                                                 : run_efficient_breeding(cfg, rng);
  save_record(run.record, dir / "record.json");

  Reconstruction recon = cfg.protocol == Protocol::Slow
                             ? reconstruct_slow_state(run.record)
                             : reconstruct_final_state(run.record);
  SqueezingReport report = squeezing_report(run.state, cfg.xi);

  nlohmann::json j = report_json(report);
  j["replay_fidelity"] = fidelity(run.state, recon.state);
  j["transcript"] = nlohmann::json::parse(transcript_to_json(recon.transcript));
  write_text(dir / "report.json", j.dump(2) + "\n");

  std::cout << "M=" << cfg.rounds_max << " delta_p=" << report.delta_p
            << " delta_q=" << report.delta_q << " theta_p=" << report.theta_p
            << "\nwrote " << (dir / "record.json").string() << ", "
            << (dir / "report.json").string() << "\n";
  return 0;
}

int cmd_wigner(const std::string& record_path, bool postselect,
               const ProtocolConfig& config, bool corrected,
               std::vector<double> q_range, std::vector<double> p_range,
               int resolution, const std::string& format,
               const std::string& out_file) {
  DisplacedSqueezedSum state;
  if (!record_path.empty()) {
    state = replay(record_path);
  } else if (postselect) {
    state = post_select_run(config);
  } else {
    throw std::runtime_error("wigner: pass --record FILE or --postselect");
  }
  if (corrected) {
    SqueezingReport report = squeezing_report(state, config.xi);
    state = apply_displacement(state, report.correction);
  }
  WignerGrid grid = wigner_grid(state, {q_range[0], q_range[1]},
                                {p_range[0], p_range[1]}, resolution, resolution);
  if (format == "csv")
    save_wigner_csv(grid, out_file);
  else
    save_wigner_json(grid, out_file);
  std::cout << "wrote " << out_file << "\n";
  return 0;
}

int cmd_replay(const std::string& record_path, const std::string& out_file) {
  MeasurementRecord record = load_record(record_path);
  Reconstruction recon = record.protocol == Protocol::Slow
                             ? reconstruct_slow_state(record)
                             : reconstruct_final_state(record);
  SqueezingReport report = squeezing_report(recon.state, record.xi);
  nlohmann::json j = report_json(report);
  j["rounds"] = record.rounds;
  j["protocol"] = to_string(record.protocol);
  j["transcript"] = nlohmann::json::parse(transcript_to_json(recon.transcript));
  std::string text = j.dump(2) + "\n";
  if (out_file.empty())
    std::cout << text;
  else {
    write_text(out_file, text);
    std::cout << "wrote " << out_file << "\n";
  }
  return 0;
}

int cmd_bounds(std::vector<double> kappa1, std::vector<double> kappa2,
               std::vector<double> eps, const std::string& out_file) {
  if (kappa1.empty()) kappa1 = {2.0, 5.0, 10.0, 20.0, 50.0};
  if (kappa2.empty()) kappa2 = kappa1;
  if (eps.empty()) eps = {0.1, 0.25, 0.5};
  if (kappa2.size() != kappa1.size())
    throw std::runtime_error("bounds: --kappa1 and --kappa2 need equal counts");

  std::string csv = "kappa1,kappa2,epsilon,delta,var_out_bound\n";
  for (std::size_t i = 0; i < kappa1.size(); ++i)
    for (double e : eps) {
      double k1 = kappa1[i], k2 = kappa2[i];
      double delta = improvement_probability_bound(k1, k2, e);
      double var = variance_bound(1.0 / k1, 1.0 / k2, e);
      csv += format_double(k1) + ',' + format_double(k2) + ',' +
             format_double(e) + ',' + format_double(delta) + ',' +
             format_double(var) + '\n';
    }
  if (out_file.empty())
    std::cout << csv;
  else {
    write_text(out_file, csv);
    std::cout << "wrote " << out_file << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gridbreeder: breeding of GKP grid states from squeezed cat "
               "states, without post-selection"};
  app.require_subcommand(1);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo Delta_p sweep over M");
  CommonOpts sweep_opts;
  sweep_opts.attach(sweep);
  std::string variants_csv;
  sweep->add_option("--variants", variants_csv,
                    "comma list of breeding,mises,postselect,lower");

  // breed
  auto* breed = app.add_subcommand("breed", "single run; writes record + report");
  CommonOpts breed_opts;
  breed_opts.attach(breed);
  std::string protocol_name = "efficient";
  breed->add_option("--protocol", protocol_name, "slow or efficient");

  // wigner
  auto* wigner = app.add_subcommand("wigner", "Wigner grid of a state");
  CommonOpts wigner_opts;
  wigner_opts.attach(wigner);
  std::string wig_record;
  bool wig_postselect = false;
  bool wig_corrected = false;
  std::vector<double> wig_q{-4.0, 4.0}, wig_p{-4.0, 4.0};
  int wig_res = 201;
  std::string wig_format = "csv";
  std::string wig_out = "wigner.csv";
  wigner->add_option("--record", wig_record, "measurement record JSON to replay");
  wigner->add_flag("--postselect", wig_postselect, "use the post-selected state");
  wigner->add_flag("--corrected", wig_corrected, "apply the corrective displacement");
  wigner->add_option("--q-range", wig_q, "q axis min max")->expected(2);
  wigner->add_option("--p-range", wig_p, "p axis min max")->expected(2);
  wigner->add_option("--res", wig_res, "grid resolution per axis");
  wigner->add_option("--format", wig_format, "csv or json");
  wigner->add_option("--file", wig_out, "output file");

  // replay
  auto* rep = app.add_subcommand("replay", "record JSON -> squeezing report");
  std::string rep_record;
  std::string rep_out;
  rep->add_option("record", rep_record, "measurement record JSON")->required();
  rep->add_option("--file", rep_out, "write the report here instead of stdout");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "tabulated probability/variance bounds");
  std::vector<double> b_k1, b_k2, b_eps;
  std::string b_out;
  bounds->add_option("--kappa1", b_k1, "kappa of port 1 (repeatable)");
  bounds->add_option("--kappa2", b_k2, "kappa of port 2 (repeatable)");
  bounds->add_option("--eps", b_eps, "epsilon values (repeatable)");
  bounds->add_option("--file", b_out, "write the table here instead of stdout");

  try {
    app.parse(argc, argv);
    if (sweep->parsed()) return cmd_sweep(sweep_opts.resolve(sweep), variants_csv);
    if (breed->parsed()) return cmd_breed(breed_opts.resolve(breed), protocol_name);
    if (wigner->parsed())
      return cmd_wigner(wig_record, wig_postselect, wigner_opts.resolve(wigner),
                        wig_corrected, wig_q, wig_p, wig_res, wig_format, wig_out);
    if (rep->parsed()) return cmd_replay(rep_record, rep_out);
    if (bounds->parsed()) return cmd_bounds(b_k1, b_k2, b_eps, b_out);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
