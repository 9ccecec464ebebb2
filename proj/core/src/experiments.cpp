#include "gridbreeder/experiments.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <thread>

#include <json.hpp>

#include "gridbreeder/errors.hpp"
#include "gridbreeder/pe_map.hpp"
#include "gridbreeder/record_io.hpp"
#include "gridbreeder/wigner_io.hpp"

namespace gridbreeder {

namespace {

using nlohmann::json;

// Mean plus RMS deviations of the above-mean and below-mean subsamples.
SweepCell aggregate(Variant variant, int rounds, const std::vector<double>& samples) {
  SweepCell cell{variant, rounds, 0.0, 0.0, 0.0, static_cast<int>(samples.size())};
  double sum = 0.0;
  for (double s : samples) sum += s;
  cell.mean_delta_p = sum / static_cast<double>(samples.size());
  double up = 0.0, down = 0.0;
  int n_up = 0, n_down = 0;
  for (double s : samples) {
    double d = s - cell.mean_delta_p;
    if (d > 0.0) {
      up += d * d;
      ++n_up;
    } else if (d < 0.0) {
      down += d * d;
      ++n_down;
    }
  }
  if (n_up > 0) cell.dev_up = std::sqrt(up / n_up);
  if (n_down > 0) cell.dev_down = std::sqrt(down / n_down);
  return cell;
}

// Runs `count` repetitions concurrently; results land in their own slot so
// scheduling cannot change the aggregate.
std::vector<double> parallel_runs(int count,
                                  const std::function<double(int)>& one_run) {
  std::vector<double> out(static_cast<std::size_t>(count));
  unsigned workers = std::min<unsigned>(std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(count));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) out[i] = one_run(i);
    return out;
  }
  std::atomic<int> cursor{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = cursor.fetch_add(1); i < count; i = cursor.fetch_add(1))
        out[i] = one_run(i);
    });
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace

SweepResult run_sweep(const ProtocolConfig& config) {
  config.validate();
  SweepResult result;
  double kappa0 = 0.0;
  for (Variant v : config.variants)
    if (v == Variant::Mises || v == Variant::Lower) {
      kappa0 = calibrate_kappa0(config.delta, config.xi);
      break;
    }

  for (Variant variant : config.variants) {
    for (int rounds = 0; rounds <= config.rounds_max; ++rounds) {
      ProtocolConfig run_cfg = config;
      run_cfg.rounds_max = rounds;
      run_cfg.protocol = Protocol::Efficient;
      switch (variant) {
        case Variant::Breeding: {
          auto one = [&](int rep) {
            CounterRng rng = CounterRng::derive(config.seed, "breeding",
                                                static_cast<std::uint64_t>(rounds),
                                                static_cast<std::uint64_t>(rep));
            RunResult run = run_efficient_breeding(run_cfg, rng);
            return squeezing_report(run.state, config.xi).delta_p;
          };
          result.cells.push_back(aggregate(
              variant, rounds, parallel_runs(config.repetitions, one)));
          break;
        }
        case Variant::Mises: {
          auto one = [&](int rep) {
            CounterRng rng = CounterRng::derive(config.seed, "mises",
                                                static_cast<std::uint64_t>(rounds),
                                                static_cast<std::uint64_t>(rep));
            MisesTrajectory traj = run_mises_protocol(run_cfg, kappa0, rng);
            return effective_squeezing_from_kappa(traj.root().kappa);
          };
          result.cells.push_back(aggregate(
              variant, rounds, parallel_runs(config.repetitions, one)));
          break;
        }
        case Variant::Postselect: {
          double dp = squeezing_report(post_select_run(run_cfg), config.xi).delta_p;
          result.cells.push_back({variant, rounds, dp, 0.0, 0.0, 1});
          break;
        }
        case Variant::Lower: {
          double dp = effective_squeezing_from_kappa(std::ldexp(kappa0, rounds));
          result.cells.push_back({variant, rounds, dp, 0.0, 0.0, 1});
          break;
        }
      }
    }
  }
  return result;
}

std::string sweep_to_csv(const SweepResult& result) {
  std::string out = "variant,M,mean_delta_p,dev_up,dev_down,n\n";
  for (const SweepCell& c : result.cells) {
    out += to_string(c.variant);
    out += ',' + std::to_string(c.rounds);
    out += ',' + format_double(c.mean_delta_p);
    out += ',' + format_double(c.dev_up);
    out += ',' + format_double(c.dev_down);
    out += ',' + std::to_string(c.n);
    out += '\n';
  }
  return out;
}

void emit_csv(const SweepResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << sweep_to_csv(result);
}

std::string trajectories_to_csv(const std::vector<MisesTrajectory>& trajectories) {
  std::string out = "repetition,round,kappa,mu,delta_p\n";
  for (std::size_t rep = 0; rep < trajectories.size(); ++rep)
    for (std::size_t m = 0; m < trajectories[rep].levels.size(); ++m)
      for (const VonMisesGridState& s : trajectories[rep].levels[m]) {
        out += std::to_string(rep);
        out += ',' + std::to_string(m);
        out += ',' + format_double(s.kappa);
        out += ',' + format_double(s.mu);
        out += ',' + format_double(effective_squeezing_from_kappa(s.kappa));
        out += '\n';
      }
  return out;
}

DisplacedSqueezedSum replay(const std::filesystem::path& record_path) {
  MeasurementRecord record = load_record(record_path);
  if (record.protocol == Protocol::Slow)
    return reconstruct_slow_state(record).state;
  return reconstruct_final_state(record).state;
}

ProtocolConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("config: invalid JSON: ") + e.what());
  }
  ProtocolConfig config;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      if (key == "rounds_max") config.rounds_max = it.value().get<int>();
      else if (key == "delta") config.delta = it.value().get<double>();
      else if (key == "xi") config.xi = it.value().get<double>();
      else if (key == "repetitions") config.repetitions = it.value().get<int>();
      else if (key == "seed") config.seed = it.value().get<std::uint64_t>();
      else if (key == "preshift") config.preshift = it.value().get<bool>();
      else if (key == "output_dir") config.output_dir = it.value().get<std::string>();
      else if (key == "protocol")
        config.protocol = protocol_from_string(it.value().get<std::string>());
      else if (key == "variants") {
        config.variants.clear();
        for (const json& v : it.value())
          config.variants.push_back(variant_from_string(v.get<std::string>()));
      } else {
        throw SchemaError("config: unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("config: ") + e.what());
  }
  return config;
}

std::string config_to_json(const ProtocolConfig& config) {
  json j;
  j["rounds_max"] = config.rounds_max;
  j["delta"] = config.delta;
  j["xi"] = config.xi;
  j["repetitions"] = config.repetitions;
  j["seed"] = config.seed;
  j["preshift"] = config.preshift;
  j["output_dir"] = config.output_dir;
  j["protocol"] = to_string(config.protocol);
  json variants = json::array();
  for (Variant v : config.variants) variants.push_back(to_string(v));
  j["variants"] = std::move(variants);
  return j.dump(2);
}

ProtocolConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config from " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return config_from_json(text);
}

}  // namespace gridbreeder
