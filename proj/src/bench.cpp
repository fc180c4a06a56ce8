#include "mfss/bench.hpp"

#include <sys/utsname.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <thread>
#include <tuple>

#include <Eigen/Core>

#include "mfss/errors.hpp"

namespace mfss {

BenchConfig bench_config(const Config& cfg) {
  cfg.check_keys("bench", {"n", "n_q", "p", "backends", "T", "reps", "warmup", "radius", "recipe",
                           "seed"});
  BenchConfig out;
  auto to_index = [](const std::vector<long>& v) { return std::vector<Index>(v.begin(), v.end()); };
  out.n = to_index(cfg.get_int_list("bench", "n", std::vector<long>(out.n.begin(), out.n.end())));
  out.n_q = to_index(cfg.get_int_list("bench", "n_q", std::vector<long>{1}));
  out.p = to_index(cfg.get_int_list("bench", "p", std::vector<long>{6}));
  out.backends.clear();
  for (const auto& name :
       cfg.get_string_list("bench", "backends", std::vector<std::string>{"baseline", "blocked", "adaptive"})) {
    try {
      out.backends.push_back(parse_backend(name));
    } catch (const ConfigError& e) {
      throw ConfigError(cfg.where("bench", "backends") + e.what());
    }
  }
  out.T = cfg.get_int("bench", "T", 500L);
  out.reps = static_cast<int>(cfg.get_int("bench", "reps", 20L));
  out.warmup = static_cast<int>(cfg.get_int("bench", "warmup", 3L));
  out.radius = cfg.get_double("bench", "radius", 0.95);
  try {
    out.recipe = parse_recipe(cfg.get_string("bench", "recipe", "bracket"));
  } catch (const ConfigError& e) {
    throw ConfigError(cfg.where("bench", "recipe") + e.what());
  }
  out.seed = static_cast<std::uint64_t>(cfg.get_int("bench", "seed", 1L));
  if (out.reps < 1) throw ConfigError(cfg.where("bench", "reps") + "must be at least 1");
  if (out.warmup < 0) throw ConfigError(cfg.where("bench", "warmup") + "must be non-negative");
  if (!(out.radius > 0.0 && out.radius < 1.0))
    throw ConfigError(cfg.where("bench", "radius") + "must lie in (0, 1)");
  for (Index p : out.p)
    if (p < 3) throw ConfigError(cfg.where("bench", "p") + "lag orders below 3 cannot carry the quarterly average");
  for (Index n : out.n)
    for (Index q : out.n_q)
      if (n - q < 3) throw ConfigError(cfg.where("bench", "n") + "each n must exceed n_q by at least 3");
  return out;
}

double median_ms(const std::function<void(int)>& body, int reps, int warmup) {
  using clock = std::chrono::steady_clock;
  for (int i = 0; i < warmup; ++i) body(i);
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(reps));
  for (int i = 0; i < reps; ++i) {
    const auto t0 = clock::now();
    body(warmup + i);
    samples.push_back(std::chrono::duration<double, std::milli>(clock::now() - t0).count());
  }
  std::sort(samples.begin(), samples.end());
  const std::size_t mid = samples.size() / 2;
  return samples.size() % 2 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
}

std::vector<BenchCell> run_bench(const BenchConfig& cfg,
                                 const std::function<void(const BenchCell&)>& progress) {
  std::vector<BenchCell> out;
  std::mt19937_64 rng(cfg.seed);
  for (Index p : cfg.p) {
    for (Index n_q : cfg.n_q) {
      for (Index n : cfg.n) {
        const Index n_m = n - n_q;
        VarParams params = random_var(n_m, n_q, p, cfg.radius, rng);
        const auto lengths = edge_lengths(edge_counts(n, n_m, cfg.recipe));
        const SyntheticInstance inst = simulate_instance(params, {}, cfg.T, lengths, rng());
        const ModelContext ctx(std::move(params), {}, inst.data);

        std::vector<PseudoSample> pseudo;
        const std::uint64_t master = rng();
        for (int i = 0; i < cfg.reps + cfg.warmup; ++i)
          pseudo.push_back(gen_pseudo(ctx, derive_seed(master, static_cast<std::uint64_t>(i))));

        for (Backend b : cfg.backends) {
          BenchCell cell{n, n_q, p, b, 0.0, cfg.reps};
          cell.ms_per_iter = median_ms(
              [&](int i) { draw_from_pseudo(ctx, pseudo[static_cast<std::size_t>(i)], b); },
              cfg.reps, cfg.warmup);
          if (progress) progress(cell);
          out.push_back(cell);
        }
      }
    }
  }
  return out;
}

std::vector<std::string> machine_info() {
  std::vector<std::string> out;
  utsname u{};
  if (uname(&u) == 0) {
    out.push_back(std::string("host: ") + u.nodename);
    out.push_back(std::string("os: ") + u.sysname + " " + u.release + " " + u.machine);
  }
  std::ifstream cpu("/proc/cpuinfo");
  std::string line;
  while (std::getline(cpu, line)) {
    if (line.rfind("model name", 0) == 0) {
      out.push_back("cpu: " + line.substr(line.find(':') + 2));
      break;
    }
  }
  out.push_back("hardware_threads: " + std::to_string(std::thread::hardware_concurrency()));
  out.push_back("compiler: " + std::string(__VERSION__));
  out.push_back("eigen: " + std::to_string(EIGEN_WORLD_VERSION) + "." +
                std::to_string(EIGEN_MAJOR_VERSION) + "." + std::to_string(EIGEN_MINOR_VERSION));
  return out;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchCell>& cells, const BenchConfig& cfg) {
  for (const auto& line : machine_info()) os << "# " << line << "\n";
  os << "# T: " << cfg.T << "\n# warmup: " << cfg.warmup << "\n# recipe: " << recipe_name(cfg.recipe)
     << "\n# seed: " << cfg.seed << "\n";
  os << "n,n_q,p,backend,ms_per_iter,reps\n";
  os << std::setprecision(6);
  for (const auto& c : cells)
    os << c.n << "," << c.n_q << "," << c.p << "," << backend_name(c.backend) << "," << c.ms_per_iter
       << "," << c.reps << "\n";
}

void write_relative_csv(std::ostream& os, const std::vector<BenchCell>& cells) {
  std::map<std::tuple<Index, Index, Index>, std::map<Backend, double>> grid;
  for (const auto& c : cells) grid[{c.p, c.n_q, c.n}][c.backend] = c.ms_per_iter;
  os << "n,n_q,p,backend,relative_to_baseline\n" << std::setprecision(6);
  for (const auto& [key, row] : grid) {
    auto base = row.find(Backend::Baseline);
    if (base == row.end() || !(base->second > 0.0)) continue;
    for (const auto& [b, ms] : row) {
      if (b == Backend::Baseline) continue;
      os << std::get<2>(key) << "," << std::get<1>(key) << "," << std::get<0>(key) << ","
         << backend_name(b) << "," << ms / base->second << "\n";
    }
  }
}

}  // namespace mfss
