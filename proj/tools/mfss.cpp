#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "mfss/bench.hpp"
#include "mfss/errors.hpp"
#include "mfss/io.hpp"
#include "mfss/simsmooth.hpp"
#include "mfss/synth.hpp"

using namespace mfss;

namespace {

constexpr int kOk = 0;
constexpr int kTolerance = 1;
constexpr int kUsage = 2;

struct Options {
  std::string config;
  std::string backend;
  std::optional<std::uint64_t> seed;
  std::optional<long> draws;
  double tol = 1e-8;
  std::string out;
  std::string data;
  std::string params;
  std::vector<std::string> archives;
};

int cmd_simulate(const Options& opt) {
  if (opt.config.empty()) throw ConfigError("simulate needs --config");
  if (opt.out.empty()) throw ConfigError("simulate needs --out <directory>");
  const Config cfg = Config::load(opt.config);
  const ModelSpec spec = model_spec(cfg);
  cfg.check_keys("simulate", {"T", "radius", "recipe", "trailing", "burn_in", "seed"});
  const Index T = cfg.get_int("simulate", "T");
  const double radius = cfg.get_double("simulate", "radius", 0.95);
  if (!(radius > 0.0 && radius < 1.0))
    throw ConfigError(cfg.where("simulate", "radius") + "must lie in (0, 1)");
  const Index burn_in = cfg.get_int("simulate", "burn_in", 200L);
  const std::uint64_t seed =
      opt.seed ? *opt.seed : static_cast<std::uint64_t>(cfg.get_int("simulate", "seed", 1L));

  std::vector<Index> trailing;
  if (cfg.has("simulate", "trailing")) {
    for (long v : cfg.get_int_list("simulate", "trailing")) trailing.push_back(v);
    if (static_cast<Index>(trailing.size()) != spec.n_m)
      throw ConfigError(cfg.where("simulate", "trailing") + "need " + std::to_string(spec.n_m) +
                        " entries, one per monthly variable");
  } else {
    MissingRecipe recipe;
    try {
      recipe = parse_recipe(cfg.get_string("simulate", "recipe", "bracket"));
    } catch (const ConfigError& e) {
      throw ConfigError(cfg.where("simulate", "recipe") + e.what());
    }
    trailing = edge_lengths(edge_counts(spec.n_m + spec.n_q, spec.n_m, recipe));
  }
  if (T <= spec.p + *std::max_element(trailing.begin(), trailing.end()))
    throw ConfigError(cfg.where("simulate", "T") + "too short for p and the ragged edge");

  std::mt19937_64 rng(seed);
  VarParams params = random_var(spec.n_m, spec.n_q, spec.p, radius, rng);
  const SyntheticInstance inst =
      simulate_instance(params, spec.scheme, T, trailing, rng(), spec.calendar_offset, burn_in);
  const ObservationPattern pattern = detect_pattern(inst.data, spec.p);

  const fs::path dir = opt.out;
  fs::create_directories(dir);
  const auto names = default_names(spec.n_m, spec.n_q);
  write_data_csv(dir / "data.csv", inst.data.values(), names);
  write_data_csv(dir / "latent.csv", inst.latent, names);
  write_params_json(dir / "params.json", params);
  std::ofstream ini(dir / "model.ini");
  write_model_section(ini, spec);
  ini << "\n[smooth]\ndata = data.csv\nparams = params.json\n";
  if (!ini) throw IoError("write failed for '" + (dir / "model.ini").string() + "'");

  std::cout << "simulated T=" << T << " n=" << params.n() << " (n_q=" << spec.n_q << ") p=" << spec.p
            << " T_b=" << pattern.tb << " spectral_radius=" << params.spectral_radius()
            << " -> " << dir.string() << "\n";
  return kOk;
}

int cmd_smooth(const Options& opt) {
  std::optional<Config> cfg;
  if (!opt.config.empty()) cfg = Config::load(opt.config);
  if (cfg) cfg->check_keys("smooth", {"data", "params", "backend", "draws", "seed"});
  auto path_of = [&](const std::string& flag, const std::string& key) -> fs::path {
    if (!flag.empty()) return flag;
    if (cfg && cfg->has("smooth", key)) return cfg->get_path("smooth", key);
    throw ConfigError("smooth needs --" + key + " or [smooth] " + key + " in the config");
  };
  if (opt.out.empty()) throw ConfigError("smooth needs --out <archive>");
  const fs::path data_path = path_of(opt.data, "data");
  const fs::path params_path = path_of(opt.params, "params");

  const VarParams params = read_params_json(params_path);
  ModelSpec spec;
  if (cfg && cfg->has_section("model")) {
    spec = model_spec(*cfg);
    if (spec.n_m != params.n_m() || spec.n_q != params.n_q() || spec.p != params.p())
      throw ConfigError("config [model] dimensions disagree with '" + params_path.string() + "'");
  } else {
    spec.n_m = params.n_m();
    spec.n_q = params.n_q();
    spec.p = params.p();
  }
  const DataFile file = read_data_csv(data_path, params.n_q(), spec.calendar_offset);

  std::string backend_str = opt.backend;
  if (backend_str.empty()) backend_str = cfg ? cfg->get_string("smooth", "backend", "adaptive") : "adaptive";
  const Backend backend = parse_backend(backend_str);
  long draws = 1;
  if (opt.draws)
    draws = *opt.draws;
  else if (cfg)
    draws = cfg->get_int("smooth", "draws", 1L);
  if (draws < 0) throw ConfigError("--draws must be non-negative");
  const std::uint64_t seed =
      opt.seed ? *opt.seed
               : static_cast<std::uint64_t>(cfg ? cfg->get_int("smooth", "seed", 1L) : 1L);

  const ModelContext ctx(params, spec.scheme, file.data, spec.init);
  const unsigned threads = draw_threads();
  std::vector<double> elapsed;
  const auto t0 = std::chrono::steady_clock::now();
  const auto result = draw_many(ctx, backend, static_cast<std::size_t>(draws), seed, threads, &elapsed);
  const double wall = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  ConstraintCheck worst;
  for (std::size_t i = 0; i < result.size(); ++i) {
    const ConstraintCheck c = check_constraints(ctx, result[i].X);
    worst.monthly = std::max(worst.monthly, c.monthly);
    worst.quarterly = std::max(worst.quarterly, c.quarterly);
    std::cout << "draw " << i << " seed=" << result[i].seed << " ms=" << elapsed[i] << "\n";
  }
  const DrawArchive archive = make_archive(result, params.n_q(), backend, params.hash(), ctx.T(), ctx.n());
  save_archive(opt.out, archive, file.names);

  const double total = std::accumulate(elapsed.begin(), elapsed.end(), 0.0);
  std::cout << "backend=" << backend_name(backend) << " draws=" << draws << " threads=" << threads
            << " T=" << ctx.T() << " n=" << ctx.n() << " T_b=" << ctx.tb()
            << " mean_ms=" << (draws > 0 ? total / static_cast<double>(draws) : 0.0)
            << " wall_ms=" << wall << " max_monthly_dev=" << worst.monthly
            << " max_quarterly_dev=" << worst.quarterly << " -> " << opt.out << "\n";
  return kOk;
}

int cmd_bench(const Options& opt) {
  if (opt.config.empty()) throw ConfigError("bench needs --config");
  const Config cfg = Config::load(opt.config);
  BenchConfig bc = bench_config(cfg);
  if (!opt.backend.empty()) bc.backends = {parse_backend(opt.backend)};
  if (opt.seed) bc.seed = *opt.seed;
  if (opt.draws) {
    if (*opt.draws < 1) throw ConfigError("--draws must be at least 1 for bench");
    bc.reps = static_cast<int>(*opt.draws);
  }
  const auto cells = run_bench(bc, [](const BenchCell& c) {
    std::cerr << "n=" << c.n << " n_q=" << c.n_q << " p=" << c.p << " " << backend_name(c.backend)
              << " " << c.ms_per_iter << " ms\n";
  });
  if (opt.out.empty()) {
    write_bench_csv(std::cout, cells, bc);
    return kOk;
  }
  const fs::path out = opt.out;
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream os(out);
  if (!os) throw IoError("cannot open '" + out.string() + "' for writing");
  write_bench_csv(os, cells, bc);
  fs::path rel = out;
  rel.replace_filename(out.stem().string() + "_relative.csv");
  std::ofstream rs(rel);
  if (!rs) throw IoError("cannot open '" + rel.string() + "' for writing");
  write_relative_csv(rs, cells);
  std::cout << cells.size() << " cells -> " << out.string() << ", " << rel.string() << "\n";
  return kOk;
}

int cmd_compare(const Options& opt) {
  if (opt.archives.size() != 2) throw ConfigError("compare needs exactly two archives");
  const DrawArchive a = load_archive(opt.archives[0]);
  const DrawArchive b = load_archive(opt.archives[1]);
  if (a.T != b.T || a.n != b.n || a.draws.size() != b.draws.size())
    throw IoError("shape mismatch: " + std::to_string(a.draws.size()) + " draws of " +
                  std::to_string(a.T) + "x" + std::to_string(a.n) + " vs " +
                  std::to_string(b.draws.size()) + " draws of " + std::to_string(b.T) + "x" +
                  std::to_string(b.n));
  double worst = 0.0;
  std::size_t wd = 0;
  Index wr = 0;
  Index wc = 0;
  for (std::size_t d = 0; d < a.draws.size(); ++d) {
    for (Index j = 0; j < a.n; ++j) {
      for (Index i = 0; i < a.T; ++i) {
        const double x = a.draws[d](i, j);
        const double y = b.draws[d](i, j);
        double diff = 0.0;
        if (std::isnan(x) != std::isnan(y))
          diff = INFINITY;
        else if (!std::isnan(x))
          diff = std::abs(x - y) / std::max({1.0, std::abs(x), std::abs(y)});
        if (diff > worst) {
          worst = diff;
          wd = d;
          wr = i;
          wc = j;
        }
      }
    }
  }
  const bool ok = worst <= opt.tol;
  std::cout << "draws=" << a.draws.size() << " T=" << a.T << " n=" << a.n << " max_rel_diff=" << worst;
  if (worst > 0.0)
    std::cout << " at draw=" << wd << " row=" << wr << " col=" << wc << " (" << a.draws[wd](wr, wc)
              << " vs " << b.draws[wd](wr, wc) << ")";
  std::cout << " tol=" << opt.tol << " " << (ok ? "OK" : "FAIL") << "\n";
  return ok ? kOk : kTolerance;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_st("mfss"));

  CLI::App app{"Simulation smoothing for mixed-frequency VARs"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "INI configuration file");
    sub->add_option("--out", opt.out, "Output path");
    sub->add_option("--seed", opt.seed, "Master seed");
  };

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic ragged-edge data set");
  add_common(simulate);

  auto* smooth = app.add_subcommand("smooth", "Draw latent monthly series");
  add_common(smooth);
  smooth->add_option("--backend", opt.backend, "baseline, blocked, adaptive or oracle")
      ->check(CLI::IsMember({"baseline", "blocked", "adaptive", "oracle"}));
  smooth->add_option("--draws", opt.draws, "Number of draws");
  smooth->add_option("--data", opt.data, "Data CSV (overrides [smooth] data)");
  smooth->add_option("--params", opt.params, "Parameter JSON (overrides [smooth] params)");

  auto* bench = app.add_subcommand("bench", "Time the backends over a grid");
  add_common(bench);
  bench->add_option("--backend", opt.backend, "Time a single backend")
      ->check(CLI::IsMember({"baseline", "blocked", "adaptive", "oracle"}));
  bench->add_option("--draws", opt.draws, "Timed repetitions per cell");

  auto* compare = app.add_subcommand("compare", "Compare two draw archives elementwise");
  compare->add_option("archives", opt.archives, "Two archives (binary or long CSV)")->expected(2);
  compare->add_option("--tol", opt.tol, "Relative tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*simulate) return cmd_simulate(opt);
    if (*smooth) return cmd_smooth(opt);
    if (*bench) return cmd_bench(opt);
    if (*compare) return cmd_compare(opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
