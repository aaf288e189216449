#include "badgeforge/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "badgeforge/csv.hpp"
#include "badgeforge/mechanisms.hpp"
#include "badgeforge/montecarlo.hpp"
#include "badgeforge/numerics.hpp"
#include "badgeforge/tiebreak.hpp"

namespace badgeforge::cli {

namespace {

using json = nlohmann::json;
using abilities::AbilityDistribution;
using mechanisms::MechanismContext;
using mechanisms::QuantileThresholds;
using status::MarketSize;
using status::Shape;
using status::StatusFunction;

struct ParsedArgs {
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::vector<std::string> positionals;
};

ParsedArgs parse_args(const std::vector<std::string>& args) {
  ParsedArgs parsed;
  if (args.empty()) throw ConfigError("missing subcommand");
  parsed.command = args[0];
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    auto take_value = [&](const std::string& flag) -> std::string {
      const auto eq = a.find('=');
      if (eq != std::string::npos) return a.substr(eq + 1);
      if (i + 1 >= args.size()) throw ConfigError(flag + " needs a value");
      return args[++i];
    };
    if (a.rfind("--config", 0) == 0 && (a.size() == 8 || a[8] == '=')) {
      parsed.config_path = take_value("--config");
    } else if (a.rfind("--out", 0) == 0 && (a.size() == 5 || a[5] == '=')) {
      parsed.out_dir = take_value("--out");
    } else if (a.rfind("--jobs", 0) == 0 && (a.size() == 6 || a[6] == '=')) {
      parsed.jobs = std::stoi(take_value("--jobs"));
      if (parsed.jobs < 1) throw ConfigError("--jobs must be >= 1");
    } else if (a.rfind("--seed", 0) == 0 && (a.size() == 6 || a[6] == '=')) {
      parsed.seed = std::stoull(take_value("--seed"));
    } else if (a.rfind("--", 0) == 0) {
      // Dotted-path config override: --a.b.c=value or --a.b.c value.
      std::string key = a.substr(2);
      std::string value;
      const auto eq = key.find('=');
      if (eq != std::string::npos) {
        value = key.substr(eq + 1);
        key = key.substr(0, eq);
      } else {
        if (i + 1 >= args.size()) throw ConfigError("override --" + key + " needs a value");
        value = args[++i];
      }
      parsed.overrides.emplace_back(key, value);
    } else {
      parsed.positionals.push_back(a);
    }
  }
  return parsed;
}

json load_config(const ParsedArgs& args) {
  json cfg = json::object();
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) throw ConfigError("cannot open config " + args.config_path);
    try {
      in >> cfg;
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config root must be an object");
  }
  for (const auto& [path, raw] : args.overrides) {
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::exception&) {
      value = raw;  // plain string
    }
    json* node = &cfg;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) throw ConfigError("empty override path");
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      node = &(*node)[parts[i]];
      if (!node->is_object() && !node->is_null()) {
        throw ConfigError("override path " + path + " crosses a scalar");
      }
    }
    (*node)[parts.back()] = value;
  }
  if (args.seed) cfg["seeds"] = json::array({*args.seed});
  return cfg;
}

AbilityDistribution build_distribution(const json& cfg) {
  const json j = cfg.value("distribution", json{{"kind", "uniform01"}});
  const std::string kind = j.value("kind", "uniform01");
  if (kind == "uniform01") return AbilityDistribution::uniform01();
  if (kind == "power") return AbilityDistribution::power(j.at("alpha").get<double>());
  if (kind == "long-tail" || kind == "long_tail") {
    return AbilityDistribution::long_tail(j.at("H").get<double>());
  }
  if (kind == "empirical") {
    return AbilityDistribution::empirical_quantile(
        abilities::load_samples(j.at("path").get<std::string>()));
  }
  throw ConfigError("unknown distribution kind '" + kind + "'");
}

StatusFunction build_status(const json& cfg) {
  const json j = cfg.value("status", json{{"kind", "linear"}});
  const std::string kind = j.value("kind", "linear");
  if (kind == "linear") return StatusFunction::linear();
  if (kind == "concave-power" || kind == "concave_power") {
    return StatusFunction::concave_power(j.at("alpha").get<double>());
  }
  if (kind == "convex-reciprocal" || kind == "convex_reciprocal") {
    return StatusFunction::convex_reciprocal(j.at("n_ref").get<long>());
  }
  throw ConfigError("unknown status kind '" + kind + "'");
}

MarketSize build_market(const json& cfg) {
  if (!cfg.contains("n")) return MarketSize::large();
  const json& jn = cfg.at("n");
  if (jn.is_string()) {
    if (jn.get<std::string>() == "large") return MarketSize::large();
    throw ConfigError("n must be an integer or \"large\"");
  }
  return MarketSize::finite(jn.get<long>());
}

MechanismContext build_context(const json& cfg) {
  MechanismContext ctx{build_distribution(cfg), build_status(cfg), build_market(cfg),
                       cfg.value("cost_exponent", 1.0)};
  if (!(ctx.cost_exponent >= 1.0)) throw ConfigError("cost_exponent >= 1 required");
  return ctx;
}

mechanisms::Mechanism build_mechanism(const json& cfg, const MechanismContext& ctx) {
  const json j = cfg.value("mechanism", json{{"variant", "optimal"}});
  const std::string variant = j.value("variant", "optimal");
  if (variant == "optimal") return mechanisms::Mechanism::optimal(ctx);
  if (variant == "leaderboard") {
    std::optional<double> cutoff;
    if (j.contains("cutoff")) cutoff = j.at("cutoff").get<double>();
    return mechanisms::Mechanism::leaderboard(ctx, cutoff);
  }
  if (variant == "absolute") {
    if (j.contains("thetas")) {
      return mechanisms::Mechanism::absolute_from_thetas(
          ctx, mechanisms::ContributionThresholds(j.at("thetas").get<std::vector<double>>()));
    }
    if (j.contains("kappas")) {
      return mechanisms::Mechanism::absolute_from_kappas(
          ctx, QuantileThresholds(j.at("kappas").get<std::vector<double>>()));
    }
    throw ConfigError("absolute mechanism needs thetas or kappas");
  }
  if (variant == "construction") {
    const std::string name = j.value("name", "median");
    const int m = j.value("m", 4);
    QuantileThresholds kq;
    if (name == "median") {
      kq = mechanisms::construct_median();
    } else if (name == "improved-single") {
      kq = mechanisms::construct_single_improved(ctx.dist);
    } else if (name == "concave-m") {
      kq = mechanisms::construct_concave_m(ctx, m);
    } else if (name == "convex-logh") {
      kq = mechanisms::construct_convex_logH(ctx);
    } else if (name == "linear-m") {
      kq = mechanisms::construct_linear_m(ctx, m);
    } else {
      throw ConfigError("unknown construction '" + name + "'");
    }
    return mechanisms::Mechanism::absolute_from_kappas(ctx, kq);
  }
  throw ConfigError("unknown mechanism variant '" + variant + "'");
}

void write_file(const std::string& dir, const std::string& name, const std::string& body) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir + "/" + name, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + dir + "/" + name);
  out << body;
}

// Runs fn over [0, count) with up to `jobs` workers; results keep input order.
template <typename T, typename F>
std::vector<T> parallel_map(std::size_t count, int jobs, F fn) {
  std::vector<T> results(count);
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) results[i] = fn(i);
  };
  std::vector<std::thread> pool;
  const int k = std::min<int>(jobs, static_cast<int>(count));
  pool.reserve(k);
  for (int t = 0; t < k; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return results;
}

// ----------------------------------------------------------------- solve ---

int cmd_solve(const ParsedArgs& args, const json& cfg, std::ostream& out) {
  MechanismContext ctx = build_context(cfg);
  const json j = cfg.value("mechanism", json::object());
  if (j.value("variant", "absolute") != "absolute") {
    throw ConfigError("solve expects an absolute-threshold mechanism");
  }
  mechanisms::EquilibriumSolution sol;
  if (j.contains("thetas")) {
    sol = mechanisms::quantiles_from_thresholds(
        ctx, mechanisms::ContributionThresholds(j.at("thetas").get<std::vector<double>>()));
  } else if (j.contains("kappas")) {
    const QuantileThresholds kq(j.at("kappas").get<std::vector<double>>());
    sol.thetas = mechanisms::thresholds_from_quantiles(ctx, kq);
    sol.kappas = kq;
    sol.realized_levels = static_cast<int>(kq.size());
    const auto is = ctx.interim();
    for (std::size_t t = 0; t < kq.size(); ++t) {
      sol.interim_levels.push_back(is.value(kq[t]));
    }
  } else {
    throw ConfigError("solve needs mechanism.thetas or mechanism.kappas");
  }
  double contribution = 0.0;
  for (int t = 0; t < sol.realized_levels; ++t) {
    const double lo = (t + 1 < sol.realized_levels) ? sol.kappas[t + 1] : 0.0;
    contribution += (sol.kappas[t] - lo) * sol.thetas[t];
  }

  csv::Table table({"level", "kappa", "theta", "interim_status"});
  for (int t = 0; t < sol.realized_levels; ++t) {
    table.row(t + 1, sol.kappas[t], sol.thetas[t], sol.interim_levels[t]);
  }
  out << "p," << sol.realized_levels << '\n';
  out << "contribution," << csv::format(contribution) << '\n';
  out << table.render();
  write_file(args.out_dir, "solve.csv",
             "p," + std::to_string(sol.realized_levels) + "\ncontribution," +
                 csv::format(contribution) + "\n" + table.render());
  return kExitOk;
}

// --------------------------------------------------------------- compare ---

void compare_rows(const json& cfg, const std::string& key_prefix, csv::Table& table) {
  MechanismContext ctx = build_context(cfg);
  const Shape shape = ctx.stat.shape();
  const int m = cfg.value("m", 4);
  const double opt = mechanisms::optimal_contribution(ctx);

  auto add = [&](const std::string& name, double contribution, double bound) {
    const double ratio = opt / contribution;
    std::vector<std::string> row;
    if (!key_prefix.empty()) row.push_back(key_prefix);
    row.insert(row.end(), {name, csv::format(contribution), csv::format(ratio),
                           csv::format(bound), ratio <= bound + 1e-9 ? "pass" : "FAIL"});
    table.row_vector(std::move(row));
  };
  add("optimal", opt, 1.0);
  if (shape == Shape::concave || shape == Shape::linear) {
    add("median", mechanisms::absolute_contribution(ctx, mechanisms::construct_median()),
        4.0);
    add("improved-single",
        mechanisms::absolute_contribution(ctx, mechanisms::construct_single_improved(ctx.dist)),
        shape == Shape::linear ? 2.0 : 3.0);
    if (m >= 3) {
      add("concave-" + std::to_string(m),
          mechanisms::absolute_contribution(ctx, mechanisms::construct_concave_m(ctx, m)),
          static_cast<double>(m) / (m - 2));
    }
  }
  if (shape == Shape::linear) {
    add("linear-" + std::to_string(m),
        mechanisms::absolute_contribution(ctx, mechanisms::construct_linear_m(ctx, m)),
        (m + 2.0) / m);
  }
  if (shape == Shape::convex) {
    add("convex-logH",
        mechanisms::absolute_contribution(ctx, mechanisms::construct_convex_logH(ctx)), 4.0);
    add("leaderboard", mechanisms::leaderboard_contribution(ctx), 2.0);
  }
}

// Values of a sweep axis: an explicit list, or from/to/steps (log-spaced on
// request).
std::vector<double> sweep_values(const json& sweep) {
  if (sweep.contains("values")) return sweep.at("values").get<std::vector<double>>();
  const double from = sweep.at("from").get<double>();
  const double to = sweep.at("to").get<double>();
  const int steps = sweep.at("steps").get<int>();
  if (steps < 2) throw ConfigError("sweep.steps must be >= 2");
  const bool log = sweep.value("log", false);
  if (log && !(from > 0.0 && to > 0.0)) {
    throw ConfigError("log sweep needs positive endpoints");
  }
  std::vector<double> values;
  for (int i = 0; i < steps; ++i) {
    const double f = static_cast<double>(i) / (steps - 1);
    values.push_back(log ? from * std::pow(to / from, f) : from + (to - from) * f);
  }
  return values;
}

json apply_sweep_value(json cfg, const std::string& path, double value) {
  static const std::vector<std::string> known{"distribution", "status", "mechanism",
                                              "n", "beta", "cost_exponent", "m"};
  const std::string head = path.substr(0, path.find('.'));
  if (std::find(known.begin(), known.end(), head) == known.end()) {
    throw ConfigError("sweep parameter '" + path + "' is not a declared field");
  }
  json* node = &cfg;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
  (*node)[parts.back()] = value;
  return cfg;
}

int cmd_compare(const ParsedArgs& args, const json& cfg, std::ostream& out) {
  std::string body;
  if (cfg.contains("sweep")) {
    const json& sweep = cfg.at("sweep");
    const std::string parameter = sweep.at("parameter").get<std::string>();
    const std::vector<double> values = sweep_values(sweep);
    // One table per sweep point, evaluated in parallel; input order is the
    // sort order, so --jobs never changes the bytes.
    auto tables = parallel_map<std::string>(values.size(), args.jobs, [&](std::size_t i) {
      csv::Table t({});
      compare_rows(apply_sweep_value(cfg, parameter, values[i]),
                   csv::format(values[i]), t);
      return t.render();
    });
    csv::Table header({parameter, "mechanism", "contribution", "ratio", "bound", "pass"});
    body = header.render();
    for (const auto& t : tables) body += t;
  } else {
    csv::Table table({"mechanism", "contribution", "ratio", "bound", "pass"});
    compare_rows(cfg, "", table);
    body = table.render();
  }
  out << body;
  write_file(args.out_dir, "compare.csv", body);
  return kExitOk;
}

// ------------------------------------------------------------- reproduce ---

const char* kGnuplotPreamble =
    "set datafile separator \",\"\n"
    "set key autotitle columnhead\n"
    "set term pngcairo size 900,600\n";

int cmd_reproduce(const ParsedArgs& args, const json& cfg, std::ostream& out) {
  std::string id;
  if (!args.positionals.empty()) {
    id = args.positionals[0];
  } else {
    id = cfg.value("example", "");
  }
  const int jobs = args.jobs;

  if (id == "median-4") {
    const std::vector<double> hs{1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
    auto rows = parallel_map<std::array<double, 4>>(hs.size(), jobs, [&](std::size_t i) {
      MechanismContext ctx{AbilityDistribution::long_tail(hs[i]), StatusFunction::linear(),
                           MarketSize::large()};
      const double opt = mechanisms::optimal_contribution(ctx);
      const double apx = mechanisms::absolute_contribution(ctx, mechanisms::construct_median());
      return std::array<double, 4>{hs[i], opt, apx, opt / apx};
    });
    csv::Table table({"H", "optimal", "median", "ratio"});
    for (const auto& r : rows) table.row(r[0], r[1], r[2], r[3]);
    const std::string body = table.render();
    out << body;
    write_file(args.out_dir, "median-4.csv", body);
    write_file(args.out_dir, "median-4.gp",
               std::string(kGnuplotPreamble) +
                   "set output \"median-4.png\"\nset logscale x\n"
                   "set xlabel \"H\"\nset ylabel \"approximation ratio\"\n"
                   "plot \"median-4.csv\" using 1:4 with linespoints\n");
    return kExitOk;
  }

  if (id == "single-2") {
    const std::vector<double> alphas{2, 4, 8, 16, 32, 64};
    auto rows = parallel_map<std::array<double, 4>>(alphas.size(), jobs, [&](std::size_t i) {
      MechanismContext ctx{AbilityDistribution::power(alphas[i]), StatusFunction::linear(),
                           MarketSize::large()};
      const double opt = mechanisms::optimal_contribution(ctx);
      double best = 0.0;
      const int grid = 100000;
      for (int k = 1; k < grid; ++k) {
        const double kappa = static_cast<double>(k) / grid;
        best = std::max(best, ctx.dist.revenue(kappa) * (1.0 - kappa));
      }
      return std::array<double, 4>{alphas[i], opt, best, opt / best};
    });
    csv::Table table({"alpha", "optimal", "best_single", "ratio"});
    for (const auto& r : rows) table.row(r[0], r[1], r[2], r[3]);
    const std::string body = table.render();
    out << body;
    write_file(args.out_dir, "single-2.csv", body);
    write_file(args.out_dir, "single-2.gp",
               std::string(kGnuplotPreamble) +
                   "set output \"single-2.png\"\nset logscale x 2\n"
                   "set xlabel \"alpha\"\nset ylabel \"best single-badge ratio\"\n"
                   "plot \"single-2.csv\" using 1:4 with linespoints\n");
    return kExitOk;
  }

  if (id == "convex-log") {
    std::vector<long> ns;
    for (long n = 64; n <= 4096; n *= 2) ns.push_back(n);
    auto rows = parallel_map<std::array<double, 3>>(ns.size(), jobs, [&](std::size_t i) {
      const long n = ns[i];
      MechanismContext ctx{AbilityDistribution::uniform01(),
                           StatusFunction::convex_reciprocal(n), MarketSize::finite(n)};
      const double opt = mechanisms::optimal_contribution(ctx);
      return std::array<double, 3>{static_cast<double>(n), std::log2(static_cast<double>(n)),
                                   opt};
    });
    csv::Table table({"n", "log2_n", "opt_per_user"});
    for (const auto& r : rows) table.row(static_cast<long>(r[0]), r[1], r[2]);
    const std::string body = table.render();
    out << body;
    write_file(args.out_dir, "convex-log.csv", body);
    write_file(args.out_dir, "convex-log.gp",
               std::string(kGnuplotPreamble) +
                   "set output \"convex-log.png\"\n"
                   "set xlabel \"log2 n\"\nset ylabel \"optimal per-user contribution\"\n"
                   "plot \"convex-log.csv\" using 2:3 with linespoints\n");
    return kExitOk;
  }

  if (id == "leaderboard-concave") {
    const std::vector<double> alphas{0.01, 0.02, 0.05, 0.1, 0.2, 0.5};
    auto rows = parallel_map<std::array<double, 4>>(alphas.size(), jobs, [&](std::size_t i) {
      MechanismContext ctx{AbilityDistribution::uniform01(),
                           StatusFunction::concave_power(alphas[i]), MarketSize::large()};
      const double lb = mechanisms::leaderboard_contribution(ctx);
      const double opt = mechanisms::optimal_contribution(ctx);
      return std::array<double, 4>{alphas[i], lb, opt, opt / lb};
    });
    csv::Table table({"alpha", "leaderboard", "optimal", "ratio"});
    for (const auto& r : rows) table.row(r[0], r[1], r[2], r[3]);
    const std::string body = table.render();
    out << body;
    write_file(args.out_dir, "leaderboard-concave.csv", body);
    write_file(args.out_dir, "leaderboard-concave.gp",
               std::string(kGnuplotPreamble) +
                   "set output \"leaderboard-concave.png\"\nset logscale xy\n"
                   "set xlabel \"alpha\"\nset ylabel \"optimal / leaderboard\"\n"
                   "plot \"leaderboard-concave.csv\" using 1:4 with linespoints\n");
    return kExitOk;
  }

  throw ConfigError("unknown example id '" + id + "'");
}

// -------------------------------------------------------------- simulate ---

int cmd_simulate(const ParsedArgs& args, const json& cfg, std::ostream& out) {
  MechanismContext ctx = build_context(cfg);
  if (ctx.market.is_large()) throw ConfigError("simulate requires a finite n");
  const mc::SolvedMechanism sm(build_mechanism(cfg, ctx));
  const double analytic = sm.analytic_contribution();

  std::vector<std::uint64_t> seeds;
  for (const auto& s : cfg.value("seeds", json::array({1}))) {
    seeds.push_back(s.get<std::uint64_t>());
  }
  if (seeds.empty()) throw ConfigError("simulate needs at least one seed");
  mc::SimulationParams base;
  base.n = ctx.market.n();
  base.trials = cfg.value("trials", 400L);
  base.deviation_grid = cfg.value("deviation_grid", 32);
  base.type_grid = cfg.value("type_grid", 9);
  base.regret_trials = cfg.value("regret_trials", base.trials);
  base.expost_trials = cfg.value("expost_trials", base.trials);
  base.epsilon = cfg.value("epsilon", 0.05);

  struct SeedRow {
    std::uint64_t seed;
    mc::SimulationReport rep;
    bool pass;
    bool retried;
  };
  auto accept = [&](const mc::SimulationReport& r) {
    const bool mean_ok = r.stderr_ > 0.0
                             ? std::abs(r.mean_contribution - analytic) <= 3.0 * r.stderr_
                             : std::abs(r.mean_contribution - analytic) <= 1e-12;
    const bool regret_ok = r.interim_regret_stderr > 0.0
                               ? r.interim_regret <= 3.0 * r.interim_regret_stderr
                               : r.interim_regret <= 1e-9;
    return mean_ok && regret_ok && r.vs_z <= 3.0;
  };
  auto rows = parallel_map<SeedRow>(seeds.size(), args.jobs, [&](std::size_t i) {
    mc::SimulationParams p = base;
    p.seed = seeds[i];
    mc::SimulationReport rep = mc::simulate(sm, p);
    bool pass = accept(rep);
    bool retried = false;
    if (!pass) {
      // One fresh-seed retry before declaring a statistical failure.
      p.seed = seeds[i] + 1000000007ULL;
      rep = mc::simulate(sm, p);
      pass = accept(rep);
      retried = true;
    }
    return SeedRow{seeds[i], rep, pass, retried};
  });

  csv::Table table({"seed", "n", "trials", "mean_contribution", "stderr", "analytic",
                    "interim_regret", "interim_regret_stderr", "expost_regret_freq",
                    "vs_residual", "vs_z", "retried", "pass"});
  bool all_pass = true;
  double mean_sum = 0.0;
  for (const auto& r : rows) {
    all_pass = all_pass && r.pass;
    mean_sum += r.rep.mean_contribution;
    table.row(static_cast<long>(r.seed), base.n, base.trials, r.rep.mean_contribution,
              r.rep.stderr_, analytic, r.rep.interim_regret, r.rep.interim_regret_stderr,
              r.rep.expost_regret_freq, r.rep.vs_residual, r.rep.vs_z,
              r.retried ? 1 : 0, r.pass ? "pass" : "FAIL");
  }
  table.row("aggregate", base.n, base.trials, mean_sum / rows.size(), 0.0, analytic, 0.0,
            0.0, 0.0, 0.0, 0.0, 0, all_pass ? "pass" : "FAIL");
  const std::string body = table.render();
  out << body;
  write_file(args.out_dir, "simulate.csv", body);
  return all_pass ? kExitOk : kExitAcceptance;
}

// -------------------------------------------------------------- tiebreak ---

int cmd_tiebreak(const ParsedArgs& args, const json& cfg, std::ostream& out) {
  if (cfg.contains("status") && cfg.at("status").value("kind", "linear") != "linear") {
    throw ConfigError("tiebreak analysis is defined for linear status only");
  }
  const AbilityDistribution dist = build_distribution(cfg);
  const double theta_med = dist.value(0.5) / 2.0;

  csv::Table table({"beta", "median_theta", "equilibrium_roots", "median_contribution",
                    "leaderboard_contribution", "opt_structure", "opt_threshold",
                    "opt_contribution"});
  for (int i = 0; i <= 10; ++i) {
    const double beta = i / 10.0;
    const tiebreak::TieBreakModel model(beta, dist);
    const auto roots = tiebreak::single_badge_equilibria(model, theta_med);
    std::string root_list;
    for (std::size_t r = 0; r < roots.size(); ++r) {
      if (r) root_list += ';';
      root_list += csv::format(roots[r]);
    }
    const auto median = tiebreak::median_tiebreak_contribution(model);
    const double lb = tiebreak::leaderboard_tiebreak_contribution(model);
    std::string structure = "-";
    std::string threshold = "-";
    std::string opt = "-";
    if (beta == 0.0 || beta == 0.5 || beta == 1.0) {
      const auto ot = tiebreak::optimal_tiebreak(model);
      structure = tiebreak::structure_name(ot.structure);
      threshold = csv::format(ot.threshold);
      opt = csv::format(ot.contribution);
    }
    table.row_vector({csv::format(beta), csv::format(theta_med), root_list,
                      csv::format(median.contribution), csv::format(lb), structure,
                      threshold, opt});
  }
  const std::string body = table.render();
  out << body;
  write_file(args.out_dir, "tiebreak.csv", body);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const ParsedArgs parsed = parse_args(args);
    const json cfg = load_config(parsed);
    if (parsed.command == "solve") return cmd_solve(parsed, cfg, out);
    if (parsed.command == "compare") return cmd_compare(parsed, cfg, out);
    if (parsed.command == "reproduce") return cmd_reproduce(parsed, cfg, out);
    if (parsed.command == "simulate") return cmd_simulate(parsed, cfg, out);
    if (parsed.command == "tiebreak") return cmd_tiebreak(parsed, cfg, out);
    throw ConfigError("unknown subcommand '" + parsed.command + "'");
  } catch (const NotRegular& e) {
    err << "model violation: " << e.what() << '\n';
    return kExitModel;
  } catch (const ShapeMismatch& e) {
    err << "model violation: " << e.what() << '\n';
    return kExitModel;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace badgeforge::cli
