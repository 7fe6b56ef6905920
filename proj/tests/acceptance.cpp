// Acceptance gate: eleven numbered criteria, one pass/fail line each, exit
// nonzero if any fails. Tolerances, seeds and regimes are pinned here so a
// rerun is byte-for-byte comparable.

#include <gmpxx.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lattri/exact.hpp"
#include "lattri/experiments.hpp"
#include "lattri/io.hpp"

using namespace lattri;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double secs_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

std::uint64_t binom(int n, int r) {
  std::uint64_t v = 1;
  for (int i = 1; i <= r; ++i) v = v * static_cast<std::uint64_t>(n - r + i) /
                                   static_cast<std::uint64_t>(i);
  return v;
}

// Shared store of enumerations, models, spectra and mixing times: the same
// instance backs several criteria, so nothing is computed twice.
struct Registry {
  static constexpr std::pair<int, int> kRegions[] = {
      {1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1}, {6, 1}, {2, 2}, {3, 2}};
  struct Lambda {
    const char* token;
    double value;
  };
  static constexpr Lambda kLambdas[] = {
      {"3/10", 0.3}, {"1/2", 0.5}, {"1", 1.0}, {"3/2", 1.5}};

  std::map<std::pair<int, int>, std::shared_ptr<Enumeration>> enums;
  std::map<std::string, ExactModel> models;
  std::map<std::string, Spectrum> spectra;
  std::map<std::string, std::int64_t> tmix;

  static std::string key(int n, int k, const std::string& token) {
    return std::to_string(n) + "x" + std::to_string(k) + "@" + token;
  }

  std::shared_ptr<Enumeration> enumeration(int n, int k) {
    auto& slot = enums[{n, k}];
    if (!slot)
      slot = std::make_shared<Enumeration>(
          enumerate_states(make_constraints(make_region(n, k))));
    return slot;
  }

  const ExactModel& model(int n, int k, const std::string& token, double value) {
    const std::string id = key(n, k, token);
    auto it = models.find(id);
    if (it == models.end())
      it = models.emplace(id, build_model(enumeration(n, k), value)).first;
    return it->second;
  }

  const Spectrum& spectrum(int n, int k, const std::string& token, double value) {
    const std::string id = key(n, k, token);
    auto it = spectra.find(id);
    if (it == spectra.end())
      it = spectra.emplace(id, spectral_gap(model(n, k, token, value))).first;
    return it->second;
  }

  std::int64_t mixing(int n, int k, const std::string& token, double value) {
    const std::string id = key(n, k, token);
    auto it = tmix.find(id);
    if (it == tmix.end())
      it = tmix
               .emplace(id, exact_mixing_time(model(n, k, token, value), 0.25,
                                              1000000000,
                                              &spectrum(n, k, token, value)))
               .first;
    return it->second;
  }
};

// ---------------------------------------------------------------------------

Outcome crit1_enumerators(Registry& reg) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string counts;
  for (const auto& [n, k] : Registry::kRegions) {
    const auto en = reg.enumeration(n, k);
    const auto back = enumerate_backtracking(en->constraints);
    std::set<std::string> a(en->keys.begin(), en->keys.end());
    std::set<std::string> b;
    for (const Triangulation& t : back) b.insert(t.state_key());
    if (a != b || a.size() != en->size())
      return {false, "enumerator sets differ on " + std::to_string(n) + "x" +
                         std::to_string(k)};
    if (k == 1 && en->size() != binom(2 * n, n))
      return {false, std::to_string(n) + "x1 has " + std::to_string(en->size()) +
                         " states, want binom(2n,n)"};
    if (n == 1 && k == 1 && en->size() != 2) return {false, "1x1 must have 2 states"};
    counts += (counts.empty() ? "" : "/") + std::to_string(en->size());
  }
  const double dt = secs_since(t0);
  return {dt < 120.0, counts + " states in " + fmt(dt) + " s"};
}

Outcome crit2_detailed_balance(Registry& reg) {
  double worst = 0.0;
  for (const auto& [n, k] : Registry::kRegions)
    for (const auto& lam : Registry::kLambdas)
      worst = std::max(worst,
                       detailed_balance_residual(reg.model(n, k, lam.token, lam.value)));

  const mpq_class fracs[] = {mpq_class(3, 10), mpq_class(1, 2), mpq_class(1),
                             mpq_class(3, 2)};
  std::size_t exact_checked = 0;
  for (const auto& [n, k] : Registry::kRegions) {
    const auto en = reg.enumeration(n, k);
    for (const mpq_class& lam : fracs) {
      const RationalModel<mpq_class> rm = build_model_exact<mpq_class>(*en, lam);
      for (std::size_t i = 0; i < rm.size(); ++i)
        for (const auto& [j, p] : rm.rows[i]) {
          mpq_class lhs = rm.pi[i] * p - rm.pi[static_cast<std::size_t>(j)] *
                                            rm.prob(static_cast<std::int32_t>(j),
                                                    static_cast<std::int32_t>(i));
          lhs.canonicalize();
          if (lhs != 0)
            return {false, "rational residual nonzero on " + Registry::key(
                               n, k, lam.get_str())};
          ++exact_checked;
        }
    }
  }
  return {worst < 1e-12, "float residual max " + fmt(worst) + "; " +
                             std::to_string(exact_checked) +
                             " rational pairs exactly balanced"};
}

Outcome crit3_distance_decomposition(Registry& reg) {
  std::size_t pairs = 0;
  for (const auto& [n, k] : {std::pair{3, 1}, std::pair{2, 2}}) {
    const auto en = reg.enumeration(n, k);
    const auto trees = edge_trees(*en);
    const auto S = static_cast<std::int32_t>(en->size());
    const std::int32_t M = en->constraints->region->midpoint_count;
    for (std::int32_t i = 0; i < S; ++i)
      for (std::int32_t j = i + 1; j < S; ++j) {
        std::int64_t sum = 0;
        for (std::int32_t id = 0; id < M; ++id)
          sum += trees[static_cast<std::size_t>(id)].kappa(
              en->states[static_cast<std::size_t>(i)].edge_at(id),
              en->states[static_cast<std::size_t>(j)].edge_at(id));
        if (flip_distance(*en, i, j) != sum)
          return {false, "pair (" + std::to_string(i) + "," + std::to_string(j) +
                             ") of " + std::to_string(n) + "x" + std::to_string(k) +
                             " breaks the decomposition"};
        ++pairs;
      }
  }
  return {true, std::to_string(pairs) + " pairs decompose exactly"};
}

Outcome crit4_monotone_descent(Registry& reg) {
  std::size_t moves = 0;
  for (const auto& [n, k] : {std::pair{2, 2}, std::pair{4, 1}}) {
    const auto en = reg.enumeration(n, k);
    const Triangulation ground = ground_state(en->constraints);
    for (const Triangulation& s : en->states) {
      Triangulation cur = s;
      for (const FlipMove& mv : decreasing_path_to_ground(s)) {
        if (mv.dlen > 0)
          return {false, "length-increasing step on " + std::to_string(n) + "x" +
                             std::to_string(k)};
        const auto legal = cur.flippable(mv.mid_id);
        if (!legal || !(legal->new_edge == mv.new_edge))
          return {false, "unwalkable step on " + std::to_string(n) + "x" +
                             std::to_string(k)};
        cur.apply(mv);
        ++moves;
      }
      if (!(cur == ground))
        return {false, "descent misses the ground state on " + std::to_string(n) +
                           "x" + std::to_string(k)};
    }
  }
  return {true, std::to_string(moves) + " descent moves, all non-increasing"};
}

Outcome crit5_congestion(Registry& reg) {
  std::string detail;
  for (const auto& lam : {Registry::Lambda{"1/2", 0.5}, Registry::Lambda{"1", 1.0}}) {
    const ExactModel& m = reg.model(2, 2, lam.token, lam.value);
    const Spectrum& sp = reg.spectrum(2, 2, lam.token, lam.value);
    const CongestionResult cr = congestion(m);  // throws on any non-monotone step
    if (!(cr.congestion >= sp.t_rel))
      return {false, std::string("congestion ") + fmt(cr.congestion) +
                         " < t_rel " + fmt(sp.t_rel) + " at lambda=" + lam.token};
    detail += std::string(detail.empty() ? "" : "; ") + "lambda=" + lam.token +
              ": " + fmt(cr.congestion) + " >= " + fmt(sp.t_rel) +
              " (longest path " + std::to_string(cr.longest_path) + ")";
  }
  return {true, detail};
}

// ---------------------------------------------------------------------------
// the three seeded experiments, factored out so the determinism criterion can
// run them twice

struct StationarityRun {
  double tv = 0.0;
  double seconds = 0.0;
  std::string csv;
};

StationarityRun run_stationarity(Registry& reg) {
  constexpr std::uint64_t kSeed = 7, kSteps = 1000000, kThin = 100;
  const auto t0 = std::chrono::steady_clock::now();
  const auto en = reg.enumeration(3, 1);
  const ExactModel& m = reg.model(3, 1, "1/2", 0.5);

  Config cfg;
  cfg.set("region.n", "3");
  cfg.set("region.k", "1");
  cfg.set("chain.lambda", "1/2");
  cfg.set("chain.seed", std::to_string(kSeed));
  cfg.set("chain.steps", std::to_string(kSteps));
  cfg.set("chain.thin", std::to_string(kThin));

  std::vector<std::int64_t> hits(en->size(), 0);
  std::vector<Observer> obs{{kThin, [&](const ChainState& st) {
                               ++hits[static_cast<std::size_t>(
                                   *en->index_of(st.t.state_key()))];
                             }}};
  const ChainSpec spec = make_chain_spec(en->constraints, 0.5, kSeed);
  run(spec, ground_state(en->constraints), kSteps, obs);

  const double samples = static_cast<double>(kSteps / kThin);
  double tv = 0.0;
  std::ostringstream csv;
  csv << artifact_header(kSeed, cfg.hash()) << "state,count,freq,pi\n";
  for (std::size_t i = 0; i < en->size(); ++i) {
    const double freq = static_cast<double>(hits[i]) / samples;
    tv += std::abs(freq - m.pi[i]);
    csv << i << "," << hits[i] << "," << fmt_double(freq) << ","
        << fmt_double(m.pi[i]) << "\n";
  }
  return {0.5 * tv, secs_since(t0), csv.str()};
}

struct EdgeTailRun {
  std::optional<LinearFit> fit;
  double seconds = 0.0;
  std::string csv;
};

EdgeTailRun run_edge_tail(Registry&) {
  constexpr std::uint64_t kSeed = 2026;
  const auto t0 = std::chrono::steady_clock::now();
  auto cs = make_constraints(make_region(64, 3));

  Config cfg;
  cfg.set("region.n", "64");
  cfg.set("region.k", "3");
  cfg.set("chain.lambda", "1/2");
  cfg.set("chain.seed", std::to_string(kSeed));
  cfg.set("experiment.replicas", "500");
  cfg.set("experiment.burn_in", "20480");
  cfg.set("experiment.ell_min", "4");
  cfg.set("experiment.ell_max", "16");

  ExperimentSpec spec;
  spec.chain = make_chain_spec(cs, 0.5, kSeed);
  spec.replicas = 500;
  spec.burn_in = 20480;  // 5 n^2

  std::vector<std::int64_t> ells;
  for (std::int64_t ell = 4; ell <= 16; ++ell) ells.push_back(ell);

  // empty midpoint list = every free midpoint; the fit pools all of them
  const EdgeTailResult res = edge_tail(spec, {}, ells);
  return {res.pooled_fit, secs_since(t0), edge_tail_csv(res, kSeed, cfg.hash())};
}

struct CrossingRun {
  double breach_frequency = 0.0;
  double lag1 = 0.0;
  bool under_thinned = false;
  double seconds = 0.0;
  std::string csv;
};

CrossingRun run_crossings(Registry&) {
  constexpr std::uint64_t kSeed = 10;
  const auto t0 = std::chrono::steady_clock::now();
  auto cs = make_constraints(make_region(64, 3));

  Config cfg;
  cfg.set("region.n", "64");
  cfg.set("region.k", "3");
  cfg.set("chain.lambda", "1/2");
  cfg.set("chain.seed", std::to_string(kSeed));
  cfg.set("experiment.burn_in", "20480");
  cfg.set("experiment.slab_lo", "16");
  cfg.set("experiment.slab_hi", "48");
  cfg.set("experiment.delta", "0.05");
  cfg.set("experiment.thinning", "6430");
  cfg.set("experiment.samples", "200");

  ExperimentSpec spec;
  spec.chain = make_chain_spec(cs, 0.5, kSeed);
  spec.replicas = 1;
  spec.burn_in = 20480;

  const CrossingResult res =
      crossing_experiment(spec, SlabSpec{16, 48}, 0.05, 6430, 200, 4);
  return {res.breach_frequency, res.lag1, res.under_thinned, secs_since(t0),
          crossings_csv(res, kSeed, cfg.hash())};
}

// ---------------------------------------------------------------------------

StationarityRun g_run6;
EdgeTailRun g_run9;
CrossingRun g_run10;

Outcome crit6_stationarity(Registry& reg) {
  g_run6 = run_stationarity(reg);
  const bool pass = g_run6.tv < 0.02 && g_run6.seconds < 30.0;
  return {pass, "TV " + fmt(g_run6.tv) + " over 10000 thinned samples in " +
                    fmt(g_run6.seconds) + " s"};
}

Outcome crit7_inequalities(Registry& reg) {
  double worst_ratio = 0.0;
  std::size_t checked = 0, sobolev_pairs = 0;
  for (const auto& [n, k] : Registry::kRegions)
    for (const auto& lam : Registry::kLambdas) {
      const ExactModel& m = reg.model(n, k, lam.token, lam.value);
      const Spectrum& sp = reg.spectrum(n, k, lam.token, lam.value);
      const std::int64_t tm = reg.mixing(n, k, lam.token, lam.value);
      double mu_star = 1.0;
      for (const double p : m.pi) mu_star = std::min(mu_star, p);
      const double bound = sp.t_rel * (2.0 + std::log(1.0 / mu_star));
      if (static_cast<double>(tm) > bound)
        return {false, Registry::key(n, k, lam.token) + ": tmix " +
                           std::to_string(tm) + " > bound " + fmt(bound)};
      worst_ratio = std::max(worst_ratio, static_cast<double>(tm) / bound);
      const LogSobolevBounds lsb = log_sobolev_bounds(m, sp.t_rel);
      if (lsb.upper) {
        if (!(lsb.lower < *lsb.upper))
          return {false, Registry::key(n, k, lam.token) +
                             ": log-Sobolev bounds out of order"};
        ++sobolev_pairs;
      }
      ++checked;
    }
  return {true, std::to_string(checked) + " models, worst tmix/bound " +
                    fmt(worst_ratio) + ", " + std::to_string(sobolev_pairs) +
                    " ordered log-Sobolev sandwiches"};
}

Outcome crit8_dichotomy(Registry& reg) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> xs, ys, ratio;
  std::string times;
  for (int n = 2; n <= 6; ++n) {
    const auto sub = static_cast<double>(reg.mixing(n, 1, "1/2", 0.5));
    const auto super = static_cast<double>(reg.mixing(n, 1, "3/2", 1.5));
    xs.push_back(std::log(n));
    ys.push_back(std::log(sub));
    ratio.push_back(super / sub);
    times += (times.empty() ? "" : ",") + fmt(sub) + ":" + fmt(super);
  }
  const LinearFit fit = linear_fit(xs, ys);
  for (std::size_t i = 1; i < ratio.size(); ++i)
    if (!(ratio[i] > ratio[i - 1]))
      return {false, "super/sub ratio not strictly increasing at n=" +
                         std::to_string(i + 2)};
  const double dt = secs_since(t0);
  const bool pass = fit.slope <= 2.5 && dt < 300.0;
  return {pass, "exponent " + fmt(fit.slope) + " (r2 " + fmt(fit.r2) +
                    "), ratios increasing, tmix " + times + ", " + fmt(dt) + " s"};
}

Outcome crit9_edge_tail(Registry& reg) {
  g_run9 = run_edge_tail(reg);
  if (!g_run9.fit) return {false, "no pooled fit (tail support too thin)"};
  const bool pass = g_run9.fit->slope < 0.0 && g_run9.fit->r2 > 0.9 &&
                    g_run9.seconds < 600.0;
  return {pass, "pooled slope " + fmt(g_run9.fit->slope) + ", r2 " +
                    fmt(g_run9.fit->r2) + ", " +
                    std::to_string(g_run9.fit->points) + " points in " +
                    fmt(g_run9.seconds) + " s"};
}

Outcome crit10_crossings(Registry& reg) {
  g_run10 = run_crossings(reg);
  const bool pass = g_run10.breach_frequency < 0.05 && !g_run10.under_thinned;
  return {pass, "breach frequency " + fmt(g_run10.breach_frequency) + ", lag1 " +
                    fmt(g_run10.lag1) + " in " + fmt(g_run10.seconds) + " s"};
}

Outcome crit11_determinism(Registry& reg) {
  const StationarityRun again6 = run_stationarity(reg);
  const EdgeTailRun again9 = run_edge_tail(reg);
  const CrossingRun again10 = run_crossings(reg);
  if (again6.csv != g_run6.csv) return {false, "stationarity csv differs on rerun"};
  if (again9.csv != g_run9.csv) return {false, "edge-tail csv differs on rerun"};
  if (again10.csv != g_run10.csv) return {false, "crossings csv differs on rerun"};

  std::filesystem::create_directories("acceptance_artifacts");
  atomic_write("acceptance_artifacts/stationarity.csv", g_run6.csv);
  atomic_write("acceptance_artifacts/edge_tail.csv", g_run9.csv);
  atomic_write("acceptance_artifacts/crossings.csv", g_run10.csv);
  return {true, "three experiments byte-identical on rerun"};
}

}  // namespace

int main() {
  Registry reg;
  const std::pair<const char*, Outcome (*)(Registry&)> criteria[] = {
      {"dual enumerators agree on every small region", crit1_enumerators},
      {"detailed balance holds everywhere", crit2_detailed_balance},
      {"flip distance decomposes over midpoint trees", crit3_distance_decomposition},
      {"monotone descent reaches the ground state", crit4_monotone_descent},
      {"congestion dominates the relaxation time", crit5_congestion},
      {"long-run sampler matches the stationary law", crit6_stationarity},
      {"mixing-time comparison inequalities hold", crit7_inequalities},
      {"mixing dichotomy across the weight threshold", crit8_dichotomy},
      {"edge-length exceedance decays log-linearly", crit9_edge_tail},
      {"slab crossings stay plentiful in equilibrium", crit10_crossings},
      {"seeded experiments rerun byte-identically", crit11_determinism},
  };

  int failures = 0;
  int idx = 0;
  for (const auto& [name, fn] : criteria) {
    ++idx;
    Outcome o;
    try {
      o = fn(reg);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("[%s] criterion %2d: %s (%s)\n", o.pass ? "PASS" : "FAIL", idx,
                name, o.detail.c_str());
    std::fflush(stdout);
  }
  if (failures) std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
