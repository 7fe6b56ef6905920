#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "lattri/dynamics.hpp"
#include "lattri/exact.hpp"
#include "lattri/triangulation.hpp"

using namespace lattri;

namespace {

std::shared_ptr<const ConstraintSet> plain(std::int32_t n, std::int32_t k) {
  return make_constraints(make_region(n, k));
}

Enumeration enum_nk(std::int32_t n, std::int32_t k) {
  return enumerate_states(plain(n, k));
}

std::uint64_t binom(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 1;
  for (std::uint64_t i = 0; i < b; ++i) out = out * (a - i) / (i + 1);
  return out;
}

}  // namespace

TEST_CASE("flip search and backtracking agree state by state") {
  for (const auto& [n, k] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {3, 1}, {2, 2}}) {
    auto cs = plain(n, k);
    const Enumeration en = enumerate_states(cs);
    const auto oracle = enumerate_backtracking(cs);
    INFO("region " << n << "x" << k);
    REQUIRE(en.size() == oracle.size());
    for (std::size_t i = 0; i < oracle.size(); ++i)
      CHECK(en.keys[i] == oracle[i].state_key());
  }
}

TEST_CASE("flip search and backtracking agree under constraints") {
  auto region = make_region(3, 1);
  auto cs = make_constraints(region, {make_edge({0, 0}, {1, 1})});
  const Enumeration en = enumerate_states(cs);
  const auto oracle = enumerate_backtracking(cs);
  REQUIRE(en.size() == oracle.size());
  for (std::size_t i = 0; i < oracle.size(); ++i)
    CHECK(en.keys[i] == oracle[i].state_key());
  // constrained midpoint is frozen in every state
  const Edge tau = make_edge({0, 0}, {1, 1});
  const std::int32_t id = region->mid_id(midpoint_of(tau));
  for (const Triangulation& t : en.states) CHECK(t.edge_at(id) == tau);
  CHECK(en.size() < enum_nk(3, 1).size());
}

TEST_CASE("strip state counts are central binomials") {
  for (int n = 1; n <= 5; ++n) {
    INFO("strip " << n << "x1");
    CHECK(enum_nk(n, 1).size() == binom(2 * static_cast<std::uint64_t>(n), n));
  }
}

TEST_CASE("every enumerated state validates exhaustively") {
  const Enumeration en = enum_nk(2, 2);
  REQUIRE(en.size() == 64);
  for (const Triangulation& t : en.states) {
    const ValidationReport rep = validate(t, ValidateMode::exhaustive);
    INFO((rep.ok ? std::string{} : rep.violations.front()));
    REQUIRE(rep.ok);
  }
  CHECK(std::adjacent_find(en.keys.begin(), en.keys.end()) == en.keys.end());
}

TEST_CASE("adjacency is symmetric with inverted moves") {
  const Enumeration en = enum_nk(2, 2);
  for (std::size_t i = 0; i < en.size(); ++i)
    for (const auto& [j, mv] : en.adjacency[i]) {
      bool found = false;
      for (const auto& [back, bmv] : en.adjacency[static_cast<std::size_t>(j)])
        if (back == static_cast<std::int32_t>(i) && bmv.mid_id == mv.mid_id &&
            bmv.old_edge == mv.new_edge && bmv.new_edge == mv.old_edge &&
            bmv.dlen == -mv.dlen) {
          found = true;
          break;
        }
      REQUIRE(found);
    }
}

TEST_CASE("enumeration respects the state cap") {
  CHECK_THROWS_AS(enumerate_states(plain(2, 2), 10), cap_exceeded);
  CHECK_THROWS_AS(enumerate_backtracking(plain(2, 2), 10), cap_exceeded);
}

TEST_CASE("fully constrained region has a single state") {
  auto region = make_region(1, 1);
  const Triangulation g = ground_state(make_constraints(region));
  std::vector<Edge> all(g.edges_by_mid());
  auto cs = make_constraints(region, all);
  REQUIRE(cs->free_ids.empty());
  const Enumeration en = enumerate_states(cs);
  REQUIRE(en.size() == 1);
  auto ptr = std::make_shared<Enumeration>(en);
  const ExactModel m = build_model(ptr, 0.5);
  CHECK(m.pi == std::vector<double>{1.0});
  CHECK(m.diag == std::vector<double>{1.0});
  const Spectrum sp = spectral_gap(m);
  CHECK(sp.t_rel == 1.0);
  CHECK(exact_mixing_time(m) == 0);
}

TEST_CASE("unit square model closed forms") {
  auto en = std::make_shared<Enumeration>(enum_nk(1, 1));
  REQUIRE(en->size() == 2);
  // both diagonals have the same total length, so lambda drops out
  for (const double lambda : {1.0, 0.5, 1.5}) {
    INFO("lambda " << lambda);
    const ExactModel m = build_model(en, lambda);
    CHECK(m.pi[0] == Catch::Approx(0.5).margin(1e-15));
    CHECK(m.pi[1] == Catch::Approx(0.5).margin(1e-15));
    CHECK(m.prob(0, 1) == Catch::Approx(0.1).margin(1e-15));
    CHECK(m.prob(1, 0) == Catch::Approx(0.1).margin(1e-15));
    CHECK(m.diag[0] == Catch::Approx(0.9).margin(1e-15));
    const Spectrum sp = spectral_gap(m);
    CHECK(sp.eigenvalues.front() == Catch::Approx(0.8).margin(1e-12));
    CHECK(sp.eigenvalues.back() == Catch::Approx(1.0).margin(1e-12));
    CHECK(sp.gap == Catch::Approx(0.2).margin(1e-12));
    CHECK(sp.t_rel == Catch::Approx(5.0).margin(1e-10));
    CHECK(exact_mixing_time(m) == 4);          // (1/2)(4/5)^4 = 0.2048
    CHECK(exact_mixing_time(m, 1.0) == 0);
    const CongestionResult c = congestion(m);
    CHECK(c.congestion == Catch::Approx(5.0).margin(1e-12));
    CHECK(c.longest_path == 1);
    const LogSobolevBounds b = log_sobolev_bounds(m, sp.t_rel);
    CHECK(b.lower == Catch::Approx(10.0).margin(1e-10));
    CHECK_FALSE(b.upper.has_value());  // pi_min = 1/2 degenerates the upper bound
  }
  // ground state (positive diagonal) sorts first
  CHECK(en->states[0].state_key() ==
        ground_state(plain(1, 1)).state_key());
}

TEST_CASE("detailed balance and stationarity residuals") {
  auto sq = std::make_shared<Enumeration>(enum_nk(2, 2));
  auto strip = std::make_shared<Enumeration>(enum_nk(3, 1));
  for (const double lambda : {0.3, 0.5, 1.0, 1.5}) {
    INFO("lambda " << lambda);
    for (const auto& en : {sq, strip}) {
      const ExactModel m = build_model(en, lambda);
      CHECK(detailed_balance_residual(m) < 1e-12);
      CHECK(stationarity_residual(m) < 1e-12);
      for (std::size_t i = 0; i < m.size(); ++i) {
        double row = m.diag[i];
        CHECK(m.diag[i] >= 0.0);
        for (const auto& [j, p] : m.rows[i]) row += p;
        CHECK(row == Catch::Approx(1.0).margin(1e-12));
      }
    }
  }
}

TEST_CASE("power iteration reproduces the dense second eigenvalue") {
  for (const auto& [n, k, lambda] :
       std::vector<std::tuple<int, int, double>>{{2, 2, 0.5}, {3, 1, 1.0}, {2, 2, 1.5}}) {
    auto en = std::make_shared<Enumeration>(enum_nk(n, k));
    const ExactModel m = build_model(en, lambda);
    const Spectrum dense = spectral_gap_dense(m);
    const double l2 = power_iteration_lambda2(m);
    INFO("region " << n << "x" << k << " lambda " << lambda);
    CHECK(l2 == Catch::Approx(dense.eigenvalues[m.size() - 2]).margin(1e-8));
  }
}

TEST_CASE("mixing time is the first eps crossing and is monotone in eps") {
  auto en = std::make_shared<Enumeration>(enum_nk(3, 1));
  const ExactModel m = build_model(en, 0.5);
  const Spectrum sp = spectral_gap_dense(m);
  const std::int64_t t = exact_mixing_time(m, 0.25, 1000000000, &sp);
  REQUIRE(t > 0);
  CHECK(worst_start_tv(m, sp, t) <= 0.25);
  CHECK(worst_start_tv(m, sp, t - 1) > 0.25);
  const std::int64_t tight = exact_mixing_time(m, 0.05, 1000000000, &sp);
  const std::int64_t loose = exact_mixing_time(m, 0.5, 1000000000, &sp);
  CHECK(tight >= t);
  CHECK(loose <= t);
  CHECK(exact_mixing_time(m, 1.0) == 0);
  CHECK_THROWS_AS(exact_mixing_time(m, 1e-9, 4), cap_exceeded);
}

TEST_CASE("midpoint value graphs are trees and kappa is a path length") {
  const Enumeration en = enum_nk(2, 2);
  const std::vector<EdgeTree> trees = edge_trees(en);  // construction asserts tree-ness
  REQUIRE(trees.size() == static_cast<std::size_t>(en.constraints->region->midpoint_count));
  std::size_t multi = 0;
  for (const EdgeTree& tr : trees) {
    if (tr.nodes.size() > 1) ++multi;
    for (const Edge& a : tr.nodes) {
      CHECK(tr.kappa(a, a) == 0);
      for (const Edge& b : tr.nodes) {
        const std::int32_t d = tr.kappa(a, b);
        CHECK(d == tr.kappa(b, a));
        CHECK(d <= static_cast<std::int32_t>(tr.nodes.size()) - 1);
      }
    }
  }
  CHECK(multi > 0);
  CHECK_THROWS_AS(trees.front().node_index(make_edge({0, 0}, {7, 1})), input_error);
}

TEST_CASE("flip distance splits into per-midpoint tree distances") {
  for (const auto& [n, k] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}}) {
    const Enumeration en = enumerate_states(plain(n, k));
    const std::vector<EdgeTree> trees = edge_trees(en);
    const std::int32_t M = en.constraints->region->midpoint_count;
    const std::size_t stride = en.size() > 16 ? 7 : 1;
    for (std::size_t a = 0; a < en.size(); a += stride)
      for (std::size_t b = 0; b < en.size(); b += stride) {
        std::int32_t sum = 0;
        for (std::int32_t x = 0; x < M; ++x)
          sum += trees[static_cast<std::size_t>(x)].kappa(en.states[a].edge_at(x),
                                                          en.states[b].edge_at(x));
        CHECK(flip_distance(en, static_cast<std::int32_t>(a),
                            static_cast<std::int32_t>(b)) == sum);
      }
  }
}

TEST_CASE("canonical paths reach their target through the ground state") {
  const Enumeration en = enum_nk(2, 2);
  const std::int32_t ground_idx =
      *en.index_of(ground_state(en.constraints).state_key());
  for (std::size_t a = 0; a < en.size(); a += 5)
    for (std::size_t b = 0; b < en.size(); b += 9) {
      const std::vector<FlipMove> path = canonical_path(en.states[a], en.states[b]);
      Triangulation t = en.states[a];
      bool saw_ground = t.state_key() == en.keys[static_cast<std::size_t>(ground_idx)];
      for (const FlipMove& mv : path) {
        // per-midpoint monotonicity against the endpoints
        const std::int64_t cap =
            std::max(l1_length(en.states[a].edge_at(mv.mid_id)),
                     l1_length(en.states[b].edge_at(mv.mid_id)));
        CHECK(l1_length(mv.old_edge) <= cap);
        CHECK(l1_length(mv.new_edge) <= cap);
        t.apply(mv);
        saw_ground = saw_ground ||
                     t.state_key() == en.keys[static_cast<std::size_t>(ground_idx)];
      }
      CHECK(t == en.states[b]);
      if (a == b)
        CHECK(path.empty());
      else
        CHECK(saw_ground);
    }
}

TEST_CASE("congestion dominates the relaxation time") {
  auto en = std::make_shared<Enumeration>(enum_nk(2, 2));
  for (const double lambda : {0.5, 1.0}) {
    INFO("lambda " << lambda);
    const ExactModel m = build_model(en, lambda);
    const Spectrum sp = spectral_gap(m);
    const CongestionResult c = congestion(m);
    CHECK(c.congestion >= sp.t_rel);
    CHECK(c.congestion > 0);
    CHECK(c.longest_path > 0);
  }
}

TEST_CASE("log-Sobolev sandwich is ordered when not degenerate") {
  auto en = std::make_shared<Enumeration>(enum_nk(2, 2));
  const ExactModel m = build_model(en, 0.5);
  const Spectrum sp = spectral_gap(m);
  const LogSobolevBounds b = log_sobolev_bounds(m, sp.t_rel);
  REQUIRE(b.pi_min < 0.5);
  REQUIRE(b.upper.has_value());
  CHECK(b.lower == Catch::Approx(2.0 * sp.t_rel));
  CHECK(b.lower < *b.upper);
}

TEST_CASE("mixing time sits inside the relaxation-time sandwich") {
  for (const auto& [n, k, lambda] : std::vector<std::tuple<int, int, double>>{
           {2, 1, 0.5}, {3, 1, 0.5}, {3, 1, 1.5}, {2, 2, 1.0}}) {
    auto en = std::make_shared<Enumeration>(enumerate_states(plain(n, k)));
    const ExactModel m = build_model(en, lambda);
    const Spectrum sp = spectral_gap_dense(m);
    const double t = static_cast<double>(exact_mixing_time(m, 0.25, 1000000000, &sp));
    const double pi_min = *std::min_element(m.pi.begin(), m.pi.end());
    INFO("region " << n << "x" << k << " lambda " << lambda);
    CHECK(t <= sp.t_rel * (2.0 + std::log(1.0 / pi_min)));
    CHECK(t >= (sp.t_rel - 1.0) * std::log(2.0) - 1.0);
  }
}

TEST_CASE("long runs visit states with the stationary frequencies") {
  auto cs = plain(2, 1);
  auto en = std::make_shared<Enumeration>(enumerate_states(cs));
  REQUIRE(en->size() == 6);
  const double lambda = 0.5;
  const ExactModel m = build_model(en, lambda);
  const ChainSpec spec = make_chain_spec(cs, lambda, 20260814);
  std::vector<std::int64_t> hits(en->size(), 0);
  std::vector<Observer> obs{{50, [&](const ChainState& st) {
                               const auto idx = en->index_of(st.t.state_key());
                               REQUIRE(idx.has_value());
                               ++hits[static_cast<std::size_t>(*idx)];
                             }}};
  run(spec, ground_state(cs), 400000, obs);
  const double total = 400000.0 / 50.0;
  double tv = 0;
  for (std::size_t i = 0; i < hits.size(); ++i)
    tv += std::abs(static_cast<double>(hits[i]) / total - m.pi[i]);
  CHECK(tv / 2.0 < 0.02);
}
