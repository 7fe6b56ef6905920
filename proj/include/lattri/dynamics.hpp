#pragma once

// Edge-flip Glauber dynamics: pick a uniform free midpoint, test flippability,
// accept with the Gibbs ratio. Idle picks consume randomness and count as
// steps, so two chains sharing a stream stay aligned step for step.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "lattri/common.hpp"
#include "lattri/rng.hpp"
#include "lattri/triangulation.hpp"

namespace lattri {

struct ChainSpec {
  std::shared_ptr<const ConstraintSet> constraints;
  double lambda = 1.0;
  std::uint64_t seed = 0;
  bool uniformized = false;  // report time as step / |free midpoints|
};

inline ChainSpec make_chain_spec(std::shared_ptr<const ConstraintSet> constraints,
                                 double lambda, std::uint64_t seed,
                                 bool uniformized = false) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw input_error("lambda must be positive and finite");
  if (constraints->free_ids.empty())
    throw input_error("no free midpoints: nothing to sample");
  return ChainSpec{std::move(constraints), lambda, seed, uniformized};
}

// P(accept) = lambda^len_new / (lambda^len_new + lambda^len_old), evaluated as
// 1/(1 + lambda^(len_old-len_new)); exp overflow/underflow saturate to 0/1.
inline double acceptance_probability(double lambda, std::int64_t len_old,
                                     std::int64_t len_new) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw input_error("lambda must be positive and finite");
  if (len_old < 1 || len_new < 1) throw input_error("edge lengths are >= 1");
  if (len_old == len_new) return 0.5;
  const double d = static_cast<double>(len_old - len_new) * std::log(lambda);
  return 1.0 / (1.0 + std::exp(d));
}

template <typename R>
R rational_pow(R base, std::int64_t e) {
  R out(1);
  while (e > 0) {
    if (e & 1) out = out * base;
    base = base * base;
    e >>= 1;
  }
  return out;
}

// Same ratio in an exact number type (e.g. an arbitrary-precision rational):
// exponents are shifted by min(len_old, len_new) so only nonnegative powers
// appear.
template <typename R>
R acceptance_probability_exact(const R& lambda, std::int64_t len_old,
                               std::int64_t len_new) {
  const std::int64_t base = std::min(len_old, len_new);
  const R po = rational_pow(lambda, len_old - base);
  const R pn = rational_pow(lambda, len_new - base);
  return pn / (pn + po);
}

struct ChainState {
  Triangulation t;
  std::uint64_t step = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// Heat-bath selection at a flippable midpoint: the uniform draw picks the new
// edge from the two-point conditional with the candidates in canonical edge
// order. The per-edge law is exactly "flip with acceptance_probability", but
// chains sharing the draw and the candidate pair land on the same edge, which
// is what lets the identity coupling coalesce.
inline const Edge& heat_bath_choice(const FlipMove& mv, double lambda, double u) {
  const bool old_is_lo = mv.old_edge < mv.new_edge;
  const Edge& lo = old_is_lo ? mv.old_edge : mv.new_edge;
  const Edge& hi = old_is_lo ? mv.new_edge : mv.old_edge;
  const double p_lo = acceptance_probability(lambda, l1_length(hi), l1_length(lo));
  return u < p_lo ? lo : hi;
}

// One update. Returns true iff a flip was applied; the step counter advances
// either way.
inline bool step(const ChainSpec& spec, ChainState& st) {
  const StepDraws d = draws_at(st.seed, st.stream, st.step);
  ++st.step;
  const auto& free = spec.constraints->free_ids;
  const std::int32_t mid =
      free[uniform_index(d.pick_bits, static_cast<std::uint32_t>(free.size()))];
  const auto mv = st.t.flippable(mid);
  if (!mv) return false;
  if (heat_bath_choice(*mv, spec.lambda, d.unif) == mv->old_edge) return false;
  st.t.apply(*mv);
  return true;
}

// Same draws as step, but a proposal whose new edge would exceed C*ln(n) is
// rejected outright, keeping the chain inside the good ensemble. Checks the
// precondition; the batch runner below amortizes that check away.
inline bool restricted_step(const ChainSpec& spec, ChainState& st, double C) {
  if (!in_good_ensemble(st.t, C))
    throw input_error("start-outside-ensemble: an edge already exceeds the bound");
  const double bound = C * std::log(static_cast<double>(st.t.region().n));
  const StepDraws d = draws_at(st.seed, st.stream, st.step);
  ++st.step;
  const auto& free = spec.constraints->free_ids;
  const std::int32_t mid =
      free[uniform_index(d.pick_bits, static_cast<std::uint32_t>(free.size()))];
  const auto mv = st.t.flippable(mid);
  if (!mv) return false;
  if (static_cast<double>(l1_length(mv->new_edge)) > bound) return false;
  if (heat_bath_choice(*mv, spec.lambda, d.unif) == mv->old_edge) return false;
  st.t.apply(*mv);
  return true;
}

struct Observer {
  std::uint64_t every = 1;  // fire after steps divisible by `every`
  std::function<void(const ChainState&)> fn;
};

struct RunStats {
  std::uint64_t steps = 0;
  std::uint64_t accepted = 0;
  double seconds = 0.0;
  double steps_per_second = 0.0;
  double time_scale = 1.0;  // continuous time per step in uniformized mode
};

inline void check_compatible(const ChainSpec& spec, const Triangulation& start,
                             const char* what) {
  if (start.constraints_ptr() == spec.constraints) return;
  const ConstraintSet &a = *start.constraints_ptr(), &b = *spec.constraints;
  if (a.region->n == b.region->n && a.region->k == b.region->k &&
      a.region->N == b.region->N && a.edges == b.edges)
    return;
  throw input_error(std::string(what) + ": start does not match the chain's region/constraints");
}

inline ChainState run(const ChainSpec& spec, const Triangulation& start,
                      std::uint64_t horizon, const std::vector<Observer>& observers = {},
                      RunStats* stats = nullptr, std::uint64_t stream = 0) {
  check_compatible(spec, start, "incompatible-start");
  ChainState st{start, 0, spec.seed, stream};
  const auto t0 = std::chrono::steady_clock::now();
  std::uint64_t accepted = 0;
  for (std::uint64_t s = 0; s < horizon; ++s) {
    accepted += step(spec, st) ? 1 : 0;
    for (const Observer& ob : observers)
      if (ob.every != 0 && st.step % ob.every == 0) ob.fn(st);
  }
  if (stats) {
    const auto t1 = std::chrono::steady_clock::now();
    stats->steps = horizon;
    stats->accepted = accepted;
    stats->seconds = std::chrono::duration<double>(t1 - t0).count();
    stats->steps_per_second =
        stats->seconds > 0 ? static_cast<double>(horizon) / stats->seconds : 0.0;
    stats->time_scale =
        spec.uniformized ? 1.0 / static_cast<double>(spec.constraints->free_ids.size())
                         : 1.0;
  }
  return st;
}

// Entry check once, then the inductive invariant (accepted flips are length-
// bounded) keeps the trajectory inside the ensemble.
inline ChainState restricted_run(const ChainSpec& spec, const Triangulation& start,
                                 std::uint64_t horizon, double C,
                                 const std::vector<Observer>& observers = {},
                                 std::uint64_t stream = 0) {
  check_compatible(spec, start, "incompatible-start");
  if (!in_good_ensemble(start, C))
    throw input_error("start-outside-ensemble: an edge already exceeds the bound");
  const double bound = C * std::log(static_cast<double>(start.region().n));
  ChainState st{start, 0, spec.seed, stream};
  const auto& free = spec.constraints->free_ids;
  for (std::uint64_t s = 0; s < horizon; ++s) {
    const StepDraws d = draws_at(st.seed, st.stream, st.step);
    ++st.step;
    const std::int32_t mid =
        free[uniform_index(d.pick_bits, static_cast<std::uint32_t>(free.size()))];
    const auto mv = st.t.flippable(mid);
    if (mv && static_cast<double>(l1_length(mv->new_edge)) <= bound &&
        heat_bath_choice(*mv, spec.lambda, d.unif) != mv->old_edge)
      st.t.apply(*mv);
    for (const Observer& ob : observers)
      if (ob.every != 0 && st.step % ob.every == 0) ob.fn(st);
  }
  return st;
}

struct CoupledResult {
  std::optional<std::uint64_t> coalescence_step;
  ChainState a, b;
};

// Identity coupling: both chains consume the identical (midpoint, uniform)
// stream. Once the states agree they agree forever (asserted cheaply at the
// updated midpoint, and in full at the end).
inline CoupledResult coupled_run(const ChainSpec& spec, const Triangulation& start1,
                                 const Triangulation& start2, std::uint64_t horizon,
                                 std::uint64_t stream = 0,
                                 bool stop_at_coalescence = false) {
  check_compatible(spec, start1, "incompatible-starts");
  check_compatible(spec, start2, "incompatible-starts");
  CoupledResult out{std::nullopt, {start1, 0, spec.seed, stream},
                    {start2, 0, spec.seed, stream}};
  const Region& r = *spec.constraints->region;
  std::int32_t disagree = 0;
  for (std::int32_t id = 0; id < r.midpoint_count; ++id)
    disagree += out.a.t.edge_at(id) != out.b.t.edge_at(id) ? 1 : 0;
  if (disagree == 0) {
    out.coalescence_step = 0;
    if (stop_at_coalescence) return out;
  }
  const auto& free = spec.constraints->free_ids;
  for (std::uint64_t s = 0; s < horizon; ++s) {
    const StepDraws d = draws_at(spec.seed, stream, s);
    const std::int32_t mid =
        free[uniform_index(d.pick_bits, static_cast<std::uint32_t>(free.size()))];
    const bool agreed_here = out.a.t.edge_at(mid) == out.b.t.edge_at(mid);
    const auto mva = out.a.t.flippable(mid);
    const auto mvb = out.b.t.flippable(mid);
    if (mva && heat_bath_choice(*mva, spec.lambda, d.unif) != mva->old_edge)
      out.a.t.apply(*mva);
    if (mvb && heat_bath_choice(*mvb, spec.lambda, d.unif) != mvb->old_edge)
      out.b.t.apply(*mvb);
    ++out.a.step;
    ++out.b.step;
    const bool agrees_now = out.a.t.edge_at(mid) == out.b.t.edge_at(mid);
    if (out.coalescence_step && disagree == 0 && agreed_here && !agrees_now)
      throw internal_error("coupling broke agreement after coalescence");
    disagree += (agreed_here ? 0 : -1) + (agrees_now ? 0 : 1);
    if (disagree == 0 && !out.coalescence_step) {
      out.coalescence_step = out.a.step;
      if (stop_at_coalescence) return out;
    }
  }
  if (out.coalescence_step && !(out.a.t == out.b.t))
    throw internal_error("coupling broke agreement after coalescence");
  return out;
}

}  // namespace lattri
