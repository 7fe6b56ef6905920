#pragma once

// Statistical experiments on the flip dynamics: equilibrium edge-length tails,
// good-ensemble occupancy, slab crossing counts, boundary-influence decay, and
// mixing-time scaling. Every routine is deterministic in (spec, seed): replica
// randomness comes from counter-based streams, never from global state.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lattri/common.hpp"
#include "lattri/dynamics.hpp"
#include "lattri/exact.hpp"
#include "lattri/triangulation.hpp"

namespace lattri {

// ---------------------------------------------------------------------------
// small statistics helpers

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double stderr_slope = 0.0;  // 0 when fewer than 3 points
  std::size_t points = 0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw input_error("fit inputs differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw input_error("fit needs at least 2 points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw input_error("fit needs at least 2 distinct x values");
  LinearFit f;
  f.points = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssres = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ssres += e * e;
  }
  f.r2 = syy == 0 ? 1.0 : 1.0 - ssres / syy;
  if (n > 2) f.stderr_slope = std::sqrt(ssres / static_cast<double>(n - 2) / sxx);
  return f;
}

// 95% normal-approximation half-width for a binomial frequency
inline double binomial_ci_half(double freq, std::int64_t trials) {
  if (trials <= 0) throw input_error("confidence interval needs trials >= 1");
  return 1.96 * std::sqrt(freq * (1.0 - freq) / static_cast<double>(trials));
}

// lag-1 autocorrelation; 0 by convention for constant series
inline double lag1_autocorrelation(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0;
  for (const double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0, cov = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    var += (v[i] - mean) * (v[i] - mean);
    if (i + 1 < v.size()) cov += (v[i] - mean) * (v[i + 1] - mean);
  }
  if (var == 0) return 0.0;
  return cov / var;
}

struct Quartiles {
  double q1 = 0, median = 0, q3 = 0;
};

inline Quartiles quartiles(std::vector<double> v) {
  if (v.empty()) throw input_error("quartiles need at least one value");
  std::sort(v.begin(), v.end());
  const auto at = [&v](double p) {
    const double h = p * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] + (v[lo + 1] - v[lo]) * frac;
  };
  return Quartiles{at(0.25), at(0.5), at(0.75)};
}

// ---------------------------------------------------------------------------
// experiment plumbing

struct ExperimentSpec {
  ChainSpec chain;
  std::int64_t replicas = 1;
  std::uint64_t burn_in = 0;  // steps before any measurement
  std::uint64_t window = 0;   // steps measured after burn-in
};

inline std::uint64_t default_burn_in(std::int32_t n, double multiplier = 5.0) {
  return static_cast<std::uint64_t>(multiplier * static_cast<double>(n) *
                                    static_cast<double>(n));
}

inline std::uint64_t default_window(std::int32_t n) {
  return static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n);
}

inline std::uint64_t default_thinning(const Region& r) {
  return 10 * static_cast<std::uint64_t>(r.midpoint_count);
}

struct SlabSpec {
  std::int32_t x_lo = 0;
  std::int32_t x_hi = 0;
  std::int32_t width() const { return x_hi - x_lo; }
};

inline void check_slab(const Region& r, const SlabSpec& slab, bool allow_empty = false) {
  if (slab.x_lo < 0 || slab.x_hi > r.n || slab.x_lo > slab.x_hi ||
      (!allow_empty && slab.x_lo == slab.x_hi))
    throw input_error("slab out of range: [" + std::to_string(slab.x_lo) + "," +
                      std::to_string(slab.x_hi) + "] in 0.." + std::to_string(r.n));
}

// ---------------------------------------------------------------------------
// equilibrium edge-length tails: one indicator per replica, measured at the
// end of burn-in, per (midpoint, threshold) pair

struct EdgeTailRow {
  Midpoint mid;
  std::int64_t ell = 0;
  double freq = 0.0;
  double ci_half = 0.0;
  std::int64_t replicas = 0;
};

struct EdgeTailResult {
  std::vector<std::int32_t> mid_ids;
  std::vector<std::int64_t> ells;
  std::vector<std::vector<double>> freq;  // [midpoint][ell]
  std::vector<EdgeTailRow> rows;          // flattened, midpoint-major
  std::vector<std::optional<LinearFit>> midpoint_fits;  // log freq vs ell
  std::optional<LinearFit> pooled_fit;    // pooled over all midpoints
  std::int64_t replicas = 0;
};

inline EdgeTailResult edge_tail(const ExperimentSpec& spec,
                                std::vector<std::int32_t> mid_ids,
                                std::vector<std::int64_t> ells) {
  if (spec.replicas < 1) throw input_error("zero-replica degenerate spec");
  if (ells.empty()) throw input_error("no thresholds given");
  const auto& cs = *spec.chain.constraints;
  if (mid_ids.empty()) mid_ids = cs.free_ids;
  for (const std::int32_t id : mid_ids)
    if (id < 0 || id >= cs.region->midpoint_count)
      throw input_error("unknown midpoint id " + std::to_string(id));
  std::sort(ells.begin(), ells.end());
  const Triangulation start = ground_state(spec.chain.constraints);

  EdgeTailResult out;
  out.mid_ids = mid_ids;
  out.ells = ells;
  out.replicas = spec.replicas;
  std::vector<std::vector<std::int64_t>> counts(
      mid_ids.size(), std::vector<std::int64_t>(ells.size(), 0));
  for (std::int64_t r = 0; r < spec.replicas; ++r) {
    const ChainState st = run(spec.chain, start, spec.burn_in, {}, nullptr,
                              static_cast<std::uint64_t>(r));
    for (std::size_t mi = 0; mi < mid_ids.size(); ++mi) {
      const std::int64_t len = l1_length(st.t.edge_at(mid_ids[mi]));
      for (std::size_t li = 0; li < ells.size(); ++li)
        if (len >= ells[li]) ++counts[mi][li];
    }
  }
  out.freq.assign(mid_ids.size(), std::vector<double>(ells.size(), 0.0));
  std::vector<std::int64_t> pooled(ells.size(), 0);
  for (std::size_t mi = 0; mi < mid_ids.size(); ++mi) {
    const Midpoint mid = cs.region->mid_of_id(mid_ids[mi]);
    std::vector<double> fx, fy;
    for (std::size_t li = 0; li < ells.size(); ++li) {
      const double f = static_cast<double>(counts[mi][li]) /
                       static_cast<double>(spec.replicas);
      out.freq[mi][li] = f;
      pooled[li] += counts[mi][li];
      out.rows.push_back(EdgeTailRow{mid, ells[li], f,
                                     binomial_ci_half(f, spec.replicas),
                                     spec.replicas});
      if (f > 0) {
        fx.push_back(static_cast<double>(ells[li]));
        fy.push_back(std::log(f));
      }
    }
    if (fx.size() >= 2 && fx.front() != fx.back())
      out.midpoint_fits.push_back(linear_fit(fx, fy));
    else
      out.midpoint_fits.push_back(std::nullopt);
  }
  std::vector<double> px, py;
  const double denom = static_cast<double>(spec.replicas) *
                       static_cast<double>(mid_ids.size());
  for (std::size_t li = 0; li < ells.size(); ++li) {
    const double f = static_cast<double>(pooled[li]) / denom;
    if (f > 0) {
      px.push_back(static_cast<double>(ells[li]));
      py.push_back(std::log(f));
    }
  }
  if (px.size() >= 2 && px.front() != px.back()) out.pooled_fit = linear_fit(px, py);
  return out;
}

// ---------------------------------------------------------------------------
// fraction of replicas whose whole post-burn-in window keeps every edge within
// C log n

struct OccupancyBreach {
  std::int64_t replica = 0;
  std::uint64_t step = 0;  // chain step of the first breach
  Edge edge;
};

struct OccupancyResult {
  double fraction = 0.0;
  std::int64_t replicas = 0;
  double bound = 0.0;  // C log n
  std::vector<OccupancyBreach> breaches;  // first breach per failing replica
};

inline OccupancyResult good_ensemble_occupancy(const ExperimentSpec& spec, double C) {
  if (spec.replicas < 1) throw input_error("zero-replica degenerate spec");
  if (spec.window == 0) throw input_error("occupancy needs a positive window");
  const Triangulation start = ground_state(spec.chain.constraints);
  const double bound =
      C * std::log(static_cast<double>(spec.chain.constraints->region->n));
  OccupancyResult out;
  out.replicas = spec.replicas;
  out.bound = bound;
  std::int64_t good = 0;
  for (std::int64_t r = 0; r < spec.replicas; ++r) {
    ChainState st = run(spec.chain, start, spec.burn_in, {}, nullptr,
                        static_cast<std::uint64_t>(r));
    const auto worst_edge = [&st]() {
      const auto& edges = st.t.edges_by_mid();
      std::size_t arg = 0;
      for (std::size_t i = 1; i < edges.size(); ++i)
        if (l1_length(edges[i]) > l1_length(edges[arg])) arg = i;
      return edges[arg];
    };
    bool breached = false;
    Edge we = worst_edge();
    if (static_cast<double>(l1_length(we)) > bound) {
      out.breaches.push_back({r, st.step, we});
      breached = true;
    }
    for (std::uint64_t w = 0; !breached && w < spec.window; ++w) {
      step(spec.chain, st);
      we = worst_edge();
      if (static_cast<double>(l1_length(we)) > bound) {
        out.breaches.push_back({r, st.step, we});
        breached = true;
      }
    }
    if (!breached) ++good;
  }
  out.fraction = static_cast<double>(good) / static_cast<double>(spec.replicas);
  return out;
}

// ---------------------------------------------------------------------------
// slab crossing counts from one long thinned chain

struct CrossingResult {
  SlabSpec slab;
  double delta = 0.0;
  std::vector<std::int32_t> counts;      // one per thinned sample
  std::vector<std::int64_t> histogram;   // index 0..width+1
  double breach_frequency = 0.0;         // P(count <= delta * width)
  double lag1 = 0.0;
  bool under_thinned = false;            // |lag1| >= 0.2
};

inline CrossingResult crossing_experiment(const ExperimentSpec& spec, SlabSpec slab,
                                          double delta, std::uint64_t thinning,
                                          std::int64_t samples,
                                          std::int32_t min_width = 4) {
  const Region& r = *spec.chain.constraints->region;
  check_slab(r, slab);
  if (slab.width() < min_width)
    throw input_error("slab width " + std::to_string(slab.width()) +
                      " below minimum " + std::to_string(min_width));
  if (samples < 1) throw input_error("need at least one sample");
  if (delta < 0) throw input_error("delta must be nonnegative");
  CrossingResult out;
  out.slab = slab;
  out.delta = delta;
  out.histogram.assign(static_cast<std::size_t>(slab.width()) + 2, 0);
  ChainState st = run(spec.chain, ground_state(spec.chain.constraints),
                      spec.burn_in);
  const double threshold = delta * static_cast<double>(slab.width());
  std::int64_t breaches = 0;
  for (std::int64_t s = 0; s < samples; ++s) {
    if (s > 0)
      for (std::uint64_t w = 0; w < thinning; ++w) step(spec.chain, st);
    const std::int32_t c = count_unit_vertical_crossings(st.t, slab.x_lo, slab.x_hi);
    out.counts.push_back(c);
    ++out.histogram[static_cast<std::size_t>(c)];
    if (static_cast<double>(c) <= threshold) ++breaches;
  }
  out.breach_frequency = static_cast<double>(breaches) / static_cast<double>(samples);
  std::vector<double> series(out.counts.begin(), out.counts.end());
  out.lag1 = lag1_autocorrelation(series);
  out.under_thinned = std::abs(out.lag1) >= 0.2;
  return out;
}

// ---------------------------------------------------------------------------
// boundary-influence decay across a slab: two constraint sets that differ only
// left of the slab, measured strictly right of it

enum class DecayMethod { exact, chains };

struct CorrelationDecayPoint {
  SlabSpec slab;
  double disagreement = 0.0;  // chains: P(any differing midpoint); exact: marginal TV
  double ci_half = 0.0;       // 0 for the exact method
};

struct CorrelationDecayResult {
  DecayMethod method = DecayMethod::chains;
  std::vector<CorrelationDecayPoint> points;
  std::optional<LinearFit> fit;  // disagreement vs slab width
};

namespace detail {

inline void check_boundary_pair(const ConstraintSet& a, const ConstraintSet& b,
                                const SlabSpec& slab) {
  const Region& ra = *a.region;
  const Region& rb = *b.region;
  if (ra.n != rb.n || ra.k != rb.k || ra.N != rb.N)
    throw input_error("boundary pair lives on different regions");
  check_slab(ra, slab, /*allow_empty=*/true);
  for (std::int32_t id = 0; id < ra.midpoint_count; ++id) {
    const Midpoint m = ra.mid_of_id(id);
    if (m.u >= 2 * slab.x_lo && m.u <= 2 * slab.x_hi) {
      if (a.constrained(id) || b.constrained(id))
        throw input_error("constraints touch the slab at midpoint " + to_string(m));
    } else if (m.u > 2 * slab.x_hi) {
      if (a.constrained(id) != b.constrained(id) ||
          (a.constrained(id) && !(a.edge_for(id) == b.edge_for(id))))
        throw input_error("boundary pair differs right of the slab at midpoint " +
                          to_string(m));
    }
  }
}

// state restricted to midpoints strictly right of the slab, as a sort key
inline std::string right_projection(const Triangulation& t, const SlabSpec& slab) {
  std::ostringstream os;
  const Region& r = *t.constraints().region;
  for (std::int32_t id = 0; id < r.midpoint_count; ++id)
    if (r.mid_of_id(id).u > 2 * slab.x_hi) os << to_string(t.edge_at(id)) << ";";
  return os.str();
}

// one shared-randomness step for two chains with different frozen edges: the
// pick ranges over every midpoint of the region and a chain idles when its
// pick is frozen, which keeps each marginal a (lazy) copy of its own dynamics
inline void coupled_boundary_advance(const ChainSpec& sa, const ChainSpec& sb,
                                     ChainState& a, ChainState& b) {
  const StepDraws d = draws_at(a.seed, a.stream, a.step);
  const std::int32_t M = sa.constraints->region->midpoint_count;
  const std::int32_t id =
      static_cast<std::int32_t>(uniform_index(d.pick_bits, static_cast<std::uint64_t>(M)));
  ++a.step;
  ++b.step;
  const auto move_one = [&](const ChainSpec& s, ChainState& st) {
    if (s.constraints->constrained(id)) return;
    const auto mv = st.t.flippable(id);
    if (!mv) return;
    if (heat_bath_choice(*mv, s.lambda, d.unif) == mv->new_edge) st.t.apply(*mv);
  };
  move_one(sa, a);
  move_one(sb, b);
}

}  // namespace detail

inline CorrelationDecayResult correlation_decay(
    std::shared_ptr<const ConstraintSet> bc_a,
    std::shared_ptr<const ConstraintSet> bc_b, double lambda, std::uint64_t seed,
    const std::vector<SlabSpec>& slabs, std::uint64_t burn_in, std::uint64_t window,
    std::int64_t replicas, DecayMethod method,
    std::size_t cap = kDefaultStateCap) {
  if (slabs.empty()) throw input_error("no slabs given");
  for (const SlabSpec& s : slabs) detail::check_boundary_pair(*bc_a, *bc_b, s);
  CorrelationDecayResult out;
  out.method = method;
  if (method == DecayMethod::exact) {
    const auto en_a = enumerate_states(bc_a, cap);
    const auto en_b = enumerate_states(bc_b, cap);
    const auto pa = stationary_vector(
        [&] {
          std::vector<std::int64_t> l;
          for (const auto& t : en_a.states) l.push_back(t.total_length());
          return l;
        }(),
        lambda);
    const auto pb = stationary_vector(
        [&] {
          std::vector<std::int64_t> l;
          for (const auto& t : en_b.states) l.push_back(t.total_length());
          return l;
        }(),
        lambda);
    for (const SlabSpec& slab : slabs) {
      std::map<std::string, double> mass_a, mass_b;
      for (std::size_t i = 0; i < en_a.size(); ++i)
        mass_a[detail::right_projection(en_a.states[i], slab)] += pa[i];
      for (std::size_t i = 0; i < en_b.size(); ++i)
        mass_b[detail::right_projection(en_b.states[i], slab)] += pb[i];
      double tv = 0;
      for (const auto& [key, p] : mass_a) {
        const auto it = mass_b.find(key);
        tv += std::abs(p - (it == mass_b.end() ? 0.0 : it->second));
      }
      for (const auto& [key, p] : mass_b)
        if (mass_a.find(key) == mass_a.end()) tv += p;
      out.points.push_back({slab, tv / 2.0, 0.0});
    }
  } else {
    if (replicas < 1) throw input_error("zero-replica degenerate spec");
    const ChainSpec sa = make_chain_spec(bc_a, lambda, seed);
    const ChainSpec sb = make_chain_spec(bc_b, lambda, seed);
    const Triangulation ga = ground_state(bc_a), gb = ground_state(bc_b);
    for (const SlabSpec& slab : slabs) {
      std::int64_t disagreed = 0;
      for (std::int64_t r = 0; r < replicas; ++r) {
        ChainState a{ga, 0, seed, static_cast<std::uint64_t>(r)};
        ChainState b{gb, 0, seed, static_cast<std::uint64_t>(r)};
        for (std::uint64_t s = 0; s < burn_in + window; ++s)
          detail::coupled_boundary_advance(sa, sb, a, b);
        if (detail::right_projection(a.t, slab) != detail::right_projection(b.t, slab))
          ++disagreed;
      }
      const double f = static_cast<double>(disagreed) / static_cast<double>(replicas);
      out.points.push_back({slab, f, binomial_ci_half(f, replicas)});
    }
  }
  if (out.points.size() >= 2) {
    std::vector<double> wx, wy;
    for (const auto& p : out.points) {
      wx.push_back(static_cast<double>(p.slab.width()));
      wy.push_back(p.disagreement);
    }
    if (wx.front() != wx.back()) out.fit = linear_fit(wx, wy);
  }
  return out;
}

// ---------------------------------------------------------------------------
// mixing-time scaling in n at fixed k: exact spectral values under the state
// cap, coalescence of the identity coupling (worst-start pair) as the labelled
// proxy beyond it

struct ScalingRow {
  std::int32_t n = 0;
  std::int32_t k = 0;
  double lambda = 1.0;
  std::string method;  // "exact" or "coupling"
  double tmix = 0.0;
  double lo = 0.0;  // exact: tmix; coupling: lower quartile
  double hi = 0.0;
};

struct ScalingResult {
  std::vector<ScalingRow> rows;
  std::optional<LinearFit> loglog;  // log tmix vs log n
};

inline ScalingResult mixing_scaling(std::int32_t k, double lambda, std::uint64_t seed,
                                    const std::vector<std::int32_t>& sizes,
                                    const std::string& method,
                                    std::size_t cap = kDefaultStateCap,
                                    std::int64_t pairs = 50,
                                    std::uint64_t horizon = 100000000) {
  if (sizes.empty()) throw input_error("no sizes given");
  if (method != "exact" && method != "coupling")
    throw input_error("method must be exact or coupling");
  ScalingResult out;
  for (const std::int32_t n : sizes) {
    auto cs = make_constraints(make_region(n, k));
    ScalingRow row;
    row.n = n;
    row.k = k;
    row.lambda = lambda;
    row.method = method;
    if (method == "exact") {
      auto en = std::make_shared<Enumeration>(enumerate_states(cs, cap));
      const ExactModel m = build_model(en, lambda);
      row.tmix = static_cast<double>(exact_mixing_time(m));
      row.lo = row.hi = row.tmix;
    } else {
      if (pairs < 1) throw input_error("need at least one seed pair");
      const ChainSpec spec = make_chain_spec(cs, lambda, seed);
      const Triangulation a = ground_state(cs);
      const Triangulation b = greedy_maximal_state(cs);
      std::vector<double> steps;
      for (std::int64_t p = 0; p < pairs; ++p) {
        const CoupledResult res = coupled_run(spec, a, b, horizon,
                                              static_cast<std::uint64_t>(p), true);
        if (!res.coalescence_step)
          throw cap_exceeded("horizon-exceeded: coupling did not coalesce within " +
                             std::to_string(horizon) + " steps");
        steps.push_back(static_cast<double>(*res.coalescence_step));
      }
      const Quartiles q = quartiles(steps);
      row.tmix = q.median;
      row.lo = q.q1;
      row.hi = q.q3;
    }
    out.rows.push_back(row);
  }
  std::vector<double> lx, ly;
  for (const ScalingRow& row : out.rows)
    if (row.tmix > 0) {
      lx.push_back(std::log(static_cast<double>(row.n)));
      ly.push_back(std::log(row.tmix));
    }
  if (lx.size() >= 2 && lx.front() != lx.back()) out.loglog = linear_fit(lx, ly);
  return out;
}

}  // namespace lattri
