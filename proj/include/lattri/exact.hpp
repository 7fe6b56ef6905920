#pragma once

// Exhaustive small-instance machinery: the full flip graph, the reversible
// transition matrix, spectra, exact worst-start total-variation mixing time,
// per-midpoint edge trees, ground-routed canonical paths with their congestion
// ratio, and log-Sobolev sandwich bounds.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "lattri/common.hpp"
#include "lattri/dynamics.hpp"
#include "lattri/triangulation.hpp"

namespace lattri {

inline constexpr std::size_t kDefaultStateCap = 200000;

struct Enumeration {
  std::shared_ptr<const ConstraintSet> constraints;
  std::vector<Triangulation> states;  // sorted by state_key
  std::vector<std::string> keys;      // aligned with states
  // adjacency[i] = (neighbor index, move applied to states[i]), sorted by id
  std::vector<std::vector<std::pair<std::int32_t, FlipMove>>> adjacency;
  std::int32_t free_count = 0;

  std::size_t size() const { return states.size(); }
  std::optional<std::int32_t> index_of(const std::string& key) const {
    const auto it = std::lower_bound(keys.begin(), keys.end(), key);
    if (it == keys.end() || *it != key) return std::nullopt;
    return static_cast<std::int32_t>(it - keys.begin());
  }
};

// Breadth-first search over flips from the ground state. The flip graph of a
// region is connected, so this reaches everything.
inline Enumeration enumerate_states(std::shared_ptr<const ConstraintSet> constraints,
                                    std::size_t cap = kDefaultStateCap) {
  Enumeration en;
  en.constraints = constraints;
  en.free_count = static_cast<std::int32_t>(constraints->free_ids.size());

  std::vector<Triangulation> found;
  std::unordered_map<std::string, std::int32_t> index;
  std::queue<std::int32_t> todo;
  found.push_back(ground_state(constraints));
  index.emplace(found[0].state_key(), 0);
  todo.push(0);
  std::vector<std::vector<std::pair<std::int32_t, FlipMove>>> adj(1);
  while (!todo.empty()) {
    const std::int32_t i = todo.front();
    todo.pop();
    for (const std::int32_t id : constraints->free_ids) {
      const auto mv = found[static_cast<std::size_t>(i)].flippable(id);
      if (!mv) continue;
      Triangulation next = found[static_cast<std::size_t>(i)];
      next.apply(*mv);
      std::string key = next.state_key();
      auto [it, fresh] = index.try_emplace(std::move(key),
                                           static_cast<std::int32_t>(found.size()));
      if (fresh) {
        if (found.size() >= cap)
          throw cap_exceeded("cap-exceeded: more than " + std::to_string(cap) +
                             " states");
        found.push_back(std::move(next));
        adj.emplace_back();
        todo.push(it->second);
      }
      adj[static_cast<std::size_t>(i)].emplace_back(it->second, *mv);
    }
  }
  // Anclin-style sanity bound: at most 2^(free midpoints) states
  if (en.free_count < 63 &&
      found.size() > (std::size_t{1} << std::min(en.free_count, 62)))
    throw internal_error("state count exceeds 2^(free midpoints)");

  // canonical order: sort by key and remap the adjacency
  std::vector<std::int32_t> order(found.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = static_cast<std::int32_t>(i);
  std::vector<std::string> raw_keys(found.size());
  for (std::size_t i = 0; i < found.size(); ++i) raw_keys[i] = found[i].state_key();
  std::sort(order.begin(), order.end(), [&raw_keys](std::int32_t a, std::int32_t b) {
    return raw_keys[static_cast<std::size_t>(a)] < raw_keys[static_cast<std::size_t>(b)];
  });
  std::vector<std::int32_t> rank(found.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos)
    rank[static_cast<std::size_t>(order[pos])] = static_cast<std::int32_t>(pos);
  en.states.reserve(found.size());
  en.keys.reserve(found.size());
  en.adjacency.resize(found.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t src = static_cast<std::size_t>(order[pos]);
    en.states.push_back(std::move(found[src]));
    en.keys.push_back(std::move(raw_keys[src]));
    auto& out = en.adjacency[pos];
    out = std::move(adj[src]);
    for (auto& [nb, mv] : out) nb = rank[static_cast<std::size_t>(nb)];
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.second.mid_id < b.second.mid_id; });
  }
  return en;
}

// Independent oracle: assign each midpoint in id order, pruning on crossings
// with everything already placed. Any complete non-crossing assignment is a
// triangulation (maximal sets all have full midpoint coverage).
inline std::vector<Triangulation> enumerate_backtracking(
    std::shared_ptr<const ConstraintSet> constraints,
    std::size_t cap = kDefaultStateCap) {
  const Region& r = *constraints->region;
  const std::int64_t len_max = std::int64_t{r.width} + r.k;
  std::vector<std::vector<Edge>> choices(static_cast<std::size_t>(r.midpoint_count));
  for (std::int32_t id = 0; id < r.midpoint_count; ++id) {
    if (constraints->constrained(id))
      choices[static_cast<std::size_t>(id)] = {constraints->edge_for(id)};
    else
      choices[static_cast<std::size_t>(id)] =
          candidate_edges(r.mid_of_id(id), r.box, len_max);
  }
  std::vector<Triangulation> out;
  std::vector<Edge> placed;
  placed.reserve(static_cast<std::size_t>(r.midpoint_count));
  const std::function<void(std::int32_t)> descend = [&](std::int32_t id) {
    if (id == r.midpoint_count) {
      if (out.size() >= cap)
        throw cap_exceeded("cap-exceeded: more than " + std::to_string(cap) +
                           " states");
      ValidationReport rep;
      auto t = triangulation_from_edges(constraints, placed, &rep);
      if (!t) throw internal_error("backtracking produced an invalid state");
      out.push_back(std::move(*t));
      return;
    }
    for (const Edge& cand : choices[static_cast<std::size_t>(id)]) {
      bool crosses = false;
      for (const Edge& prev : placed)
        if (segments_cross(cand, prev)) {
          crosses = true;
          break;
        }
      if (crosses) continue;
      placed.push_back(cand);
      descend(id + 1);
      placed.pop_back();
    }
  };
  descend(0);
  std::sort(out.begin(), out.end(), [](const Triangulation& a, const Triangulation& b) {
    return a.state_key() < b.state_key();
  });
  return out;
}

struct ExactModel {
  std::shared_ptr<const Enumeration> enumeration;
  double lambda = 1.0;
  std::vector<std::int64_t> lengths;  // total l1 length per state
  std::vector<double> pi;             // stationary probabilities, sum 1
  // off-diagonal transition rows (sorted by column) + diagonal
  std::vector<std::vector<std::pair<std::int32_t, double>>> rows;
  std::vector<double> diag;

  std::size_t size() const { return pi.size(); }
  double prob(std::int32_t i, std::int32_t j) const {
    if (i == j) return diag[static_cast<std::size_t>(i)];
    const auto& row = rows[static_cast<std::size_t>(i)];
    const auto it = std::lower_bound(
        row.begin(), row.end(), j,
        [](const std::pair<std::int32_t, double>& e, std::int32_t v) { return e.first < v; });
    return (it != row.end() && it->first == j) ? it->second : 0.0;
  }
};

// Gibbs weights with the exponent shifted by the extremal total length, so
// lambda^length never overflows in either regime.
inline std::vector<double> stationary_vector(const std::vector<std::int64_t>& lengths,
                                             double lambda) {
  if (lengths.empty()) throw input_error("no states");
  const auto [lo, hi] = std::minmax_element(lengths.begin(), lengths.end());
  const std::int64_t shift = lambda > 1.0 ? *hi : *lo;
  const double loglam = std::log(lambda);
  std::vector<double> pi(lengths.size());
  double z = 0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    pi[i] = std::exp(static_cast<double>(lengths[i] - shift) * loglam);
    z += pi[i];
  }
  for (double& p : pi) p /= z;
  return pi;
}

inline ExactModel build_model(std::shared_ptr<const Enumeration> enumeration,
                              double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw input_error("lambda must be positive and finite");
  if (enumeration->size() == 0) throw input_error("no states");
  ExactModel m;
  m.enumeration = enumeration;
  m.lambda = lambda;
  const std::size_t S = enumeration->size();
  m.lengths.reserve(S);
  for (const Triangulation& t : enumeration->states) m.lengths.push_back(t.total_length());
  m.pi = stationary_vector(m.lengths, lambda);
  m.rows.resize(S);
  m.diag.assign(S, 0.0);
  const double invF = 1.0 / static_cast<double>(enumeration->free_count);
  for (std::size_t i = 0; i < S; ++i) {
    double off = 0;
    auto& row = m.rows[i];
    for (const auto& [j, mv] : enumeration->adjacency[i]) {
      const double p = invF * acceptance_probability(lambda, l1_length(mv.old_edge),
                                                     l1_length(mv.new_edge));
      row.emplace_back(j, p);
      off += p;
    }
    std::sort(row.begin(), row.end());
    m.diag[i] = 1.0 - off;
    if (m.diag[i] < -1e-12) throw internal_error("negative holding probability");
  }
  return m;
}

struct Spectrum {
  double gap = 0.0;
  double t_rel = 0.0;
  bool dense = false;
  std::vector<double> eigenvalues;  // ascending; only filled on the dense path
  Eigen::MatrixXd vectors;          // columns aligned with eigenvalues
};

inline Eigen::MatrixXd symmetrized_kernel(const ExactModel& m) {
  const std::size_t S = m.size();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(S),
                                            static_cast<Eigen::Index>(S));
  for (std::size_t i = 0; i < S; ++i) {
    K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = m.diag[i];
    for (const auto& [j, p] : m.rows[i])
      K(static_cast<Eigen::Index>(i), j) =
          p * std::sqrt(m.pi[i] / m.pi[static_cast<std::size_t>(j)]);
  }
  return K;
}

inline Spectrum spectral_gap_dense(const ExactModel& m) {
  Spectrum sp;
  sp.dense = true;
  const std::size_t S = m.size();
  if (S == 1) {
    sp.gap = 1.0;
    sp.t_rel = 1.0;
    sp.eigenvalues = {1.0};
    sp.vectors = Eigen::MatrixXd::Ones(1, 1);
    return sp;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetrized_kernel(m));
  if (solver.info() != Eigen::Success) throw internal_error("eigensolver failed");
  sp.eigenvalues.assign(solver.eigenvalues().data(),
                        solver.eigenvalues().data() + S);
  sp.vectors = solver.eigenvectors();
  sp.gap = 1.0 - sp.eigenvalues[S - 2];
  sp.t_rel = 1.0 / sp.gap;
  return sp;
}

// Second eigenvalue by power iteration on the half-shifted symmetric kernel
// (I+K)/2 — nonnegative spectrum, same eigenvector order — with the known top
// eigenvector sqrt(pi) deflated away. Sparse application via the arc list.
inline double power_iteration_lambda2(const ExactModel& m, double tol = 1e-10,
                                      std::size_t max_iters = 500000) {
  const std::size_t S = m.size();
  if (S == 1) return 1.0;
  std::vector<double> sqrtpi(S);
  for (std::size_t i = 0; i < S; ++i) sqrtpi[i] = std::sqrt(m.pi[i]);
  std::vector<double> x(S), y(S);
  for (std::size_t i = 0; i < S; ++i)
    x[i] = std::sin(static_cast<double>(i) * 12.9898 + 4.1414);  // fixed start
  const auto deflate = [&] {
    double dot = 0;
    for (std::size_t i = 0; i < S; ++i) dot += x[i] * sqrtpi[i];
    for (std::size_t i = 0; i < S; ++i) x[i] -= dot * sqrtpi[i];
  };
  const auto normalize = [&] {
    double nrm = 0;
    for (const double v : x) nrm += v * v;
    nrm = std::sqrt(nrm);
    if (nrm == 0) throw internal_error("power iteration collapsed");
    for (double& v : x) v /= nrm;
  };
  deflate();
  normalize();
  double prev = 0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    for (std::size_t i = 0; i < S; ++i) {
      double acc = m.diag[i] * x[i];
      for (const auto& [j, p] : m.rows[i])
        acc += p * std::sqrt(m.pi[i] / m.pi[static_cast<std::size_t>(j)]) *
               x[static_cast<std::size_t>(j)];
      y[i] = 0.5 * (x[i] + acc);
    }
    x.swap(y);
    deflate();
    double rayleigh = 0;
    for (const double v : x) rayleigh += v * v;  // ||Ax|| with unit input
    rayleigh = std::sqrt(rayleigh);
    normalize();
    if (it > 10 && std::abs(rayleigh - prev) < tol) return 2.0 * rayleigh - 1.0;
    prev = rayleigh;
  }
  return 2.0 * prev - 1.0;
}

inline constexpr std::size_t kDenseSpectrumCap = 2000;

inline Spectrum spectral_gap(const ExactModel& m) {
  if (m.size() < kDenseSpectrumCap) return spectral_gap_dense(m);
  Spectrum sp;
  sp.dense = false;
  const double l2 = power_iteration_lambda2(m);
  sp.gap = 1.0 - l2;
  sp.t_rel = 1.0 / sp.gap;
  return sp;
}

// Worst-start total variation distance at integer time t, from the dense
// eigendecomposition: p^t(i,.) - pi = sqrt(pi_j/pi_i) * sum_r lam_r^t v_ir v_jr
// over the non-top modes; modes with |lam|^t below 1e-17 can't move the sum.
inline double worst_start_tv(const ExactModel& m, const Spectrum& sp, std::int64_t t) {
  const std::size_t S = m.size();
  if (S == 1) return 0.0;
  if (t == 0) {
    double worst = 0;
    for (const double p : m.pi) worst = std::max(worst, 1.0 - p);
    return worst;
  }
  std::vector<std::size_t> modes;
  std::vector<double> powed;
  for (std::size_t r = 0; r + 1 < S; ++r) {
    const double lam = sp.eigenvalues[r];
    const double mag = std::pow(std::abs(lam), static_cast<double>(t));
    if (mag < 1e-17) continue;
    modes.push_back(r);
    powed.push_back((lam < 0 && (t & 1)) ? -mag : mag);
  }
  if (modes.empty()) return 0.0;
  Eigen::MatrixXd scaled(static_cast<Eigen::Index>(S),
                         static_cast<Eigen::Index>(modes.size()));
  Eigen::MatrixXd plain(static_cast<Eigen::Index>(S),
                        static_cast<Eigen::Index>(modes.size()));
  for (std::size_t c = 0; c < modes.size(); ++c) {
    plain.col(static_cast<Eigen::Index>(c)) =
        sp.vectors.col(static_cast<Eigen::Index>(modes[c]));
    scaled.col(static_cast<Eigen::Index>(c)) =
        plain.col(static_cast<Eigen::Index>(c)) * powed[c];
  }
  Eigen::MatrixXd B(static_cast<Eigen::Index>(S), static_cast<Eigen::Index>(S));
  B.noalias() = scaled * plain.transpose();
  double worst = 0;
  std::vector<double> sqrtpi(S);
  for (std::size_t i = 0; i < S; ++i) sqrtpi[i] = std::sqrt(m.pi[i]);
  for (std::size_t i = 0; i < S; ++i) {
    double acc = 0;
    for (std::size_t j = 0; j < S; ++j)
      acc += std::abs(B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) *
             sqrtpi[j];
    worst = std::max(worst, 0.5 * acc / sqrtpi[i]);
  }
  return worst;
}

inline constexpr std::size_t kMixingDenseCap = 4000;

// Smallest integer t with worst-start TV <= eps. Worst-start TV is monotone
// non-increasing in t, so bracket by doubling, then bisect.
inline std::int64_t exact_mixing_time(const ExactModel& m, double eps = 0.25,
                                      std::int64_t horizon = 1000000000,
                                      const Spectrum* precomputed = nullptr) {
  if (!(eps > 0.0)) throw input_error("eps must be in (0, 1]");
  if (eps >= 1.0) return 0;
  if (m.size() > kMixingDenseCap)
    throw cap_exceeded("cap-exceeded: state count too large for exact mixing time");
  Spectrum local;
  const Spectrum* sp = precomputed;
  if (!sp || !sp->dense) {
    local = spectral_gap_dense(m);
    sp = &local;
  }
  if (worst_start_tv(m, *sp, 0) <= eps) return 0;
  std::int64_t lo = 0, hi = 1;
  while (worst_start_tv(m, *sp, hi) > eps) {
    lo = hi;
    hi *= 2;
    if (hi > horizon)
      throw cap_exceeded("horizon-exceeded: mixing time beyond " +
                         std::to_string(horizon));
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (worst_start_tv(m, *sp, mid) <= eps)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

// Per-midpoint value graphs: nodes are the edges a midpoint takes across the
// enumeration; arcs are observed single-flip transitions. Each is a tree.
struct EdgeTree {
  std::int32_t mid_id = -1;
  std::vector<Edge> nodes;  // sorted
  std::vector<std::vector<std::int32_t>> adj;

  std::int32_t node_index(const Edge& e) const {
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), e);
    if (it == nodes.end() || !(*it == e))
      throw input_error("edge not in tree: " + to_string(e));
    return static_cast<std::int32_t>(it - nodes.begin());
  }

  // unique-path length between two node values
  std::int32_t kappa(const Edge& a, const Edge& b) const {
    const std::int32_t s = node_index(a), g = node_index(b);
    if (s == g) return 0;
    std::vector<std::int32_t> dist(nodes.size(), -1);
    std::queue<std::int32_t> q;
    dist[static_cast<std::size_t>(s)] = 0;
    q.push(s);
    while (!q.empty()) {
      const std::int32_t v = q.front();
      q.pop();
      if (v == g) return dist[static_cast<std::size_t>(v)];
      for (const std::int32_t w : adj[static_cast<std::size_t>(v)])
        if (dist[static_cast<std::size_t>(w)] < 0) {
          dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
          q.push(w);
        }
    }
    throw internal_error("not-a-tree: disconnected midpoint graph");
  }
};

inline std::vector<EdgeTree> edge_trees(const Enumeration& en) {
  const Region& r = *en.constraints->region;
  std::vector<EdgeTree> trees(static_cast<std::size_t>(r.midpoint_count));
  for (std::int32_t id = 0; id < r.midpoint_count; ++id) {
    auto& tr = trees[static_cast<std::size_t>(id)];
    tr.mid_id = id;
    std::vector<Edge> vals;
    for (const Triangulation& t : en.states) vals.push_back(t.edge_at(id));
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    tr.nodes = std::move(vals);
    tr.adj.resize(tr.nodes.size());
  }
  // collect observed transitions (each arc appears from both endpoints)
  for (std::size_t i = 0; i < en.size(); ++i)
    for (const auto& [j, mv] : en.adjacency[i]) {
      if (j < static_cast<std::int32_t>(i)) continue;
      auto& tr = trees[static_cast<std::size_t>(mv.mid_id)];
      const std::int32_t a = tr.node_index(mv.old_edge);
      const std::int32_t b = tr.node_index(mv.new_edge);
      auto& na = tr.adj[static_cast<std::size_t>(a)];
      if (std::find(na.begin(), na.end(), b) == na.end()) {
        na.push_back(b);
        tr.adj[static_cast<std::size_t>(b)].push_back(a);
      }
    }
  // tree check: connected with |E| = |V| - 1
  for (auto& tr : trees) {
    std::size_t arcs = 0;
    for (auto& a : tr.adj) {
      std::sort(a.begin(), a.end());
      arcs += a.size();
    }
    if (arcs != 2 * (tr.nodes.size() - 1))
      throw internal_error("not-a-tree: " + std::to_string(arcs / 2) + " arcs on " +
                           std::to_string(tr.nodes.size()) + " nodes at midpoint " +
                           std::to_string(tr.mid_id));
    if (tr.nodes.size() > 1) {
      std::vector<char> seen(tr.nodes.size(), 0);
      std::queue<std::int32_t> q;
      q.push(0);
      seen[0] = 1;
      std::size_t reached = 1;
      while (!q.empty()) {
        const std::int32_t v = q.front();
        q.pop();
        for (const std::int32_t w : tr.adj[static_cast<std::size_t>(v)])
          if (!seen[static_cast<std::size_t>(w)]) {
            seen[static_cast<std::size_t>(w)] = 1;
            ++reached;
            q.push(w);
          }
      }
      if (reached != tr.nodes.size())
        throw internal_error("not-a-tree: disconnected midpoint graph at midpoint " +
                             std::to_string(tr.mid_id));
    }
  }
  return trees;
}

// Flip-graph geodesic distance by breadth-first search.
inline std::int32_t flip_distance(const Enumeration& en, std::int32_t i, std::int32_t j) {
  if (i == j) return 0;
  std::vector<std::int32_t> dist(en.size(), -1);
  std::queue<std::int32_t> q;
  dist[static_cast<std::size_t>(i)] = 0;
  q.push(i);
  while (!q.empty()) {
    const std::int32_t v = q.front();
    q.pop();
    if (v == j) return dist[static_cast<std::size_t>(v)];
    for (const auto& [w, mv] : en.adjacency[static_cast<std::size_t>(v)])
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
        q.push(w);
      }
  }
  throw internal_error("flip graph disconnected");
}

// Canonical inter-state path: descend from the source to the ground state,
// then climb to the target (the target's descent, reversed with each move
// inverted). Every intermediate keeps |eta_x| <= max(|sigma_x|, |sigma'_x|)
// per midpoint, since each half is per-midpoint monotone.
inline std::vector<FlipMove> canonical_path(const Triangulation& from,
                                            const Triangulation& to) {
  if (from == to) return {};
  std::vector<FlipMove> path = decreasing_path_to_ground(from);
  std::vector<FlipMove> up = decreasing_path_to_ground(to);
  std::reverse(up.begin(), up.end());
  for (FlipMove& mv : up) {
    std::swap(mv.old_edge, mv.new_edge);
    mv.dlen = -mv.dlen;
  }
  path.insert(path.end(), up.begin(), up.end());
  return path;
}

struct CongestionResult {
  double congestion = 0.0;       // max loaded transition ratio
  std::int32_t longest_path = 0; // moves on the longest canonical path
};

// Congestion of the ground-routed canonical paths: for every ordered state
// pair, lay mu(a)mu(b)|path| onto each directed transition used, then take the
// max over transitions of load / (pi(eta) P(eta,eta')). Relaxation time is
// bounded by this ratio, which tests assert.
inline CongestionResult congestion(const ExactModel& m) {
  const Enumeration& en = *m.enumeration;
  const std::size_t S = en.size();
  // directed arc loads, keyed by (state, position in its adjacency row)
  std::vector<std::vector<double>> load(S);
  for (std::size_t i = 0; i < S; ++i) load[i].assign(en.adjacency[i].size(), 0.0);
  const auto arc_pos = [&en](std::int32_t v, const FlipMove& mv) -> std::size_t {
    const auto& row = en.adjacency[static_cast<std::size_t>(v)];
    for (std::size_t p = 0; p < row.size(); ++p)
      if (row[p].second.mid_id == mv.mid_id && row[p].second.new_edge == mv.new_edge)
        return p;
    throw internal_error("canonical path leaves the flip graph");
  };
  CongestionResult out;
  std::vector<std::vector<FlipMove>> descents(S);
  for (std::size_t i = 0; i < S; ++i) descents[i] = decreasing_path_to_ground(en.states[i]);
  for (std::size_t a = 0; a < S; ++a)
    for (std::size_t b = 0; b < S; ++b) {
      if (a == b) continue;
      const double weight = m.pi[a] * m.pi[b];
      const double plen = static_cast<double>(descents[a].size() + descents[b].size());
      out.longest_path = std::max(out.longest_path, static_cast<std::int32_t>(plen));
      Triangulation eta = en.states[a];
      std::int32_t at = static_cast<std::int32_t>(a);
      const auto walk = [&](const FlipMove& mv) {
        // per-midpoint monotonicity of the canonical path
        const std::int64_t cap_len =
            std::max(l1_length(en.states[a].edge_at(mv.mid_id)),
                     l1_length(en.states[b].edge_at(mv.mid_id)));
        if (l1_length(mv.new_edge) > cap_len || l1_length(mv.old_edge) > cap_len)
          throw internal_error("monotonicity-violation on canonical path");
        const std::size_t pos = arc_pos(at, mv);
        const std::int32_t nxt = en.adjacency[static_cast<std::size_t>(at)][pos].first;
        load[static_cast<std::size_t>(at)][pos] += weight * plen;
        eta.apply(mv);
        at = nxt;
      };
      for (const FlipMove& mv : descents[a]) walk(mv);
      for (auto it = descents[b].rbegin(); it != descents[b].rend(); ++it) {
        FlipMove mv = *it;
        std::swap(mv.old_edge, mv.new_edge);
        mv.dlen = -mv.dlen;
        walk(mv);
      }
      if (at != static_cast<std::int32_t>(b))
        throw internal_error("canonical path missed its target");
    }
  double worst = 0;
  for (std::size_t i = 0; i < S; ++i)
    for (std::size_t p = 0; p < en.adjacency[i].size(); ++p) {
      if (load[i][p] == 0) continue;
      const std::int32_t j = en.adjacency[i][p].first;
      const double pij = m.prob(static_cast<std::int32_t>(i), j);
      if (pij <= 0) throw internal_error("loaded transition has zero probability");
      worst = std::max(worst, load[i][p] / (m.pi[i] * pij));
    }
  out.congestion = worst;
  return out;
}

struct LogSobolevBounds {
  double lower = 0.0;               // 2 * t_rel
  std::optional<double> upper;      // t_rel * ln(1/pi_min)/(1 - 2 pi_min)
  double pi_min = 0.0;
};

inline LogSobolevBounds log_sobolev_bounds(const ExactModel& m, double t_rel) {
  LogSobolevBounds b;
  b.pi_min = *std::min_element(m.pi.begin(), m.pi.end());
  b.lower = 2.0 * t_rel;
  if (b.pi_min < 0.5)
    b.upper = t_rel * std::log(1.0 / b.pi_min) / (1.0 - 2.0 * b.pi_min);
  return b;
}

// Exact-arithmetic twin of build_model for any rational-like number type R
// (constructible from long, with +,*,/ and ==). Lengths are shifted by the
// minimum so every exponent is non-negative.
template <typename R>
struct RationalModel {
  R lambda;
  std::vector<R> pi;
  std::vector<std::vector<std::pair<std::int32_t, R>>> rows;
  std::vector<R> diag;

  std::size_t size() const { return pi.size(); }
  R prob(std::int32_t i, std::int32_t j) const {
    if (i == j) return diag[static_cast<std::size_t>(i)];
    for (const auto& [c, p] : rows[static_cast<std::size_t>(i)])
      if (c == j) return p;
    return R(0);
  }
};

template <typename R>
RationalModel<R> build_model_exact(const Enumeration& en, const R& lambda) {
  RationalModel<R> m;
  m.lambda = lambda;
  const std::size_t S = en.size();
  std::vector<std::int64_t> lengths(S);
  for (std::size_t i = 0; i < S; ++i) lengths[i] = en.states[i].total_length();
  const std::int64_t shift = *std::min_element(lengths.begin(), lengths.end());
  std::vector<R> w(S);
  R z(0);
  for (std::size_t i = 0; i < S; ++i) {
    w[i] = rational_pow(lambda, lengths[i] - shift);
    z = z + w[i];
  }
  m.pi.resize(S);
  for (std::size_t i = 0; i < S; ++i) m.pi[i] = w[i] / z;
  const R invF = R(1) / R(static_cast<long>(en.free_count));
  m.rows.resize(S);
  m.diag.assign(S, R(0));
  for (std::size_t i = 0; i < S; ++i) {
    R off(0);
    for (const auto& [j, mv] : en.adjacency[i]) {
      const R p = invF * acceptance_probability_exact(lambda, l1_length(mv.old_edge),
                                                      l1_length(mv.new_edge));
      m.rows[i].emplace_back(j, p);
      off = off + p;
    }
    m.diag[i] = R(1) - off;
  }
  return m;
}

// Largest absolute detailed-balance residual |pi_i P_ij - pi_j P_ji|.
inline double detailed_balance_residual(const ExactModel& m) {
  double worst = 0;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (const auto& [j, p] : m.rows[i]) {
      const double back = m.prob(j, static_cast<std::int32_t>(i));
      worst = std::max(worst, std::abs(m.pi[i] * p -
                                       m.pi[static_cast<std::size_t>(j)] * back));
    }
  return worst;
}

// L1 norm of pi P - pi.
inline double stationarity_residual(const ExactModel& m) {
  const std::size_t S = m.size();
  std::vector<double> out(S, 0.0);
  for (std::size_t i = 0; i < S; ++i) {
    out[i] += m.pi[i] * m.diag[i];
    for (const auto& [j, p] : m.rows[i]) out[static_cast<std::size_t>(j)] += m.pi[i] * p;
  }
  double nrm = 0;
  for (std::size_t i = 0; i < S; ++i) nrm += std::abs(out[i] - m.pi[i]);
  return nrm;
}

}  // namespace lattri
