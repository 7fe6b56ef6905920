#pragma once

// Markov-chain state: a triangulation of the points {-N..n+N} x {0..k},
// represented as a midpoint-indexed edge assignment (every triangulation of
// the region has the same midpoint multiset, so the assignment determines the
// triangulation). Apex tables give O(1) flips.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lattri/common.hpp"
#include "lattri/geometry.hpp"

namespace lattri {

struct Region {
  std::int32_t n = 1, k = 1, N = 0;
  std::int32_t x_lo = 0, x_hi = 1;  // -N, n+N
  std::int32_t width = 1;           // n + 2N
  PointBox box{0, 0, 1, 1};
  std::int32_t midpoint_count = 0;  // 3*width*k + width + k

  // Midpoints in doubled coordinates, column-major. Even columns (u even)
  // hold the k midpoints with odd v; odd columns hold all 2k+1 values of v.
  bool contains_mid(Midpoint m) const {
    if (!midpoint_parity_ok(m)) return false;
    return m.u >= 2 * x_lo && m.u <= 2 * x_hi && m.v >= 0 && m.v <= 2 * k;
  }

  std::int32_t mid_id(Midpoint m) const {
    if (!contains_mid(m)) throw input_error("unknown-midpoint: " + to_string(m));
    const std::int32_t j = m.u - 2 * x_lo;
    const std::int32_t base = ((j + 1) / 2) * k + (j / 2) * (2 * k + 1);
    return base + (j % 2 == 0 ? (m.v - 1) / 2 : m.v);
  }

  Midpoint mid_of_id(std::int32_t id) const {
    if (id < 0 || id >= midpoint_count)
      throw input_error("unknown-midpoint: id " + std::to_string(id));
    const std::int32_t pair = id / (3 * k + 1);
    const std::int32_t rem = id % (3 * k + 1);
    std::int32_t j, v;
    if (rem < k) {
      j = 2 * pair;
      v = 2 * rem + 1;
    } else {
      j = 2 * pair + 1;
      v = rem - k;
    }
    return {static_cast<std::int32_t>(2 * x_lo + j), v};
  }

  bool contains_point(LatticePoint p) const { return box.contains(p); }

  std::int32_t point_index(LatticePoint p) const {
    return (p.x - x_lo) * (k + 1) + p.y;
  }
  std::int32_t point_count() const { return (width + 1) * (k + 1); }
};

inline std::shared_ptr<const Region> make_region(std::int32_t n, std::int32_t k,
                                                 std::int32_t N = 0) {
  if (n < 1 || k < 1 || N < 0)
    throw input_error("degenerate region: need n,k >= 1 and N >= 0");
  Region r;
  r.n = n;
  r.k = k;
  r.N = N;
  r.x_lo = -N;
  r.x_hi = n + N;
  r.width = n + 2 * N;
  check_coord(r.x_hi);
  check_coord(-static_cast<std::int64_t>(N));
  check_coord(k);
  r.box = PointBox{r.x_lo, 0, r.x_hi, k};
  // count midpoints column by column and cross-check the closed form
  std::int64_t count = 0;
  for (std::int32_t j = 0; j <= 2 * r.width; ++j) count += (j % 2 == 0) ? k : 2 * k + 1;
  const std::int64_t formula =
      std::int64_t{3} * r.width * k + r.width + k;
  if (count != formula) throw internal_error("midpoint count mismatch");
  if (formula > (std::int64_t{1} << 30)) throw input_error("region too large");
  r.midpoint_count = static_cast<std::int32_t>(formula);
  return std::make_shared<const Region>(r);
}

// Frozen edges the dynamics may never flip.
struct ConstraintSet {
  std::shared_ptr<const Region> region;
  std::vector<Edge> edges;             // sorted by midpoint id
  std::vector<std::int32_t> mid_ids;   // aligned with edges
  std::vector<char> is_constrained;    // size midpoint_count
  std::vector<std::int32_t> free_ids;  // complement, ascending
  std::int64_t max_len = 0;

  bool constrained(std::int32_t id) const { return is_constrained[id] != 0; }
  // the constraint edge at a constrained midpoint id
  const Edge& edge_for(std::int32_t id) const {
    const auto it = std::lower_bound(mid_ids.begin(), mid_ids.end(), id);
    if (it == mid_ids.end() || *it != id)
      throw internal_error("no constraint at midpoint id " + std::to_string(id));
    return edges[static_cast<std::size_t>(it - mid_ids.begin())];
  }
};

inline std::shared_ptr<const ConstraintSet> make_constraints(
    std::shared_ptr<const Region> region, std::vector<Edge> edges = {}) {
  ConstraintSet cs;
  cs.region = std::move(region);
  const Region& r = *cs.region;
  std::vector<std::pair<std::int32_t, Edge>> tagged;
  tagged.reserve(edges.size());
  for (const Edge& e : edges) {
    if (!is_primitive(e.p, e.q))
      throw input_error("infeasible-constraints: not primitive " + to_string(e));
    if (!r.contains_point(e.p) || !r.contains_point(e.q))
      throw input_error("infeasible-constraints: outside region " + to_string(e));
    tagged.emplace_back(r.mid_id(midpoint_of(e)), e);
  }
  std::sort(tagged.begin(), tagged.end());
  for (std::size_t i = 0; i + 1 < tagged.size(); ++i)
    if (tagged[i].first == tagged[i + 1].first)
      throw input_error("infeasible-constraints: duplicate midpoint " +
                        to_string(midpoint_of(tagged[i].second)));
  for (std::size_t i = 0; i < tagged.size(); ++i)
    for (std::size_t j = i + 1; j < tagged.size(); ++j)
      if (segments_cross(tagged[i].second, tagged[j].second))
        throw input_error("infeasible-constraints: crossing pair " +
                          to_string(tagged[i].second) + " x " +
                          to_string(tagged[j].second));
  cs.is_constrained.assign(static_cast<std::size_t>(r.midpoint_count), 0);
  for (const auto& [id, e] : tagged) {
    cs.mid_ids.push_back(id);
    cs.edges.push_back(e);
    cs.is_constrained[static_cast<std::size_t>(id)] = 1;
    cs.max_len = std::max(cs.max_len, l1_length(e));
  }
  cs.free_ids.reserve(static_cast<std::size_t>(r.midpoint_count) - cs.edges.size());
  for (std::int32_t id = 0; id < r.midpoint_count; ++id)
    if (!cs.is_constrained[static_cast<std::size_t>(id)]) cs.free_ids.push_back(id);
  return std::make_shared<const ConstraintSet>(std::move(cs));
}

struct FlipMove {
  std::int32_t mid_id = -1;
  Edge old_edge, new_edge;
  std::int64_t dlen = 0;  // l1(new) - l1(old); always even

  friend bool operator==(const FlipMove&, const FlipMove&) = default;
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
  void fail(std::string msg) {
    ok = false;
    violations.push_back(std::move(msg));
  }
};

enum class ValidateMode { exhaustive, fast };

class Triangulation {
 public:
  Triangulation() = default;

  // `edges_by_mid[id]` must be the edge whose midpoint has that id; the
  // constructor checks structure (size, midpoint match, primitivity, box) and
  // builds the apex table, but does NOT check pairwise non-crossing — run
  // validate() for that (or build via triangulation_from_edges).
  Triangulation(std::shared_ptr<const ConstraintSet> constraints,
                std::vector<Edge> edges_by_mid)
      : cs_(std::move(constraints)), edges_(std::move(edges_by_mid)) {
    const Region& r = region();
    if (edges_.size() != static_cast<std::size_t>(r.midpoint_count))
      throw input_error("edge count " + std::to_string(edges_.size()) +
                        " != midpoint count " + std::to_string(r.midpoint_count));
    total_len_ = 0;
    for (std::int32_t id = 0; id < r.midpoint_count; ++id) {
      const Edge& e = edges_[static_cast<std::size_t>(id)];
      if (!(e.p < e.q)) throw input_error("invalid-edge: not canonical " + to_string(e));
      if (!is_primitive(e.p, e.q))
        throw input_error("invalid-edge: not primitive " + to_string(e));
      if (!r.contains_point(e.p) || !r.contains_point(e.q))
        throw input_error("invalid-edge: outside region " + to_string(e));
      if (midpoint_of(e) != r.mid_of_id(id))
        throw input_error("midpoint mismatch at id " + std::to_string(id) + ": " +
                          to_string(e));
      total_len_ += l1_length(e);
    }
    build_apex_table();
  }

  const Region& region() const { return *cs_->region; }
  const ConstraintSet& constraints() const { return *cs_; }
  std::shared_ptr<const ConstraintSet> constraints_ptr() const { return cs_; }

  const Edge& edge_at(std::int32_t mid_id) const {
    return edges_[static_cast<std::size_t>(mid_id)];
  }
  const std::vector<Edge>& edges_by_mid() const { return edges_; }
  std::int64_t total_length() const { return total_len_; }

  std::int64_t max_edge_length() const {
    std::int64_t m = 0;
    for (const Edge& e : edges_) m = std::max(m, l1_length(e));
    return m;
  }

  std::int32_t apex_count(std::int32_t mid_id) const {
    return apex_n_[static_cast<std::size_t>(mid_id)];
  }
  const std::array<LatticePoint, 2>& apexes(std::int32_t mid_id) const {
    return apex_[static_cast<std::size_t>(mid_id)];
  }

  // none if constrained, boundary (one apex), or the two incident triangles
  // don't form a parallelogram; otherwise the move to the opposite diagonal.
  std::optional<FlipMove> flippable(std::int32_t mid_id) const {
    const Region& r = region();
    if (mid_id < 0 || mid_id >= r.midpoint_count)
      throw input_error("unknown-midpoint: id " + std::to_string(mid_id));
    if (cs_->constrained(mid_id)) return std::nullopt;
    if (apex_n_[static_cast<std::size_t>(mid_id)] != 2) return std::nullopt;
    const Edge& e = edges_[static_cast<std::size_t>(mid_id)];
    const auto& [u, v] = apex_[static_cast<std::size_t>(mid_id)];
    if (std::int64_t{u.x} + v.x != std::int64_t{e.p.x} + e.q.x ||
        std::int64_t{u.y} + v.y != std::int64_t{e.p.y} + e.q.y)
      return std::nullopt;  // not a parallelogram
    const Edge ne = make_edge(u, v);
    return FlipMove{mid_id, e, ne, l1_length(ne) - l1_length(e)};
  }

  // Flip: replace the edge, swap the apex pair, patch the 4 quadrilateral
  // sides. Throws stale-move if `mv` is not currently applicable.
  void apply(const FlipMove& mv) {
    const auto cur = flippable(mv.mid_id);
    if (!cur || cur->old_edge != mv.old_edge || cur->new_edge != mv.new_edge)
      throw internal_error("stale-move at midpoint id " + std::to_string(mv.mid_id));
    const LatticePoint p = mv.old_edge.p, q = mv.old_edge.q;
    const auto [u, v] = apex_[static_cast<std::size_t>(mv.mid_id)];
    edges_[static_cast<std::size_t>(mv.mid_id)] = mv.new_edge;
    apex_[static_cast<std::size_t>(mv.mid_id)] = {p, q};
    replace_apex(p, u, q, v);
    replace_apex(q, u, p, v);
    replace_apex(p, v, q, u);
    replace_apex(q, v, p, u);
    total_len_ += mv.dlen;
  }

  // Canonical byte string: edges in midpoint-id order, each coordinate
  // encoded offset-binary big-endian so byte order == numeric order.
  std::string state_key() const {
    std::string key;
    key.reserve(edges_.size() * 16);
    for (const Edge& e : edges_) {
      append_coord(key, e.p.x);
      append_coord(key, e.p.y);
      append_coord(key, e.q.x);
      append_coord(key, e.q.y);
    }
    return key;
  }

  std::vector<Edge> sorted_edges() const {
    std::vector<Edge> out = edges_;
    std::sort(out.begin(), out.end());
    return out;
  }

  friend bool operator==(const Triangulation& a, const Triangulation& b) {
    return a.edges_ == b.edges_;
  }

 private:
  static void append_coord(std::string& key, std::int32_t c) {
    const std::uint32_t b = static_cast<std::uint32_t>(c + kCoordCap);
    key.push_back(static_cast<char>((b >> 24) & 0xff));
    key.push_back(static_cast<char>((b >> 16) & 0xff));
    key.push_back(static_cast<char>((b >> 8) & 0xff));
    key.push_back(static_cast<char>(b & 0xff));
  }

  bool edge_present(LatticePoint a, LatticePoint b) const {
    const Midpoint m{a.x + b.x, a.y + b.y};
    if (!region().contains_mid(m)) return false;
    const Edge e = b < a ? Edge{b, a} : Edge{a, b};
    return edges_[static_cast<std::size_t>(region().mid_id(m))] == e;
  }

  // Angular sweep at every vertex: consecutive neighbors (a,b) in ccw order
  // spanning a positive turn and joined by an edge form a face triangle;
  // register the sweep center as an apex of the opposite edge (a,b).
  void build_apex_table() {
    const Region& r = region();
    apex_.assign(edges_.size(), {});
    apex_n_.assign(edges_.size(), 0);
    apex_overflow_ = false;
    std::vector<std::vector<LatticePoint>> nb(
        static_cast<std::size_t>(r.point_count()));
    for (const Edge& e : edges_) {
      nb[static_cast<std::size_t>(r.point_index(e.p))].push_back(e.q);
      nb[static_cast<std::size_t>(r.point_index(e.q))].push_back(e.p);
    }
    for (std::int32_t x = r.x_lo; x <= r.x_hi; ++x)
      for (std::int32_t y = 0; y <= r.k; ++y) {
        const LatticePoint c{x, y};
        auto& ns = nb[static_cast<std::size_t>(r.point_index(c))];
        if (ns.size() < 2) continue;
        std::sort(ns.begin(), ns.end(), [c](LatticePoint a, LatticePoint b) {
          const auto half = [c](LatticePoint p) {
            return (p.y < c.y || (p.y == c.y && p.x < c.x)) ? 1 : 0;
          };
          const int ha = half(a), hb = half(b);
          if (ha != hb) return ha < hb;
          return orient(c, a, b) > 0;
        });
        for (std::size_t i = 0; i < ns.size(); ++i) {
          const LatticePoint a = ns[i], b = ns[(i + 1) % ns.size()];
          if (orient(c, a, b) <= 0) continue;
          if (!edge_present(a, b)) continue;
          const std::size_t id = static_cast<std::size_t>(
              r.mid_id(Midpoint{a.x + b.x, a.y + b.y}));
          if (apex_n_[id] >= 2) {
            apex_overflow_ = true;
            continue;
          }
          apex_[id][static_cast<std::size_t>(apex_n_[id]++)] = c;
        }
      }
  }

  void replace_apex(LatticePoint a, LatticePoint b, LatticePoint from,
                    LatticePoint to) {
    const Midpoint m{a.x + b.x, a.y + b.y};
    const std::size_t id = static_cast<std::size_t>(region().mid_id(m));
    auto& ap = apex_[id];
    for (std::int32_t i = 0; i < apex_n_[id]; ++i)
      if (ap[static_cast<std::size_t>(i)] == from) {
        ap[static_cast<std::size_t>(i)] = to;
        return;
      }
    throw internal_error("corrupt apex table at " + to_string(m));
  }

  friend ValidationReport validate(const Triangulation&, ValidateMode);

  std::shared_ptr<const ConstraintSet> cs_;
  std::vector<Edge> edges_;
  std::vector<std::array<LatticePoint, 2>> apex_;
  std::vector<std::uint8_t> apex_n_;
  std::int64_t total_len_ = 0;
  bool apex_overflow_ = false;
};

// Report-only structural check; never throws on bad content.
inline ValidationReport validate(const Triangulation& t,
                                 ValidateMode mode = ValidateMode::exhaustive) {
  ValidationReport rep;
  const Region& r = t.region();
  const auto& edges = t.edges_by_mid();
  if (edges.size() != static_cast<std::size_t>(r.midpoint_count)) {
    rep.fail("edge count != midpoint count");
    return rep;
  }
  std::int64_t total = 0;
  for (std::int32_t id = 0; id < r.midpoint_count; ++id) {
    const Edge& e = edges[static_cast<std::size_t>(id)];
    if (!is_primitive(e.p, e.q)) rep.fail("not primitive: " + to_string(e));
    if (!r.contains_point(e.p) || !r.contains_point(e.q))
      rep.fail("outside region: " + to_string(e));
    if (midpoint_of(e) != r.mid_of_id(id))
      rep.fail("midpoint mismatch at id " + std::to_string(id));
    total += l1_length(e);
  }
  if (total != t.total_length()) rep.fail("length cache mismatch");
  for (std::size_t i = 0; i < t.constraints().mid_ids.size(); ++i) {
    const std::int32_t id = t.constraints().mid_ids[i];
    if (edges[static_cast<std::size_t>(id)] != t.constraints().edges[i])
      rep.fail("constraint not respected at id " + std::to_string(id));
  }
  // pairwise non-crossing; fast mode prunes by x-interval overlap
  if (mode == ValidateMode::exhaustive) {
    for (std::size_t i = 0; i < edges.size(); ++i)
      for (std::size_t j = i + 1; j < edges.size(); ++j)
        if (segments_cross(edges[i], edges[j]))
          rep.fail("crossing pair: " + to_string(edges[i]) + " x " +
                   to_string(edges[j]));
  } else {
    std::vector<Edge> by_x = edges;
    std::sort(by_x.begin(), by_x.end());
    for (std::size_t i = 0; i < by_x.size(); ++i)
      for (std::size_t j = i + 1; j < by_x.size() && by_x[j].p.x <= by_x[i].q.x; ++j)
        if (segments_cross(by_x[i], by_x[j]))
          rep.fail("crossing pair: " + to_string(by_x[i]) + " x " +
                   to_string(by_x[j]));
  }
  if (t.apex_overflow_) rep.fail("apex table overflow (more than 2 incident triangles)");
  for (std::int32_t id = 0; id < r.midpoint_count; ++id) {
    const Edge& e = edges[static_cast<std::size_t>(id)];
    const bool boundary = (e.p.x == e.q.x && (e.p.x == r.x_lo || e.p.x == r.x_hi)) ||
                          (e.p.y == e.q.y && (e.p.y == 0 || e.p.y == r.k));
    const std::int32_t want = boundary ? 1 : 2;
    if (t.apex_count(id) != want)
      rep.fail("apex count " + std::to_string(t.apex_count(id)) + " != " +
               std::to_string(want) + " at " + to_string(e));
    for (std::int32_t a = 0; a < t.apex_count(id); ++a) {
      const LatticePoint ap = t.apexes(id)[static_cast<std::size_t>(a)];
      if (!r.contains_point(ap)) rep.fail("apex outside region: " + to_string(ap));
      const std::int64_t area2 = std::abs(orient(e.p, e.q, ap));
      if (area2 != 1)
        rep.fail("non-unimodular triangle (doubled area " + std::to_string(area2) +
                 ") at " + to_string(e));
    }
  }
  return rep;
}

// Build + validate; on failure fills `report` (if given) and returns nullopt,
// else throws input_error with the first violation.
inline std::optional<Triangulation> triangulation_from_edges(
    std::shared_ptr<const ConstraintSet> constraints, std::vector<Edge> edges_by_mid,
    ValidationReport* report = nullptr) {
  try {
    Triangulation t(std::move(constraints), std::move(edges_by_mid));
    ValidationReport rep = validate(t);
    if (rep.ok) return t;
    if (report) {
      *report = std::move(rep);
      return std::nullopt;
    }
    throw input_error(rep.violations.front());
  } catch (const input_error&) {
    if (!report) throw;
    report->fail("structural: invalid edge assignment");
    return std::nullopt;
  }
}

// Minimal-length edge at every free midpoint, independent per midpoint: scan
// candidates in (length, edge-order) order — the positive-slope unit diagonal
// sorts first, which is the tie-break — and take the first that crosses no
// constraint. Constraint midpoints keep their frozen edge.
inline Triangulation ground_state(std::shared_ptr<const ConstraintSet> constraints) {
  const Region& r = *constraints->region;
  const std::int64_t len_max = std::int64_t{r.width} + r.k;
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(r.midpoint_count));
  for (std::int32_t id = 0; id < r.midpoint_count; ++id) {
    if (constraints->constrained(id)) {
      edges.push_back(constraints->edge_for(id));
      continue;
    }
    const Midpoint m = r.mid_of_id(id);
    std::optional<Edge> pick;
    for (std::int64_t cap = 2; !pick && cap <= 2 * len_max; cap *= 2) {
      for (const Edge& cand : candidate_edges(m, r.box, std::min(cap, len_max))) {
        bool crosses = false;
        for (const Edge& c : constraints->edges)
          if (segments_cross(cand, c)) {
            crosses = true;
            break;
          }
        if (!crosses) {
          pick = cand;
          break;
        }
      }
    }
    if (!pick) throw internal_error("infeasible-constraints: no edge fits " + to_string(m));
    edges.push_back(*pick);
  }
  Triangulation t(std::move(constraints), std::move(edges));
  ValidationReport rep = validate(t);
  if (!rep.ok) throw internal_error("infeasible-constraints: " + rep.violations.front());
  return t;
}

// Worst-start heuristic: from the ground state, repeatedly apply the
// length-increasing flip at the smallest midpoint id until none exists.
inline Triangulation greedy_maximal_state(
    std::shared_ptr<const ConstraintSet> constraints) {
  Triangulation t = ground_state(std::move(constraints));
  for (;;) {
    bool advanced = false;
    for (const std::int32_t id : t.constraints().free_ids) {
      const auto mv = t.flippable(id);
      if (mv && mv->dlen > 0) {
        t.apply(*mv);
        advanced = true;
        break;
      }
    }
    if (!advanced) return t;
  }
}

// Greedy monotone descent: strictly length-decreasing flip at the smallest
// midpoint id while one exists; then orient remaining length-preserving flips
// (unit diagonals) to match the canonical ground state. Returns the applied
// moves; throws stuck-state if the state differs from ground when no
// admissible move remains.
inline std::vector<FlipMove> decreasing_path_to_ground(const Triangulation& start) {
  const Triangulation target = ground_state(start.constraints_ptr());
  Triangulation t = start;
  std::vector<FlipMove> moves;
  const std::size_t budget =
      static_cast<std::size_t>(t.region().midpoint_count) *
          static_cast<std::size_t>(t.total_length() - target.total_length() + 1) +
      static_cast<std::size_t>(t.region().midpoint_count) + 1;
  while (moves.size() <= budget) {
    std::optional<FlipMove> next;
    for (const std::int32_t id : t.constraints().free_ids) {
      const auto mv = t.flippable(id);
      if (mv && mv->dlen < 0) {
        next = mv;
        break;
      }
    }
    if (!next) {
      if (t == target) return moves;
      for (const std::int32_t id : t.constraints().free_ids) {
        const auto mv = t.flippable(id);
        if (mv && mv->dlen == 0 && mv->new_edge == target.edge_at(id)) {
          next = mv;
          break;
        }
      }
    }
    if (!next) throw internal_error("stuck-state: no monotone move but not at ground");
    t.apply(*next);
    moves.push_back(*next);
  }
  throw internal_error("stuck-state: monotone descent did not terminate");
}

// Number of abscissae c in [x_lo, x_hi] whose full column of k unit vertical
// edges {(c,j)-(c,j+1)} is present.
inline std::int32_t count_unit_vertical_crossings(const Triangulation& t,
                                                  std::int32_t x_lo,
                                                  std::int32_t x_hi) {
  const Region& r = t.region();
  if (x_lo < 0 || x_lo > x_hi || x_hi > r.n)
    throw input_error("bad crossing range [" + std::to_string(x_lo) + "," +
                      std::to_string(x_hi) + "]");
  std::int32_t count = 0;
  for (std::int32_t c = x_lo; c <= x_hi; ++c) {
    bool full = true;
    for (std::int32_t j = 0; j < r.k && full; ++j) {
      const Edge want = make_edge({c, j}, {c, j + 1});
      full = t.edge_at(r.mid_id(Midpoint{2 * c, 2 * j + 1})) == want;
    }
    count += full ? 1 : 0;
  }
  return count;
}

// Edges of t crossing g with length at most l1(g) + ell; g itself excluded.
inline std::vector<Edge> crossing_set(const Triangulation& t, const Edge& g,
                                      std::int64_t ell) {
  if (ell < 0) throw input_error("crossing_set: ell must be >= 0");
  const std::int64_t limit = l1_length(g) + ell;
  std::vector<Edge> out;
  for (const Edge& e : t.edges_by_mid()) {
    if (e == g) continue;
    if (l1_length(e) <= limit && segments_cross(e, g)) out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline bool in_good_ensemble(const Triangulation& t, double C) {
  if (!(C > 0)) throw input_error("good-ensemble constant must be positive");
  return static_cast<double>(t.max_edge_length()) <=
         C * std::log(static_cast<double>(t.region().n));
}

}  // namespace lattri
