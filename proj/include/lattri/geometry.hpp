#pragma once
// Integer-exact primitives: lattice points, primitive edges, doubled-grid
// midpoints, l1 length, and segment crossing via orientation tests.
//
// Midpoints are stored in doubled coordinates (u,v) = (p.x+q.x, p.y+q.y) so
// everything stays integral and hashable. Coordinates are capped at 2^20 so
// every cross product below fits comfortably in 64 bits.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <string>
#include <vector>

#include "lattri/common.hpp"

namespace lattri {

inline constexpr std::int64_t kCoordCap = std::int64_t{1} << 20;

struct LatticePoint {
  std::int32_t x = 0, y = 0;
  friend constexpr auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
};

struct Midpoint {
  std::int32_t u = 0, v = 0;  // doubled coordinates; never both even
  friend constexpr auto operator<=>(const Midpoint&, const Midpoint&) = default;
};

struct Edge {
  LatticePoint p, q;  // canonical order: p < q lexicographically
  friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

inline void check_coord(std::int64_t c) {
  if (c < -kCoordCap || c > kCoordCap)
    throw input_error("coordinate exceeds capacity 2^20: " + std::to_string(c));
}

inline LatticePoint make_point(std::int64_t x, std::int64_t y) {
  check_coord(x);
  check_coord(y);
  return {static_cast<std::int32_t>(x), static_cast<std::int32_t>(y)};
}

inline bool is_primitive(LatticePoint p, LatticePoint q) {
  if (p == q) throw input_error("invalid-edge: degenerate segment (p == q)");
  const std::int64_t dx = std::abs(std::int64_t{q.x} - p.x);
  const std::int64_t dy = std::abs(std::int64_t{q.y} - p.y);
  return std::gcd(dx, dy) == 1;
}

inline std::string to_string(LatticePoint p) {
  return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")";
}

inline std::string to_string(const Edge& e) {
  return to_string(e.p) + "-" + to_string(e.q);
}

inline std::string to_string(Midpoint m) {
  return "[" + std::to_string(m.u) + "/2," + std::to_string(m.v) + "/2]";
}

inline Edge make_edge(LatticePoint a, LatticePoint b) {
  check_coord(a.x);
  check_coord(a.y);
  check_coord(b.x);
  check_coord(b.y);
  if (!is_primitive(a, b))
    throw input_error("invalid-edge: not primitive: " + to_string(Edge{a, b}));
  if (b < a) std::swap(a, b);
  return {a, b};
}

inline std::int64_t l1_length(const Edge& e) {
  return std::abs(std::int64_t{e.q.x} - e.p.x) + std::abs(std::int64_t{e.q.y} - e.p.y);
}

inline Midpoint midpoint_of(const Edge& e) {
  return {e.p.x + e.q.x, e.p.y + e.q.y};
}

inline bool midpoint_parity_ok(Midpoint m) {
  return (m.u & 1) || (m.v & 1);
}

// Twice the signed area of (a,b,c).
inline std::int64_t orient(LatticePoint a, LatticePoint b, LatticePoint c) {
  return std::int64_t{b.x - a.x} * (c.y - a.y) - std::int64_t{b.y - a.y} * (c.x - a.x);
}

namespace detail {
// Pre: a, b, c collinear. True iff c strictly between a and b.
inline bool strictly_between(LatticePoint a, LatticePoint b, LatticePoint c) {
  if (c == a || c == b) return false;
  return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
}
}  // namespace detail

// True iff the segments meet at a point interior to at least one of them.
// Shared endpoints alone do not count; collinear overlap of positive length
// does. Total for arbitrary (even non-primitive) segments.
inline bool segments_cross(const Edge& e1, const Edge& e2) {
  const std::int64_t d1 = orient(e2.p, e2.q, e1.p);
  const std::int64_t d2 = orient(e2.p, e2.q, e1.q);
  const std::int64_t d3 = orient(e1.p, e1.q, e2.p);
  const std::int64_t d4 = orient(e1.p, e1.q, e2.q);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;  // transversal crossing interior to both
  if (d1 == 0 && d2 == 0 && d3 == 0 && d4 == 0) {
    // Same line: crossing iff the overlap has positive length. Lexicographic
    // order is monotone along any line, so interval tests suffice.
    const LatticePoint lo1 = std::min(e1.p, e1.q), hi1 = std::max(e1.p, e1.q);
    const LatticePoint lo2 = std::min(e2.p, e2.q), hi2 = std::max(e2.p, e2.q);
    return std::max(lo1, lo2) < std::min(hi1, hi2);
  }
  if (d1 == 0 && detail::strictly_between(e2.p, e2.q, e1.p)) return true;
  if (d2 == 0 && detail::strictly_between(e2.p, e2.q, e1.q)) return true;
  if (d3 == 0 && detail::strictly_between(e1.p, e1.q, e2.p)) return true;
  if (d4 == 0 && detail::strictly_between(e1.p, e1.q, e2.q)) return true;
  return false;
}

struct PointBox {
  std::int32_t xmin = 0, ymin = 0, xmax = 0, ymax = 0;
  bool contains(LatticePoint p) const {
    return xmin <= p.x && p.x <= xmax && ymin <= p.y && p.y <= ymax;
  }
};

// All primitive edges with midpoint m, endpoints inside box, l1 length at
// most max_len; sorted by (length, canonical endpoint order). The difference
// vector (a,b) must match the parity of (u,v) for the endpoints to be
// integral, and (a,b) is restricted to the canonical half-plane a>0 or
// (a==0, b>0) so each edge appears once, already in canonical order.
inline std::vector<Edge> candidate_edges(Midpoint m, const PointBox& box, std::int64_t max_len) {
  if (!midpoint_parity_ok(m))
    throw input_error("midpoint parity violated: " + to_string(m));
  check_coord(box.xmin);
  check_coord(box.xmax);
  check_coord(box.ymin);
  check_coord(box.ymax);
  std::vector<Edge> out;
  for (std::int64_t len = 1; len <= max_len; ++len) {
    if (((m.u + m.v + len) & 1) != 0) continue;  // parity: len == u+v (mod 2)
    const std::size_t ring = out.size();
    for (std::int64_t a = (m.u & 1); a <= len; a += 2) {
      const std::int64_t babs = len - a;
      if ((babs & 1) != (m.v & 1)) continue;  // redundant given len parity; keep explicit
      if (std::gcd(a, babs) != 1) continue;
      for (const int sb : {+1, -1}) {
        if (sb < 0 && (babs == 0 || a == 0)) continue;
        const std::int64_t b = sb * babs;
        const LatticePoint p{static_cast<std::int32_t>((m.u - a) / 2),
                             static_cast<std::int32_t>((m.v - b) / 2)};
        const LatticePoint q{static_cast<std::int32_t>((m.u + a) / 2),
                             static_cast<std::int32_t>((m.v + b) / 2)};
        if (!box.contains(p) || !box.contains(q)) continue;
        out.push_back(Edge{p, q});
      }
    }
    std::sort(out.begin() + static_cast<std::ptrdiff_t>(ring), out.end());
  }
  return out;
}

}  // namespace lattri
