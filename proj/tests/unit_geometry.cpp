#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <random>
#include <vector>

#include "lattri/geometry.hpp"

using namespace lattri;

namespace {

LatticePoint P(int x, int y) { return {x, y}; }
Edge E(int x1, int y1, int x2, int y2) { return make_edge(P(x1, y1), P(x2, y2)); }

// Independent crossing oracle in exact rational arithmetic (__int128): solve
// the two line equations, classify the intersection parameters.
bool oracle_cross(const Edge& A, const Edge& B) {
  using I = __int128;
  const I rx = A.q.x - A.p.x, ry = A.q.y - A.p.y;
  const I wx = B.q.x - B.p.x, wy = B.q.y - B.p.y;
  const I qpx = B.p.x - A.p.x, qpy = B.p.y - A.p.y;
  I denom = rx * wy - ry * wx;
  if (denom == 0) {
    if (qpx * ry - qpy * rx != 0) return false;  // parallel, distinct lines
    // collinear: positive-length overlap?
    const I rr = rx * rx + ry * ry;
    const I t0 = qpx * rx + qpy * ry;
    const I t1 = t0 + wx * rx + wy * ry;
    const I lo = t0 < t1 ? t0 : t1, hi = t0 < t1 ? t1 : t0;
    const I olo = lo > 0 ? lo : 0, ohi = hi < rr ? hi : rr;
    return olo < ohi;
  }
  I snum = qpx * wy - qpy * wx;  // position along A, scaled by denom
  I tnum = qpx * ry - qpy * rx;  // position along B
  if (denom < 0) {
    snum = -snum;
    tnum = -tnum;
    denom = -denom;
  }
  if (snum < 0 || snum > denom || tnum < 0 || tnum > denom) return false;
  const bool interior_a = snum > 0 && snum < denom;
  const bool interior_b = tnum > 0 && tnum < denom;
  return interior_a || interior_b;
}

// Raw segment builder bypassing primitivity (the predicate must stay total).
Edge raw_edge(int x1, int y1, int x2, int y2) {
  LatticePoint a{x1, y1}, b{x2, y2};
  if (b < a) std::swap(a, b);
  return {a, b};
}

}  // namespace

TEST_CASE("is_primitive basics") {
  CHECK(is_primitive(P(0, 0), P(1, 1)));
  CHECK_FALSE(is_primitive(P(0, 0), P(2, 2)));
  CHECK(is_primitive(P(0, 0), P(3, 2)));
  CHECK(is_primitive(P(0, 0), P(0, 1)));
  CHECK_FALSE(is_primitive(P(1, 1), P(1, 3)));
  CHECK_THROWS_AS(is_primitive(P(2, 2), P(2, 2)), input_error);
}

TEST_CASE("l1_length basics") {
  CHECK(l1_length(E(0, 0, 1, 0)) == 1);
  CHECK(l1_length(E(0, 0, 1, 1)) == 2);
  CHECK(l1_length(E(1, 3, 4, 1)) == 5);
}

TEST_CASE("make_edge canonicalizes and validates") {
  const Edge e = make_edge(P(1, 1), P(0, 0));
  CHECK(e.p == P(0, 0));
  CHECK(e.q == P(1, 1));
  CHECK_THROWS_AS(make_edge(P(0, 0), P(2, 4)), input_error);
  CHECK_THROWS_AS(make_point(kCoordCap + 1, 0), input_error);
  CHECK(midpoint_of(E(1, 0, 2, 1)) == Midpoint{3, 1});
}

TEST_CASE("midpoint parity invariant") {
  // any primitive edge has a midpoint with not-both-even doubled coordinates
  for (int x1 = -2; x1 <= 2; ++x1)
    for (int y1 = -2; y1 <= 2; ++y1)
      for (int x2 = -2; x2 <= 2; ++x2)
        for (int y2 = -2; y2 <= 2; ++y2) {
          LatticePoint a{x1, y1}, b{x2, y2};
          if (a == b || !is_primitive(a, b)) continue;
          CHECK(midpoint_parity_ok(midpoint_of(make_edge(a, b))));
        }
}

TEST_CASE("segments_cross: named cases") {
  CHECK(segments_cross(E(0, 0, 1, 1), E(0, 1, 1, 0)));        // unit diagonals
  CHECK_FALSE(segments_cross(E(0, 0, 1, 0), E(1, 0, 2, 0)));  // touch at endpoint
  CHECK(segments_cross(E(0, 0, 2, 1), E(1, 0, 1, 1)));        // through (1, 1/2)
  CHECK_FALSE(segments_cross(E(0, 0, 1, 1), E(1, 1, 2, 1)));  // shared endpoint
  CHECK(segments_cross(E(0, 0, 1, 0), E(0, 0, 1, 0)));        // identical: full overlap
  CHECK_FALSE(segments_cross(E(0, 0, 1, 1), E(1, 1, 2, 2)));  // collinear, touch only
  // T-junction: endpoint in the other segment's interior (non-primitive input)
  CHECK(segments_cross(raw_edge(0, 0, 2, 0), E(1, 0, 2, 1)));
  // collinear positive overlap (non-primitive inputs)
  CHECK(segments_cross(raw_edge(0, 0, 2, 0), raw_edge(1, 0, 3, 0)));
  CHECK_FALSE(segments_cross(E(0, 0, 1, 0), E(0, 1, 1, 1)));  // parallel disjoint
}

TEST_CASE("segments_cross agrees with rational oracle exhaustively on a 4x4 grid") {
  std::vector<Edge> segs;
  for (int x1 = 0; x1 <= 3; ++x1)
    for (int y1 = 0; y1 <= 3; ++y1)
      for (int x2 = 0; x2 <= 3; ++x2)
        for (int y2 = 0; y2 <= 3; ++y2) {
          if (x1 == x2 && y1 == y2) continue;
          segs.push_back(raw_edge(x1, y1, x2, y2));  // includes non-primitive
        }
  std::size_t checked = 0;
  for (std::size_t i = 0; i < segs.size(); i += 3)
    for (std::size_t j = i; j < segs.size(); j += 2) {
      INFO(to_string(segs[i]) << " vs " << to_string(segs[j]));
      const bool got = segments_cross(segs[i], segs[j]);
      REQUIRE(got == oracle_cross(segs[i], segs[j]));
      REQUIRE(got == segments_cross(segs[j], segs[i]));  // symmetry
      ++checked;
    }
  CHECK(checked > 4000);
}

TEST_CASE("segments_cross agrees with rational oracle on random pairs") {
  std::mt19937 rng(12345);
  std::uniform_int_distribution<int> d(-9, 9);
  for (int iter = 0; iter < 20000; ++iter) {
    LatticePoint a{d(rng), d(rng)}, b{d(rng), d(rng)}, c{d(rng), d(rng)}, e{d(rng), d(rng)};
    if (a == b || c == e) continue;
    if (b < a) std::swap(a, b);
    if (e < c) std::swap(c, e);
    const Edge s1{a, b}, s2{c, e};
    INFO(to_string(s1) << " vs " << to_string(s2));
    REQUIRE(segments_cross(s1, s2) == oracle_cross(s1, s2));
  }
}

namespace {

// Brute-force candidate oracle: scan every point pair in the box.
std::vector<Edge> oracle_candidates(Midpoint m, const PointBox& box, std::int64_t max_len) {
  std::vector<Edge> out;
  for (int x1 = box.xmin; x1 <= box.xmax; ++x1)
    for (int y1 = box.ymin; y1 <= box.ymax; ++y1)
      for (int x2 = box.xmin; x2 <= box.xmax; ++x2)
        for (int y2 = box.ymin; y2 <= box.ymax; ++y2) {
          LatticePoint p{x1, y1}, q{x2, y2};
          if (!(p < q)) continue;
          if (!is_primitive(p, q)) continue;
          const Edge e{p, q};
          if (midpoint_of(e) != m) continue;
          if (l1_length(e) > max_len) continue;
          out.push_back(e);
        }
  std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) {
    return std::pair{l1_length(a), a} < std::pair{l1_length(b), b};
  });
  return out;
}

}  // namespace

TEST_CASE("candidate_edges: spec'd examples") {
  const PointBox unit{0, 0, 1, 1};
  CHECK(candidate_edges({1, 1}, unit, 2) ==
        std::vector<Edge>{E(0, 0, 1, 1), E(0, 1, 1, 0)});
  CHECK(candidate_edges({1, 0}, unit, 3) == std::vector<Edge>{E(0, 0, 1, 0)});
  const auto c31 = candidate_edges({3, 1}, PointBox{0, 0, 3, 1}, 4);
  REQUIRE(c31.size() == 4);
  CHECK(c31[0] == E(1, 0, 2, 1));
  CHECK(c31[1] == E(1, 1, 2, 0));
  CHECK(c31[2] == E(0, 0, 3, 1));
  CHECK(c31[3] == E(0, 1, 3, 0));
}

TEST_CASE("candidate_edges matches brute-force oracle") {
  std::mt19937 rng(777);
  std::uniform_int_distribution<int> du(-12, 12);
  int tested = 0;
  while (tested < 300) {
    const int u = du(rng), v = du(rng);
    if (u % 2 == 0 && v % 2 == 0) continue;
    std::uniform_int_distribution<int> db(-8, 8);
    int xa = db(rng), xb = db(rng), ya = db(rng), yb = db(rng);
    const PointBox box{std::min(xa, xb), std::min(ya, yb), std::max(xa, xb), std::max(ya, yb)};
    const std::int64_t max_len = 1 + (tested % 9);
    const auto got = candidate_edges({u, v}, box, max_len);
    const auto want = oracle_candidates({u, v}, box, max_len);
    INFO("m=" << to_string(Midpoint{u, v}) << " len<=" << max_len);
    REQUIRE(got == want);
    // strict ordering + per-edge contracts
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(midpoint_of(got[i]) == Midpoint{u, v});
      CHECK(is_primitive(got[i].p, got[i].q));
      if (i > 0) {
        CHECK(std::pair{l1_length(got[i - 1]), got[i - 1]} <
              std::pair{l1_length(got[i]), got[i]});
      }
      // 180-degree rotation about m maps the edge onto itself
      const LatticePoint rp{u - got[i].q.x, v - got[i].q.y};
      const LatticePoint rq{u - got[i].p.x, v - got[i].p.y};
      CHECK(Edge{rp, rq} == got[i]);
    }
    ++tested;
  }
}

TEST_CASE("candidate_edges rejects both-even midpoints") {
  CHECK_THROWS_AS(candidate_edges({2, 2}, PointBox{0, 0, 4, 4}, 4), input_error);
}
