#pragma once

// Deterministic SVG 1.1 rendering: one <line> per edge in canonical order,
// y-axis flipped to math convention, constraint edges styled apart, optional
// midpoint highlights and a dashed ground-state overlay.

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "lattri/common.hpp"
#include "lattri/io.hpp"
#include "lattri/triangulation.hpp"

namespace lattri {

struct RenderSpec {
  double scale = 40.0;  // pixels per lattice unit
  double edge_stroke = 2.0;
  double constraint_stroke = 3.5;
  std::vector<std::int32_t> highlight_mids;
  bool ground_overlay = false;
};

inline std::string render_svg(const Triangulation& t, const RenderSpec& spec = {}) {
  if (!(spec.scale > 0.0)) throw input_error("render scale must be positive");
  const Region& r = t.region();
  const double margin = spec.scale;
  const double width = spec.scale * static_cast<double>(r.width) + 2 * margin;
  const double height = spec.scale * static_cast<double>(r.k) + 2 * margin;
  const auto px = [&](double x) {
    return margin + spec.scale * (x - static_cast<double>(r.x_lo));
  };
  const auto py = [&](double y) {
    return margin + spec.scale * (static_cast<double>(r.k) - y);
  };
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
      << fmt_double(width) << "\" height=\"" << fmt_double(height)
      << "\" viewBox=\"0 0 " << fmt_double(width) << " " << fmt_double(height)
      << "\">\n";
  if (spec.ground_overlay) {
    const Triangulation g = ground_state(t.constraints_ptr());
    for (const Edge& e : g.sorted_edges())
      out << "  <line class=\"ground-overlay\" x1=\"" << fmt_double(px(e.p.x))
          << "\" y1=\"" << fmt_double(py(e.p.y)) << "\" x2=\""
          << fmt_double(px(e.q.x)) << "\" y2=\"" << fmt_double(py(e.q.y))
          << "\" stroke=\"#9e9e9e\" stroke-width=\""
          << fmt_double(spec.edge_stroke * 0.75)
          << "\" stroke-dasharray=\"4 3\"/>\n";
  }
  const ConstraintSet& cs = t.constraints();
  for (const Edge& e : t.sorted_edges()) {
    const std::int32_t id = r.mid_id(midpoint_of(e));
    const bool frozen = cs.constrained(id);
    out << "  <line class=\"edge" << (frozen ? " constraint" : "") << "\" x1=\""
        << fmt_double(px(e.p.x)) << "\" y1=\"" << fmt_double(py(e.p.y))
        << "\" x2=\"" << fmt_double(px(e.q.x)) << "\" y2=\""
        << fmt_double(py(e.q.y)) << "\" stroke=\""
        << (frozen ? "#c62828" : "#1a237e") << "\" stroke-width=\""
        << fmt_double(frozen ? spec.constraint_stroke : spec.edge_stroke)
        << "\" stroke-linecap=\"round\"/>\n";
  }
  for (const std::int32_t id : spec.highlight_mids) {
    if (id < 0 || id >= r.midpoint_count)
      throw input_error("highlight midpoint out of range: " + std::to_string(id));
    const Midpoint m = r.mid_of_id(id);
    out << "  <circle class=\"highlight\" cx=\""
        << fmt_double(px(static_cast<double>(m.u) / 2.0)) << "\" cy=\""
        << fmt_double(py(static_cast<double>(m.v) / 2.0)) << "\" r=\""
        << fmt_double(spec.scale * 0.18)
        << "\" fill=\"none\" stroke=\"#f9a825\" stroke-width=\""
        << fmt_double(spec.edge_stroke) << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

// Reads back the edge endpoints of class="edge" lines; the inverse of
// render_svg up to the lattice coordinates. Used by round-trip tests and the
// validate command on SVG inputs.
inline std::vector<Edge> parse_svg_edges(const std::string& svg, double scale,
                                         const Region& r) {
  if (!(scale > 0.0)) throw input_error("render scale must be positive");
  const double margin = scale;
  std::vector<Edge> out;
  std::istringstream in(svg);
  std::string line;
  const auto attr = [](const std::string& s, const char* name) {
    const std::string key = std::string(name) + "=\"";
    const std::size_t at = s.find(key);
    if (at == std::string::npos) throw input_error(std::string("missing ") + name);
    const std::size_t end = s.find('"', at + key.size());
    return detail::parse_number<double>(s.substr(at + key.size(), end - at - key.size()),
                                        name);
  };
  const auto unx = [&](double v) {
    return static_cast<std::int32_t>(std::lround((v - margin) / scale)) + r.x_lo;
  };
  const auto uny = [&](double v) {
    return r.k - static_cast<std::int32_t>(std::lround((v - margin) / scale));
  };
  while (std::getline(in, line)) {
    if (line.find("<line class=\"edge") == std::string::npos) continue;
    out.push_back(make_edge(make_point(unx(attr(line, "x1")), uny(attr(line, "y1"))),
                            make_point(unx(attr(line, "x2")), uny(attr(line, "y2")))));
  }
  return out;
}

}  // namespace lattri
