#pragma once

// SVG rendering of trees in the Klein disk. Geodesics are straight chords.

#include <cstdio>
#include <sstream>
#include <string>

#include "hypersteiner/klein.hpp"
#include "hypersteiner/tree.hpp"
#include "hypersteiner/triangulation.hpp"

namespace hypersteiner {

struct RenderOptions {
  double size = 640.0;
  double margin = 16.0;
  double marker_radius = 3.5;
  bool show_dt = false;
};

namespace detail {

inline std::string fmt6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace detail

/// Byte-deterministic SVG: the disk boundary, one line per edge, a red
/// circle per terminal and a blue circle per Steiner point. With show_dt the
/// Delaunay triangulation of all vertices is drawn dashed underneath.
inline std::string render_svg(const Tree& tree, const RenderOptions& opts = {}) {
  using detail::fmt6;
  const double half = opts.size / 2.0;
  const double radius = half - opts.margin;
  const auto sx = [&](const KleinPoint& p) { return fmt6(half + radius * p.x()); };
  const auto sy = [&](const KleinPoint& p) { return fmt6(half - radius * p.y()); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt6(opts.size) << "\" height=\""
      << fmt6(opts.size) << "\" viewBox=\"0 0 " << fmt6(opts.size) << ' ' << fmt6(opts.size) << "\">\n";
  out << "<circle class=\"disk\" cx=\"" << fmt6(half) << "\" cy=\"" << fmt6(half) << "\" r=\"" << fmt6(radius)
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

  const auto line = [&](const KleinPoint& a, const KleinPoint& b, const char* cls, const char* style) {
    out << "<line class=\"" << cls << "\" x1=\"" << sx(a) << "\" y1=\"" << sy(a) << "\" x2=\"" << sx(b)
        << "\" y2=\"" << sy(b) << "\" " << style << "/>\n";
  };

  if (opts.show_dt) {
    const auto all = tree.vertices();
    const auto keep = dedupe_indices(all);
    std::vector<KleinPoint> unique;
    for (int i : keep) unique.push_back(all[i]);
    const Triangulation dt = delaunay(unique);
    for (auto [i, j] : dt.edges()) {
      line(unique[i], unique[j], "dt", "stroke=\"gray\" stroke-width=\"0.5\" stroke-dasharray=\"4 3\"");
    }
  }
  for (auto [u, v] : tree.edges) {
    line(tree.vertex(u), tree.vertex(v), "edge", "stroke=\"black\" stroke-width=\"1.2\"");
  }
  const auto marker = [&](const KleinPoint& p, const char* cls, const char* color) {
    out << "<circle class=\"" << cls << "\" cx=\"" << sx(p) << "\" cy=\"" << sy(p) << "\" r=\""
        << fmt6(opts.marker_radius) << "\" fill=\"" << color << "\"/>\n";
  };
  for (const auto& p : tree.terminals) marker(p, "terminal", "red");
  for (const auto& p : tree.steiner) marker(p, "steiner", "blue");
  out << "</svg>\n";
  return out.str();
}

}  // namespace hypersteiner
