#pragma once

// Synthetic point sets in the Klein disk and CSV point-file ingestion.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hypersteiner/errors.hpp"
#include "hypersteiner/klein.hpp"
#include "hypersteiner/random.hpp"

namespace hypersteiner {

enum class DatasetKind {
  centered_gaussian,
  boundary_mixture,
  polygon_one_per_vertex,
  transition_sweep,
  file,
};

struct DatasetSpec {
  DatasetKind kind = DatasetKind::centered_gaussian;
  int n = 0;
  double sigma = 0.5;
  double t = 1.0 - 1e-10;
  int d = 10;
  std::uint64_t seed = 0;
  std::string path;
  /// File input holds Poincare-disk coordinates.
  bool poincare = false;
  /// Draw each mixture point's cluster uniformly instead of equal allocation.
  bool random_assignment = false;
  /// Points per cluster for transition sweeps.
  int per_cluster = 20;
};

inline const char* to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::centered_gaussian: return "centered_gaussian";
    case DatasetKind::boundary_mixture: return "boundary_mixture";
    case DatasetKind::polygon_one_per_vertex: return "polygon_one_per_vertex";
    case DatasetKind::transition_sweep: return "transition_sweep";
    case DatasetKind::file: return "file";
  }
  return "unknown";
}

inline DatasetKind parse_dataset_kind(const std::string& name) {
  for (auto kind : {DatasetKind::centered_gaussian, DatasetKind::boundary_mixture,
                    DatasetKind::polygon_one_per_vertex, DatasetKind::transition_sweep, DatasetKind::file}) {
    if (name == to_string(kind)) return kind;
  }
  throw InputError("unknown dataset kind '" + name + "'");
}

/// Cluster center t e^{2 pi i k / d}.
inline KleinPoint mixture_mean(int k, int d, double t) {
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(d);
  return KleinPoint(t * std::cos(angle), t * std::sin(angle));
}

/// Parses a CSV with header `x,y`; Poincare coordinates are mapped to Klein.
inline std::vector<KleinPoint> read_points_csv(std::istream& in, bool poincare = false) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("point file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (line != "x,y") throw InputError("point file must start with the header 'x,y'");
  std::vector<KleinPoint> points;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InputError("row " + std::to_string(row) + ": expected 'x,y'");
    double x = 0.0;
    double y = 0.0;
    try {
      std::size_t used = 0;
      const std::string xs = line.substr(0, comma);
      const std::string ys = line.substr(comma + 1);
      x = std::stod(xs, &used);
      if (used != xs.size()) throw std::invalid_argument(xs);
      y = std::stod(ys, &used);
      if (used != ys.size()) throw std::invalid_argument(ys);
    } catch (const std::logic_error&) {
      throw InputError("row " + std::to_string(row) + ": malformed number in '" + line + "'");
    }
    try {
      points.push_back(poincare ? poincare_to_klein(x, y) : KleinPoint(x, y));
    } catch (const GeometryError&) {
      throw InputError("row " + std::to_string(row) + ": point lies outside the open unit disk");
    }
  }
  return points;
}

inline std::vector<KleinPoint> read_points_csv(const std::string& path, bool poincare = false) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open point file '" + path + "'");
  return read_points_csv(in, poincare);
}

inline void write_points_csv(std::ostream& out, const std::vector<KleinPoint>& points) {
  out << "x,y\n";
  char buf[64];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.x(), p.y());
    out << buf;
  }
}

/// Generates the point set described by `spec`; deterministic given the seed.
inline std::vector<KleinPoint> generate(const DatasetSpec& spec) {
  if (spec.kind == DatasetKind::file) {
    if (spec.path.empty()) throw InputError("file dataset needs a path");
    return read_points_csv(spec.path, spec.poincare);
  }
  if (!(spec.sigma > 0.0)) throw InputError("dataset sigma must be positive");
  const bool radial = spec.kind != DatasetKind::centered_gaussian;
  if (radial) {
    if (!(spec.t > 0.0 && spec.t < 1.0 - kBoundaryEpsilon)) {
      throw InputError("radial parameter t must lie in (0, 1 - 1e-12)");
    }
    if (spec.d < 1) throw InputError("cluster count d must be positive");
  }

  RandomStream rng(spec.seed);
  std::vector<KleinPoint> points;
  switch (spec.kind) {
    case DatasetKind::centered_gaussian: {
      if (spec.n < 2) throw InputError("dataset needs n >= 2");
      const GaussianSpec g{KleinPoint(0.0, 0.0), spec.sigma};
      for (int i = 0; i < spec.n; ++i) points.push_back(sample_wrapped_gaussian(g, rng));
      break;
    }
    case DatasetKind::boundary_mixture: {
      if (spec.n < 2) throw InputError("dataset needs n >= 2");
      for (int i = 0; i < spec.n; ++i) {
        int cluster = 0;
        if (spec.random_assignment) {
          cluster = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(spec.d));
        } else {
          // Equal counts; the first n mod d clusters take one extra point.
          const int base = spec.n / spec.d;
          const int extra = spec.n % spec.d;
          int offset = i;
          for (cluster = 0; cluster < spec.d; ++cluster) {
            const int size = base + (cluster < extra ? 1 : 0);
            if (offset < size) break;
            offset -= size;
          }
        }
        points.push_back(sample_wrapped_gaussian({mixture_mean(cluster + 1, spec.d, spec.t), spec.sigma}, rng));
      }
      break;
    }
    case DatasetKind::polygon_one_per_vertex: {
      if (spec.d < 2) throw InputError("polygon dataset needs d >= 2");
      for (int k = 1; k <= spec.d; ++k) {
        points.push_back(sample_wrapped_gaussian({mixture_mean(k, spec.d, spec.t), spec.sigma}, rng));
      }
      break;
    }
    case DatasetKind::transition_sweep: {
      if (spec.per_cluster < 1) throw InputError("transition sweep needs per_cluster >= 1");
      for (int k = 1; k <= spec.d; ++k) {
        for (int i = 0; i < spec.per_cluster; ++i) {
          points.push_back(sample_wrapped_gaussian({mixture_mean(k, spec.d, spec.t), spec.sigma}, rng));
        }
      }
      break;
    }
    case DatasetKind::file:
      break;
  }
  return points;
}

/// The radial parameters of the boundary transition sweep.
inline std::vector<double> transition_radii() { return {0.6, 0.8, 0.95, 0.99, 1.0 - 1e-5, 1.0 - 1e-10}; }

}  // namespace hypersteiner
