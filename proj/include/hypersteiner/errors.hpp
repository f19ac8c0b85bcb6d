#pragma once

#include <stdexcept>
#include <string>

namespace hypersteiner {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point or configuration violates a geometric precondition
/// (outside the disk, coincident vertices, too few points, ...).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data: unreadable files, bad JSON, invalid specs.
class InputError : public Error {
 public:
  using Error::Error;
};

/// An edge incident to a Steiner point has (numerically) zero length,
/// so the tree-length gradient is undefined there.
class CollapsedEdgeError : public Error {
 public:
  CollapsedEdgeError(int u, int v)
      : Error("collapsed edge between vertices " + std::to_string(u) + " and " + std::to_string(v)),
        u_(u),
        v_(v) {}

  int u() const noexcept { return u_; }
  int v() const noexcept { return v_; }

 private:
  int u_;
  int v_;
};

}  // namespace hypersteiner
