#pragma once

#include "nasp/core.hpp"

namespace nasp {

/// The set {x : A x <= b, E x = f}. Equality rows are optional; every
/// algorithm also accepts a purely inequality-described polyhedron.
struct Polyhedron {
  Matrix A;
  Vector b;
  Matrix E;
  Vector f;

  Polyhedron() = default;
  explicit Polyhedron(Index dim) : A(0, dim), b(0), E(0, dim), f(0) {}
  Polyhedron(Matrix a, Vector rhs)
      : A(std::move(a)), b(std::move(rhs)), E(0, A.cols()), f(0) {}
  Polyhedron(Matrix a, Vector rhs, Matrix e, Vector frhs)
      : A(std::move(a)), b(std::move(rhs)), E(std::move(e)), f(std::move(frhs)) {}

  Index dim() const { return A.cols(); }
  Index rows() const { return A.rows(); }
  Index eq_rows() const { return E.rows(); }

  /// Throws DimensionMismatch when shapes disagree.
  void validate() const;

  void add_le(const Vector& row, double rhs);
  void add_eq(const Vector& row, double rhs);

  /// Largest violation of any row at `x` (0 when inside).
  double violation(const Vector& x) const;
  bool contains(const Vector& x, double tol) const { return violation(x) <= tol; }

  /// Intersection with another system in the same space.
  Polyhedron intersect(const Polyhedron& other) const;
};

}  // namespace nasp
