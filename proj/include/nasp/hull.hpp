#pragma once

#include "nasp/complementarity.hpp"

namespace nasp {

/// A polyhedron {u : A u <= b, E u = f} seen through the affine image
/// x = T u + t. The plain case is T = I, t = 0.
struct MappedPiece {
  Polyhedron poly;
  Matrix T;
  Vector t;

  static MappedPiece identity(Polyhedron p);
  Index image_dim() const { return T.rows(); }
  Vector image(const Vector& u) const { return T * u + t; }
};

/// Extended formulation of cl conv of a union of pieces. Variable layout
/// is [u^1 .. u^k, delta_1 .. delta_k, x]:
///   A_j u^j <= delta_j b_j,  E_j u^j = delta_j f_j,  delta >= 0,
///   sum delta = 1,  x = sum_j (T_j u^j + t_j delta_j).
struct HullFormulation {
  Polyhedron lifted;
  Index piece_count = 0;
  Index x_dim = 0;
  std::vector<Index> u_offset;
  std::vector<Index> u_dim;
  Index delta_offset = 0;
  Index x_offset = 0;
  std::vector<Encoding> codes;
  std::vector<MappedPiece> pieces;

  Index dim() const { return lifted.dim(); }
};

HullFormulation balas_hull(const std::vector<Polyhedron>& pieces);
HullFormulation balas_hull(std::vector<MappedPiece> pieces);

struct SupportPoint {
  Vector x;  ///< image-space point
  double weight = 0.0;
  Index piece = -1;
};

/// Splits a lifted hull point into image-space support points x^j = u^j/delta_j
/// weighted by delta_j. Weights at or below Tolerances::weight are dropped and
/// the rest renormalized; a recession component carried by a dropped piece is
/// moved onto a kept piece whose own recession cone contains it.
std::vector<SupportPoint> decompose_hull_point(const HullFormulation& h, const Vector& lifted);

/// Projects a piece onto the coordinates `keep`. Implied equalities are
/// detected, variables outside `keep` are eliminated where they are pinned by
/// equalities or unconstrained in one direction, and redundant rows are
/// dropped. The image of the result equals the projection of `p`.
MappedPiece compress_piece(const Polyhedron& p, const std::vector<Index>& keep);

/// Some point of `p` whose coordinates `keep` equal `target`, if any.
std::optional<Vector> lift_point(const Polyhedron& p, const std::vector<Index>& keep, const Vector& target);

}  // namespace nasp
