#pragma once

#include "nasp/core.hpp"
#include "nasp/lp.hpp"
#include "nasp/polyhedron.hpp"

namespace nasp {

/// {x : A x <= b, E x = f, z = M x + q, 0 <= x[compl[i]] ⊥ z[i] >= 0}.
struct ComplementaritySet {
  Polyhedron base;
  Matrix M;
  Vector q;
  std::vector<Index> compl_vars;

  ComplementaritySet() = default;
  explicit ComplementaritySet(Index dim) : base(dim), M(0, dim), q(0) {}

  Index dim() const { return base.dim(); }
  Index num_compl() const { return static_cast<Index>(compl_vars.size()); }
  void validate() const;

  /// Appends the pair 0 <= x[var] ⊥ row·x + rhs >= 0.
  void add_pair(Index var, const Vector& row, double rhs);
  Vector z(const Vector& x) const { return M * x + q; }
};

/// One bit per complementarity: 0 pins x[c_i] to zero, 1 pins z_i.
using Encoding = std::vector<std::uint8_t>;

std::string to_string(const Encoding& e);

/// Drops orthogonality and keeps both sign conditions.
Polyhedron polyhedral_relaxation(const ComplementaritySet& s);

Polyhedron selected_polyhedron(const ComplementaritySet& s, const Encoding& e);

struct Piece {
  Encoding code;
  Polyhedron poly;
};

inline constexpr int kDefaultEnumerationCap = 24;

/// Nonempty selected polyhedra in lexicographic encoding order. Infeasible
/// prefixes prune their whole subtree.
std::vector<Piece> enumerate_pieces(const ComplementaritySet& s, int cap_bits = kDefaultEnumerationCap);

bool contains(const ComplementaritySet& s, const Vector& x, double tol);

struct BranchOptions {
  /// Variables that must end at 0 or 1 (branched as x <= 0 versus x >= 1).
  std::vector<Index> binary_vars;
  Deadline deadline;
  /// Stop at the first complementary point. Implied by a zero objective.
  bool first_feasible = false;
};

struct SetOutcome {
  LpStatus status = LpStatus::Infeasible;
  Vector point;
  double value = 0.0;
  Vector ray;
  Vector anchor;
  std::size_t nodes = 0;
};

/// Global min of c'x over the set by disjunctive branch-and-bound.
SetOutcome optimize_over_set(const ComplementaritySet& s, const Vector& c,
                             const BranchOptions& opts = {});

}  // namespace nasp
