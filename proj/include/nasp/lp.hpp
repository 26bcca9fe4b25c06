#pragma once

#include "nasp/core.hpp"
#include "nasp/polyhedron.hpp"

namespace nasp {

enum class RowSense : std::uint8_t { Le, Eq, Ge };

/// min c^T x  s.t.  A x (sense) b,  lower <= x <= upper.
///
/// `sense` may be left empty, meaning every row is `<=`. Bounds may be
/// infinite; empty `lower`/`upper` vectors mean free variables.
struct LinearProgram {
  Vector objective;
  Matrix A;
  Vector b;
  std::vector<RowSense> sense;
  Vector lower;
  Vector upper;

  LinearProgram() = default;
  explicit LinearProgram(Index n)
      : objective(Vector::Zero(n)), A(0, n), b(0),
        lower(Vector::Constant(n, -kInf)), upper(Vector::Constant(n, kInf)) {}

  Index num_vars() const { return objective.size(); }
  Index num_rows() const { return A.rows(); }

  void add_row(const Vector& row, RowSense s, double rhs);
  /// Adds every row of `p`.
  void add_polyhedron(const Polyhedron& p);
  void validate() const;
};

enum class LpStatus : std::uint8_t { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus status);

struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  Vector point;  ///< Optimal only
  double value = 0.0;
  Vector ray;    ///< Unbounded only: feasible direction with c^T ray < 0
  /// Unbounded only: a feasible point from which `ray` emanates.
  Vector anchor;
  std::size_t pivots = 0;
};

/// Two-phase dense tableau primal simplex. Pricing is Dantzig's rule until
/// a run of degenerate pivots, after which Bland's rule takes over until
/// the objective moves again; ratio ties go to the lowest basic index.
LpOutcome solve_lp(const LinearProgram& lp);

/// True when {A x <= b, E x = f} has a point within Tolerances::feas.
bool is_feasible(const Polyhedron& poly);

/// Maximum constraint residual (rows and bounds) of `x` for `lp`.
double lp_violation(const LinearProgram& lp, const Vector& x);

}  // namespace nasp
