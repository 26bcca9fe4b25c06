#include "nasp/lp.hpp"

#include <algorithm>
#include <cmath>

namespace nasp {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
  }
  return "Unknown";
}

void LinearProgram::add_row(const Vector& row, RowSense s, double rhs) {
  if (row.size() != num_vars()) fail(ErrorCode::DimensionMismatch, "LP row length");
  if (sense.empty() && A.rows() > 0) sense.assign(A.rows(), RowSense::Le);
  A.conservativeResize(A.rows() + 1, num_vars());
  A.row(A.rows() - 1) = row.transpose();
  b.conservativeResize(b.size() + 1);
  b(b.size() - 1) = rhs;
  sense.push_back(s);
}

void LinearProgram::add_polyhedron(const Polyhedron& p) {
  p.validate();
  if (p.dim() != num_vars()) fail(ErrorCode::DimensionMismatch, "polyhedron dimension");
  for (Index r = 0; r < p.rows(); ++r) add_row(p.A.row(r).transpose(), RowSense::Le, p.b(r));
  for (Index r = 0; r < p.eq_rows(); ++r) add_row(p.E.row(r).transpose(), RowSense::Eq, p.f(r));
}

void LinearProgram::validate() const {
  const Index n = objective.size();
  if (A.cols() != n && !(A.rows() == 0))
    fail(ErrorCode::DimensionMismatch, "A has " + std::to_string(A.cols()) +
                                           " columns, objective has " + std::to_string(n));
  if (A.rows() != b.size()) fail(ErrorCode::DimensionMismatch, "A rows vs b length");
  if (!sense.empty() && static_cast<Index>(sense.size()) != A.rows())
    fail(ErrorCode::DimensionMismatch, "sense length");
  if (lower.size() != 0 && lower.size() != n) fail(ErrorCode::DimensionMismatch, "lower bounds length");
  if (upper.size() != 0 && upper.size() != n) fail(ErrorCode::DimensionMismatch, "upper bounds length");
}

double lp_violation(const LinearProgram& lp, const Vector& x) {
  double worst = 0.0;
  for (Index r = 0; r < lp.A.rows(); ++r) {
    const double lhs = lp.A.row(r).dot(x);
    const RowSense s = lp.sense.empty() ? RowSense::Le : lp.sense[r];
    const double res = s == RowSense::Le   ? lhs - lp.b(r)
                       : s == RowSense::Ge ? lp.b(r) - lhs
                                           : std::abs(lhs - lp.b(r));
    worst = std::max(worst, res);
  }
  for (Index j = 0; j < x.size(); ++j) {
    if (lp.lower.size()) worst = std::max(worst, lp.lower(j) - x(j));
    if (lp.upper.size()) worst = std::max(worst, x(j) - lp.upper(j));
  }
  return worst;
}

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class VarKind : std::uint8_t { Fixed, Shifted, Flipped, Split };

struct VarMap {
  VarKind kind = VarKind::Fixed;
  double offset = 0.0;
  Index col = -1;   // primary standard column
  Index col2 = -1;  // negative part for Split
};

struct StdRow {
  std::vector<std::pair<Index, double>> coef;
  RowSense sense;
  double rhs;
};

constexpr double kRedCostTol = 1e-9;
constexpr int kDegenerateSwitch = 50;
constexpr int kReinvertEvery = 100;
constexpr double kHarrisTol = 1e-11;
constexpr double kRelPivot = 1e-7;
constexpr double kStrictRelPivot = 1e-5;
constexpr double kSmallRowSlack = 1e-9;
/// Residual accepted on the final point, relative to the row magnitudes.
constexpr double kAcceptViolation = 1e-9;

class Simplex {
 public:
  Simplex(RowMajor tableau, std::vector<Index> basis, Index n_cols, const Matrix& S, const Vector& rhs,
          bool strict)
      : T_(std::move(tableau)), basis_(std::move(basis)), n_(n_cols),
        m_(static_cast<Index>(basis_.size())), S_(S), rhs_(rhs), strict_(strict) {}

  /// Cost vector of the current phase, used when the tableau is rebuilt.
  void set_cost(Vector c) { cost_ = std::move(c); }

  // Rebuilds the tableau from the original rows and the current basis to
  // stop round-off from accumulating. Keeps the old tableau if B is singular.
  void reinvert() {
    if (m_ == 0 || cost_.size() != n_) return;
    Matrix B(m_, m_);
    for (Index i = 0; i < m_; ++i) B.col(i) = S_.col(basis_[i]);
    Eigen::PartialPivLU<Matrix> lu(B);
    const Matrix body = lu.solve(S_);
    const Vector x = lu.solve(rhs_);
    if (!body.allFinite() || !x.allFinite()) return;
    const double scale = std::max(1.0, rhs_.cwiseAbs().maxCoeff());
    if ((B * x - rhs_).cwiseAbs().maxCoeff() > 1e-9 * scale) return;
    T_.topLeftCorner(m_, n_) = body;
    T_.col(n_).head(m_) = x;
    Vector cb(m_);
    for (Index i = 0; i < m_; ++i) cb(i) = cost_(basis_[i]);
    T_.row(m_).head(n_) = (cost_.transpose() - cb.transpose() * body);
    T_(m_, n_) = -cb.dot(x);
    for (Index i = 0; i < m_; ++i) {
      T_.col(basis_[i]).setZero();
      T_(i, basis_[i]) = 1.0;
    }
  }

  enum class Result { Optimal, Unbounded };

  // Runs pivots until optimal or an unbounded column is found. Columns with
  // allowed[j] == false never enter.
  Result run(const std::vector<char>& allowed, Index& unbounded_col, std::size_t& pivots) {
    int degenerate_run = 0;
    int since_reinvert = 0;
    bool bland = strict_;
    const std::size_t cap = 50000 + 200 * static_cast<std::size_t>(m_ + n_);
    for (std::size_t iter = 0;; ++iter) {
      if (iter > cap) fail(ErrorCode::NumericalFailure, "simplex iteration cap reached");
      Index enter = -1;
      double best = -kRedCostTol;
      for (Index j = 0; j < n_; ++j) {
        if (!allowed[j]) continue;
        const double d = T_(m_, j);
        if (d < -kRedCostTol) {
          if (bland) { enter = j; break; }
          if (d < best) { best = d; enter = j; }
        }
      }
      if (enter < 0) {
        if (since_reinvert == 0) return Result::Optimal;
        reinvert();
        since_reinvert = 0;
        continue;
      }

      // Two-pass (Harris) ratio test: find the smallest ratio with slightly
      // relaxed values, then take the largest pivot among rows within it.
      // Bland mode keeps the exact minimum with lowest basic index instead.
      Index leave = -1;
      double bound = kInf;
      double colmax = 0.0;
      for (Index i = 0; i < m_; ++i) colmax = std::max(colmax, std::abs(T_(i, enter)));
      const double min_pivot = std::max(Tolerances::pivot, (strict_ ? kStrictRelPivot : kRelPivot) * colmax);
      for (Index i = 0; i < m_; ++i) {
        const double a = T_(i, enter);
        if (a <= min_pivot) continue;
        const double v = std::max(T_(i, n_), 0.0);
        bound = std::min(bound, (v + kHarrisTol * std::max(1.0, v)) / a);
      }
      double best_ratio = kInf;
      if (bound < kInf) {
        double best_pivot = 0.0;
        for (Index i = 0; i < m_; ++i) {
          const double a = T_(i, enter);
          if (a <= min_pivot) continue;
          const double ratio = std::max(T_(i, n_), 0.0) / a;
          if (ratio > bound) continue;
          bool take = leave < 0;
          if (!take && bland) {
            const double slack = 1e-12 * std::max(1.0, best_ratio);
            take = ratio < best_ratio - slack || (ratio <= best_ratio + slack && basis_[i] < basis_[leave]);
          } else if (!take) {
            take = a > best_pivot * (1.0 + 1e-12) || (a >= best_pivot * (1.0 - 1e-12) && basis_[i] < basis_[leave]);
          }
          if (take) {
            leave = i;
            best_ratio = ratio;
            best_pivot = a;
          }
        }
      }
      // Rows whose pivot is too small to prefer still block the step when
      // it would push them infeasible by more than a relative slack.
      {
        Index small = -1;
        double small_ratio = kInf;
        for (Index i = 0; i < m_; ++i) {
          const double a = T_(i, enter);
          if (a <= Tolerances::pivot || a > min_pivot) continue;
          const double v = std::max(T_(i, n_), 0.0);
          if ((v + kSmallRowSlack * std::max(1.0, v)) / a >= best_ratio) continue;
          const double ratio = v / a;
          if (small < 0 || ratio < small_ratio || (ratio == small_ratio && a > T_(small, enter))) {
            small = i;
            small_ratio = ratio;
          }
        }
        if (small >= 0) {
          leave = small;
          best_ratio = small_ratio;
        }
      }
      if (leave < 0) {
        unbounded_col = enter;
        return Result::Unbounded;
      }
      const bool degenerate = best_ratio <= 1e-12;
      pivot(leave, enter);
      ++pivots;
      if (++since_reinvert >= kReinvertEvery) {
        reinvert();
        since_reinvert = 0;
      }
      // Bland's rule stays on once stalling is seen, which rules out cycling.
      if (!degenerate) degenerate_run = 0;
      else if (++degenerate_run > kDegenerateSwitch) bland = true;
    }
  }

  void pivot(Index row, Index col) {
    const double p = T_(row, col);
    T_.row(row) /= p;
    T_(row, col) = 1.0;
    for (Index i = 0; i <= m_; ++i) {
      if (i == row) continue;
      const double factor = T_(i, col);
      if (factor == 0.0) continue;
      T_.row(i) -= factor * T_.row(row);
      T_(i, col) = 0.0;
    }
    basis_[row] = col;
  }

  RowMajor& tableau() { return T_; }
  std::vector<Index>& basis() { return basis_; }
  Index rows() const { return m_; }
  Index cols() const { return n_; }

 private:
  RowMajor T_;
  std::vector<Index> basis_;
  Index n_;
  Index m_;
  const Matrix& S_;
  const Vector& rhs_;
  bool strict_;
  Vector cost_;
};

bool row_satisfied(RowSense s, double lhs, double rhs, double tol) {
  switch (s) {
    case RowSense::Le: return lhs <= rhs + tol;
    case RowSense::Ge: return lhs >= rhs - tol;
    case RowSense::Eq: return std::abs(lhs - rhs) <= tol;
  }
  return false;
}

}  // namespace

// `strict` runs Bland's rule throughout with a larger relative pivot floor.
static LpOutcome solve_once(const LinearProgram& lp, bool strict) {
  const Index n = lp.num_vars();
  const Index m = lp.num_rows();
  LpOutcome out;

  Vector lo = lp.lower.size() ? lp.lower : Vector::Constant(n, -kInf);
  Vector up = lp.upper.size() ? lp.upper : Vector::Constant(n, kInf);
  auto sense_of = [&](Index r) { return lp.sense.empty() ? RowSense::Le : lp.sense[r]; };

  // Singleton and empty rows become bounds or consistency checks.
  std::vector<char> keep_row(static_cast<std::size_t>(m), 1);
  for (Index r = 0; r < m; ++r) {
    Index nnz = 0, last = -1;
    for (Index j = 0; j < n; ++j)
      if (lp.A(r, j) != 0.0) { ++nnz; last = j; }
    const RowSense s = sense_of(r);
    if (nnz == 0) {
      keep_row[r] = 0;
      if (!row_satisfied(s, 0.0, lp.b(r), Tolerances::feas)) return out;
      continue;
    }
    if (nnz != 1) continue;
    keep_row[r] = 0;
    const double a = lp.A(r, last);
    const double v = lp.b(r) / a;
    const bool upper_side = (s == RowSense::Le) == (a > 0);
    if (s == RowSense::Eq) {
      lo(last) = std::max(lo(last), v);
      up(last) = std::min(up(last), v);
    } else if (upper_side) {
      up(last) = std::min(up(last), v);
    } else {
      lo(last) = std::max(lo(last), v);
    }
  }

  std::vector<VarMap> vars(static_cast<std::size_t>(n));
  Index ncols = 0;
  std::vector<std::pair<Index, double>> bound_rows;  // (col, width)
  for (Index j = 0; j < n; ++j) {
    VarMap& v = vars[j];
    const double l = lo(j), u = up(j);
    if (l > u) {
      const double scale = std::max({1.0, std::abs(l), std::abs(u)});
      if (l - u > Tolerances::feas * scale) return out;
      v.kind = VarKind::Fixed;
      v.offset = 0.5 * (l + u);
      continue;
    }
    if (std::isfinite(l) && std::isfinite(u) && u - l <= 1e-12 * std::max(1.0, std::abs(l))) {
      v.kind = VarKind::Fixed;
      v.offset = l;
    } else if (std::isfinite(l)) {
      v.kind = VarKind::Shifted;
      v.offset = l;
      v.col = ncols++;
      if (std::isfinite(u)) bound_rows.emplace_back(v.col, u - l);
    } else if (std::isfinite(u)) {
      v.kind = VarKind::Flipped;
      v.offset = u;
      v.col = ncols++;
    } else {
      v.kind = VarKind::Split;
      v.col = ncols++;
      v.col2 = ncols++;
    }
  }

  // Objective in standard columns plus the constant from fixed/shifted parts.
  Vector cstd = Vector::Zero(ncols);
  for (Index j = 0; j < n; ++j) {
    const VarMap& v = vars[j];
    const double c = lp.objective(j);
    switch (v.kind) {
      case VarKind::Fixed: break;
      case VarKind::Shifted: cstd(v.col) += c; break;
      case VarKind::Flipped: cstd(v.col) -= c; break;
      case VarKind::Split: cstd(v.col) += c; cstd(v.col2) -= c; break;
    }
  }

  std::vector<StdRow> rows;
  rows.reserve(static_cast<std::size_t>(m) + bound_rows.size());
  for (Index r = 0; r < m; ++r) {
    if (!keep_row[r]) continue;
    StdRow row{{}, sense_of(r), lp.b(r)};
    for (Index j = 0; j < n; ++j) {
      const double a = lp.A(r, j);
      if (a == 0.0) continue;
      const VarMap& v = vars[j];
      switch (v.kind) {
        case VarKind::Fixed: row.rhs -= a * v.offset; break;
        case VarKind::Shifted:
          row.rhs -= a * v.offset;
          row.coef.emplace_back(v.col, a);
          break;
        case VarKind::Flipped:
          row.rhs -= a * v.offset;
          row.coef.emplace_back(v.col, -a);
          break;
        case VarKind::Split:
          row.coef.emplace_back(v.col, a);
          row.coef.emplace_back(v.col2, -a);
          break;
      }
    }
    if (row.coef.empty()) {
      if (!row_satisfied(row.sense, 0.0, row.rhs, Tolerances::feas)) return out;
      continue;
    }
    double big = 0.0;
    for (const auto& [c, a] : row.coef) big = std::max(big, std::abs(a));
    for (auto& [c, a] : row.coef) a /= big;
    row.rhs /= big;
    rows.push_back(std::move(row));
  }
  // Column equilibration: standard column j is stored as colscale[j] * y_j.
  Vector colscale = Vector::Ones(ncols);
  {
    Vector big = Vector::Zero(ncols);
    for (const StdRow& row : rows)
      for (const auto& [c, a] : row.coef) big(c) = std::max(big(c), std::abs(a));
    for (Index j = 0; j < ncols; ++j)
      if (big(j) > 0) colscale(j) = big(j);
    for (StdRow& row : rows) {
      for (auto& [c, a] : row.coef) a /= colscale(c);
      double rbig = 0.0;
      for (const auto& [c, a] : row.coef) rbig = std::max(rbig, std::abs(a));
      for (auto& [c, a] : row.coef) a /= rbig;
      row.rhs /= rbig;
    }
    for (Index j = 0; j < ncols; ++j) cstd(j) /= colscale(j);
  }
  for (auto [col, width] : bound_rows) rows.push_back(StdRow{{{col, 1.0}}, RowSense::Le, width * colscale(col)});

  for (StdRow& row : rows) {
    if (row.rhs < 0) {
      row.rhs = -row.rhs;
      for (auto& [c, a] : row.coef) a = -a;
      if (row.sense == RowSense::Le) row.sense = RowSense::Ge;
      else if (row.sense == RowSense::Ge) row.sense = RowSense::Le;
    }
  }

  const Index mr = static_cast<Index>(rows.size());
  Index nslack = 0, nart = 0;
  for (const StdRow& row : rows) {
    if (row.sense != RowSense::Eq) ++nslack;
    if (row.sense != RowSense::Le) ++nart;
  }
  const Index N = ncols + nslack + nart;
  const Index first_art = ncols + nslack;

  RowMajor T = RowMajor::Zero(mr + 1, N + 1);
  Matrix S = Matrix::Zero(mr, N);  // untouched copy for refinement
  Vector rhs(mr);
  std::vector<Index> basis(static_cast<std::size_t>(mr));
  {
    Index s = ncols, a = first_art;
    for (Index i = 0; i < mr; ++i) {
      const StdRow& row = rows[i];
      for (auto [c, v] : row.coef) T(i, c) += v;
      T(i, N) = row.rhs;
      rhs(i) = row.rhs;
      if (row.sense == RowSense::Le) {
        T(i, s) = 1.0;
        basis[i] = s++;
      } else if (row.sense == RowSense::Ge) {
        T(i, s++) = -1.0;
        T(i, a) = 1.0;
        basis[i] = a++;
      } else {
        T(i, a) = 1.0;
        basis[i] = a++;
      }
    }
    S = T.topLeftCorner(mr, N);
  }

  Simplex sx(std::move(T), std::move(basis), N, S, rhs, strict);
  std::vector<char> allowed(static_cast<std::size_t>(N), 1);
  Index unbounded_col = -1;

  if (nart > 0) {
    RowMajor& tab = sx.tableau();
    tab.row(mr).setZero();
    for (Index i = 0; i < mr; ++i)
      if (sx.basis()[i] >= first_art) tab.row(mr) -= tab.row(i);
    for (Index j = first_art; j < N; ++j) tab(mr, j) = 0.0;
    for (Index i = 0; i < mr; ++i)
      if (sx.basis()[i] >= first_art) tab(mr, sx.basis()[i]) = 0.0;
    Vector phase1 = Vector::Zero(N);
    phase1.tail(nart).setOnes();
    sx.set_cost(phase1);
    sx.run(allowed, unbounded_col, out.pivots);
    const double infeas = -tab(mr, N);
    const double scale = std::max(1.0, rhs.size() ? rhs.cwiseAbs().maxCoeff() : 0.0);
    if (infeas > Tolerances::feas * scale) return out;
    // Drive zero-level artificials out of the basis where possible.
    for (Index i = 0; i < mr; ++i) {
      if (sx.basis()[i] < first_art) continue;
      Index best = -1;
      double mag = Tolerances::pivot;
      for (Index j = 0; j < first_art; ++j) {
        if (std::abs(tab(i, j)) > mag) { mag = std::abs(tab(i, j)); best = j; }
      }
      if (best >= 0) sx.pivot(i, best);
    }
    for (Index j = first_art; j < N; ++j) allowed[j] = 0;
  }

  {
    RowMajor& tab = sx.tableau();
    tab.row(mr).setZero();
    for (Index j = 0; j < ncols; ++j) tab(mr, j) = cstd(j);
    for (Index i = 0; i < mr; ++i) {
      const Index bj = sx.basis()[i];
      const double cb = bj < ncols ? cstd(bj) : 0.0;
      if (cb != 0.0) tab.row(mr) -= cb * tab.row(i);
    }
    Vector phase2 = Vector::Zero(N);
    phase2.head(ncols) = cstd;
    sx.set_cost(phase2);
  }
  const auto res = sx.run(allowed, unbounded_col, out.pivots);

  const RowMajor& tab = sx.tableau();
  Vector y = Vector::Zero(N);
  for (Index i = 0; i < mr; ++i) y(sx.basis()[i]) = tab(i, N);

  // Refine basic values against the original standard-form rows, keeping
  // whichever of the tableau and the refactored solution fits them better.
  if (mr > 0) {
    Matrix B(mr, mr);
    Vector yt(mr);
    for (Index i = 0; i < mr; ++i) {
      B.col(i) = S.col(sx.basis()[i]);
      yt(i) = tab(i, N);
    }
    Eigen::PartialPivLU<Matrix> lu(B);
    Vector yb = lu.solve(rhs);
    yb += lu.solve(rhs - B * yb);
    const double r_lu = (B * yb - rhs).cwiseAbs().maxCoeff();
    const double r_tab = (B * yt - rhs).cwiseAbs().maxCoeff();
    if (std::isfinite(r_lu) && r_lu < r_tab)
      for (Index i = 0; i < mr; ++i) y(sx.basis()[i]) = yb(i);
  }
  for (Index j = 0; j < N; ++j)
    if (y(j) < 0 && y(j) > -1e-9) y(j) = 0.0;

  auto to_x = [&](const Vector& scaled, bool direction) {
    Vector ys = scaled;
    ys.head(ncols).array() /= colscale.array();
    Vector x(n);
    for (Index j = 0; j < n; ++j) {
      const VarMap& v = vars[j];
      const double off = direction ? 0.0 : v.offset;
      switch (v.kind) {
        case VarKind::Fixed: x(j) = off; break;
        case VarKind::Shifted: x(j) = off + ys(v.col); break;
        case VarKind::Flipped: x(j) = off - ys(v.col); break;
        case VarKind::Split: x(j) = ys(v.col) - ys(v.col2); break;
      }
    }
    return x;
  };

  if (res == Simplex::Result::Unbounded) {
    Vector dy = Vector::Zero(N);
    dy(unbounded_col) = 1.0;
    for (Index i = 0; i < mr; ++i) dy(sx.basis()[i]) = -tab(i, unbounded_col);
    Vector ray = to_x(dy, true);
    const double norm = ray.cwiseAbs().maxCoeff();
    if (norm > 0) ray /= norm;
    out.status = LpStatus::Unbounded;
    out.ray = ray;
    out.anchor = to_x(y, false);
    return out;
  }

  out.status = LpStatus::Optimal;
  out.point = to_x(y, false);
  out.value = lp.objective.dot(out.point);
  return out;
}

namespace {

double row_scale(const LinearProgram& lp, const Vector& x) {
  double scale = 1.0;
  if (lp.b.size()) scale = std::max(scale, lp.b.cwiseAbs().maxCoeff());
  if (lp.A.size() && x.size()) scale = std::max(scale, lp.A.cwiseAbs().maxCoeff() * x.cwiseAbs().maxCoeff());
  return scale;
}

}  // namespace

LpOutcome solve_lp(const LinearProgram& lp) {
  lp.validate();
  LpOutcome out = solve_once(lp, false);
  auto bad = [&](const LpOutcome& o) {
    return o.status == LpStatus::Optimal && lp_violation(lp, o.point) > kAcceptViolation * row_scale(lp, o.point);
  };
  if (!bad(out)) return out;
  const std::size_t first = out.pivots;
  out = solve_once(lp, true);
  out.pivots += first;
  if (bad(out)) fail(ErrorCode::NumericalFailure, "simplex returned an infeasible point");
  return out;
}

bool is_feasible(const Polyhedron& poly) {
  poly.validate();
  LinearProgram lp(poly.dim());
  lp.add_polyhedron(poly);
  return solve_lp(lp).status != LpStatus::Infeasible;
}

}  // namespace nasp
