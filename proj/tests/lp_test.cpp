#include "nasp/lp.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <string>

using namespace nasp;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST(SolveLp, BoxMinimum) {
  LinearProgram lp(1);
  lp.objective << 1.0;
  lp.add_row(vec({1}), RowSense::Ge, 1.0);
  lp.add_row(vec({1}), RowSense::Le, 3.0);
  const LpOutcome out = solve_lp(lp);
  ASSERT_EQ(out.status, LpStatus::Optimal);
  EXPECT_NEAR(out.point(0), 1.0, 1e-9);
  EXPECT_NEAR(out.value, 1.0, 1e-9);
}

TEST(SolveLp, UnboundedRay) {
  LinearProgram lp(1);
  lp.objective << -1.0;
  lp.add_row(vec({1}), RowSense::Ge, 0.0);
  const LpOutcome out = solve_lp(lp);
  ASSERT_EQ(out.status, LpStatus::Unbounded);
  ASSERT_EQ(out.ray.size(), 1);
  EXPECT_NEAR(out.ray(0), 1.0, 1e-12);
  EXPECT_LT(lp.objective.dot(out.ray), 0.0);
}

TEST(SolveLp, EqualityAndCover) {
  LinearProgram lp(2);
  lp.objective << 1.0, 1.0;
  lp.add_row(vec({1, 1}), RowSense::Ge, 2.0);
  lp.add_row(vec({1, -1}), RowSense::Eq, 0.0);
  lp.lower = Vector::Zero(2);
  const LpOutcome out = solve_lp(lp);
  ASSERT_EQ(out.status, LpStatus::Optimal);
  EXPECT_NEAR(out.point(0), 1.0, 1e-9);
  EXPECT_NEAR(out.point(1), 1.0, 1e-9);
  EXPECT_NEAR(out.value, 2.0, 1e-9);
}

TEST(SolveLp, FreeVariablesAndRayDirection) {
  // min x - y  s.t.  x >= y - 1, y <= 4 ; x free
  LinearProgram lp(2);
  lp.objective << 1.0, -1.0;
  lp.add_row(vec({1, -1}), RowSense::Ge, -1.0);
  lp.upper(1) = 4.0;
  const LpOutcome out = solve_lp(lp);
  ASSERT_EQ(out.status, LpStatus::Optimal);
  EXPECT_NEAR(out.value, -1.0, 1e-9);

  LinearProgram unb(2);
  unb.objective << 1.0, 0.0;
  unb.add_row(vec({1, -1}), RowSense::Le, 0.0);
  const LpOutcome u = solve_lp(unb);
  ASSERT_EQ(u.status, LpStatus::Unbounded);
  EXPECT_LT(unb.objective.dot(u.ray), 0.0);
  EXPECT_LE((unb.A * u.ray).maxCoeff(), 1e-9);
  EXPECT_LE(lp_violation(unb, u.anchor), 1e-9);
}

TEST(SolveLp, DimensionMismatch) {
  LinearProgram lp(2);
  lp.A = Matrix::Zero(1, 3);
  lp.b = Vector::Zero(1);
  try {
    solve_lp(lp);
    FAIL() << "expected DimensionMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(IsFeasible, Examples) {
  Polyhedron unit(1);
  unit.add_le(vec({1}), 1.0);
  unit.add_le(vec({-1}), 0.0);
  EXPECT_TRUE(is_feasible(unit));

  Polyhedron crossed(1);
  crossed.add_le(vec({1}), 0.0);
  crossed.add_le(vec({-1}), -1.0);
  EXPECT_FALSE(is_feasible(crossed));

  Polyhedron corner(2);
  corner.add_le(vec({1, 1}), 1.0);
  corner.add_le(vec({-1, 0}), -0.6);
  corner.add_le(vec({0, -1}), -0.6);
  EXPECT_FALSE(is_feasible(corner));
}

TEST(IsFeasible, EqualityRows) {
  Polyhedron p(2);
  p.add_eq(vec({1, 1}), 1.0);
  p.add_le(vec({-1, 0}), 0.0);
  p.add_le(vec({0, -1}), 0.0);
  EXPECT_TRUE(is_feasible(p));
  p.add_eq(vec({1, -1}), 3.0);
  EXPECT_FALSE(is_feasible(p));
}

// Primal: min c'x, A x >= b, x >= 0. Dual: max b'y, A'y <= c, y >= 0.
TEST(SolveLpProperty, StrongDualityOnRandomLps) {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_real_distribution<double> pos(0.1, 4.0);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = dim(gen), m = dim(gen);
    Matrix A(m, n);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) A(i, j) = coef(gen);
    Vector x0(n), c(n);
    for (Index j = 0; j < n; ++j) { x0(j) = pos(gen); c(j) = pos(gen); }
    Vector b = A * x0;
    for (Index i = 0; i < m; ++i) b(i) -= pos(gen);

    LinearProgram primal(n);
    primal.objective = c;
    primal.A = A;
    primal.b = b;
    primal.sense.assign(static_cast<std::size_t>(m), RowSense::Ge);
    primal.lower = Vector::Zero(n);

    LinearProgram dual(m);
    dual.objective = -b;
    dual.A = A.transpose();
    dual.b = c;
    dual.lower = Vector::Zero(m);

    const LpOutcome p = solve_lp(primal);
    const LpOutcome d = solve_lp(dual);
    ASSERT_EQ(p.status, LpStatus::Optimal) << "trial " << trial;
    ASSERT_EQ(d.status, LpStatus::Optimal) << "trial " << trial;
    EXPECT_LE(lp_violation(primal, p.point), Tolerances::feas);
    EXPECT_LE(lp_violation(dual, d.point), Tolerances::feas);
    EXPECT_NEAR(p.value, -d.value, 1e-7 * std::max(1.0, std::abs(p.value))) << "trial " << trial;
    ++checked;
  }
  EXPECT_EQ(checked, 200);
}

TEST(SolveLpProperty, Deterministic) {
  LinearProgram lp(3);
  lp.objective << -1, -1, -1;
  lp.add_row(vec({1, 1, 0}), RowSense::Le, 1);
  lp.add_row(vec({0, 1, 1}), RowSense::Le, 1);
  lp.add_row(vec({1, 0, 1}), RowSense::Le, 1);
  lp.lower = Vector::Zero(3);
  const LpOutcome a = solve_lp(lp), b = solve_lp(lp);
  ASSERT_EQ(a.status, LpStatus::Optimal);
  EXPECT_EQ(a.point, b.point);
  EXPECT_EQ(a.pivots, b.pivots);
  EXPECT_NEAR(a.value, -1.5, 1e-9);
}

namespace {

// Text format: "rows cols", then per row its coefficients, sense (0 Le,
// 1 Eq, 2 Ge) and rhs, then per variable "objective lower upper".
LinearProgram read_lp(const std::string& path) {
  std::ifstream in(path);
  EXPECT_TRUE(in.good()) << path;
  Index m = 0, n = 0;
  in >> m >> n;
  LinearProgram lp(n);
  lp.lower = Vector::Constant(n, -kInf);
  lp.upper = Vector::Constant(n, kInf);
  for (Index r = 0; r < m; ++r) {
    Vector row(n);
    for (Index j = 0; j < n; ++j) in >> row(j);
    int sense = 0;
    double rhs = 0.0;
    in >> sense >> rhs;
    lp.add_row(row, static_cast<RowSense>(sense), rhs);
  }
  for (Index j = 0; j < n; ++j) {
    std::string o, l, u;
    in >> o >> l >> u;
    lp.objective(j) = std::stod(o);
    lp.lower(j) = std::stod(l);
    lp.upper(j) = std::stod(u);
  }
  return lp;
}

}  // namespace

// A hull best-response LP with coefficients up to 2e4 and an optimum near
// 4e6. Small entries in the entering column must still block the step.
TEST(SolveLp, BadlyScaledHullLp) {
  const LinearProgram lp = read_lp(std::string(NASP_TEST_DATA) + "/badly_scaled_lp.txt");
  const LpOutcome o = solve_lp(lp);
  ASSERT_EQ(o.status, LpStatus::Optimal);
  // Reference optimum from an independent dual simplex (HiGHS).
  EXPECT_NEAR(o.value, 1657586.171003718, 1e-6 * 1657586.171003718);
  EXPECT_LE(lp_violation(lp, o.point), 1e-6);
}
