#include "nasp/hull.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace nasp;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Polyhedron box(const Vector& lo, const Vector& hi) {
  Polyhedron p(lo.size());
  for (Index j = 0; j < lo.size(); ++j) {
    p.add_le(Vector::Unit(lo.size(), j), hi(j));
    p.add_le(-Vector::Unit(lo.size(), j), -lo(j));
  }
  return p;
}

// min c'x over the projection of the hull onto x.
LpOutcome hull_min(const HullFormulation& h, const Vector& c) {
  LinearProgram lp(h.dim());
  lp.objective.segment(h.x_offset, h.x_dim) = c;
  lp.add_polyhedron(h.lifted);
  return solve_lp(lp);
}

double piece_min(const Polyhedron& p, const Vector& c) {
  LinearProgram lp(p.dim());
  lp.objective = c;
  lp.add_polyhedron(p);
  return solve_lp(lp).value;
}

}  // namespace

TEST(BalasHull, SinglePiece) {
  const HullFormulation h = balas_hull({box(vec({0}), vec({1}))});
  EXPECT_NEAR(hull_min(h, vec({1})).value, 0.0, 1e-9);
  EXPECT_NEAR(hull_min(h, vec({-1})).value, -1.0, 1e-9);
  const LpOutcome out = hull_min(h, vec({1}));
  EXPECT_NEAR(out.point(h.delta_offset), 1.0, 1e-9);
}

TEST(BalasHull, TwoIntervals) {
  const HullFormulation h = balas_hull({box(vec({0}), vec({1})), box(vec({2}), vec({3}))});
  EXPECT_NEAR(hull_min(h, vec({1})).value, 0.0, 1e-9);
  EXPECT_NEAR(-hull_min(h, vec({-1})).value, 3.0, 1e-9);
  // 1.5 lies in the hull.
  LinearProgram lp(h.dim());
  lp.add_polyhedron(h.lifted);
  lp.lower(h.x_offset) = lp.upper(h.x_offset) = 1.5;
  EXPECT_EQ(solve_lp(lp).status, LpStatus::Optimal);
}

TEST(BalasHull, TwoPointsSpanSegment) {
  const HullFormulation h = balas_hull({box(vec({0, 0}), vec({0, 0})), box(vec({1, 1}), vec({1, 1}))});
  EXPECT_NEAR(hull_min(h, vec({1, -1})).value, 0.0, 1e-9);
  EXPECT_NEAR(hull_min(h, vec({-1, 1})).value, 0.0, 1e-9);
  EXPECT_NEAR(hull_min(h, vec({1, 1})).value, 0.0, 1e-9);
  EXPECT_NEAR(hull_min(h, vec({-1, -1})).value, -2.0, 1e-9);
}

TEST(BalasHull, Errors) {
  try {
    balas_hull(std::vector<Polyhedron>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyPieceList);
  }
  try {
    balas_hull({box(vec({0}), vec({1})), box(vec({0, 0}), vec({1, 1}))});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
  EXPECT_THROW(balas_hull({box(vec({1}), vec({0}))}), Error);
}

TEST(DecomposeHullPoint, Examples) {
  {
    const HullFormulation h = balas_hull({box(vec({0}), vec({1})), box(vec({2}), vec({3}))});
    Vector z = Vector::Zero(h.dim());
    z(h.u_offset[0]) = 0.7;
    z(h.delta_offset) = 1.0;
    z(h.x_offset) = 0.7;
    const auto s = decompose_hull_point(h, z);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_NEAR(s[0].x(0), 0.7, 1e-12);
    EXPECT_NEAR(s[0].weight, 1.0, 1e-12);
  }
  {
    const HullFormulation h = balas_hull({box(vec({0}), vec({0})), box(vec({1}), vec({1}))});
    Vector z = Vector::Zero(h.dim());
    z(h.u_offset[1]) = 0.5;
    z(h.delta_offset) = 0.5;
    z(h.delta_offset + 1) = 0.5;
    z(h.x_offset) = 0.5;
    const auto s = decompose_hull_point(h, z);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_NEAR(s[0].x(0), 0.0, 1e-12);
    EXPECT_NEAR(s[1].x(0), 1.0, 1e-12);
    EXPECT_NEAR(s[0].weight, 0.5, 1e-12);
  }
  {
    const HullFormulation h = balas_hull({box(vec({0}), vec({1})), box(vec({2}), vec({3}))});
    Vector z = Vector::Zero(h.dim());
    z(h.u_offset[0]) = 0.25;
    z(h.u_offset[1]) = 1.5;
    z(h.delta_offset) = 0.25;
    z(h.delta_offset + 1) = 0.75;
    z(h.x_offset) = 1.75;
    const auto s = decompose_hull_point(h, z);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_NEAR(s[0].x(0), 1.0, 1e-12);
    EXPECT_NEAR(s[1].x(0), 2.0, 1e-12);
    EXPECT_NEAR(s[0].weight, 0.25, 1e-12);
    EXPECT_NEAR(s[0].weight * s[0].x(0) + s[1].weight * s[1].x(0), 1.75, 1e-12);
  }
}

TEST(DecomposeHullPoint, RecessionResidualAbsorbed) {
  // Pieces [0, inf) and [1, inf). All weight sits on the first piece while
  // the second carries a ray of length 2; the ray moves onto the first.
  Polyhedron a(1), b(1);
  a.add_le(vec({-1}), 0);
  b.add_le(vec({-1}), -1);
  const HullFormulation h = balas_hull({a, b});
  Vector z = Vector::Zero(h.dim());
  z(h.delta_offset) = 1.0;
  z(h.u_offset[0]) = 1.0;
  z(h.u_offset[1]) = 2.0;
  z(h.x_offset) = 3.0;
  ASSERT_LE(h.lifted.violation(z), 1e-12);
  const auto s = decompose_hull_point(h, z);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_NEAR(s[0].x(0), 3.0, 1e-12);
  EXPECT_NEAR(s[0].weight, 1.0, 1e-12);
}

TEST(HullProperty, BoxUnionsMatchPerPieceMinimum) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> corner(-5, 5), width(0, 3), obj(-1, 1);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 1 + trial % 3;
    std::vector<Polyhedron> boxes;
    for (int j = 0; j < k; ++j) {
      const Vector lo = vec({corner(gen), corner(gen)});
      boxes.push_back(box(lo, lo + vec({width(gen), width(gen)})));
    }
    const HullFormulation h = balas_hull(boxes);
    for (int o = 0; o < 16; ++o) {
      const Vector c = vec({obj(gen), obj(gen)});
      double best = kInf;
      for (const Polyhedron& b : boxes) best = std::min(best, piece_min(b, c));
      const LpOutcome out = hull_min(h, c);
      ASSERT_EQ(out.status, LpStatus::Optimal);
      EXPECT_NEAR(out.value, best, 1e-7);
    }
  }
}

TEST(CompressPiece, EliminatesPinnedAuxiliaries) {
  // y = 2x + 1 with x in [0,1]; z free of the image; keep y only.
  Polyhedron p(3);
  p.add_eq(vec({-2, 1, 0}), 1);
  p.add_le(vec({1, 0, 0}), 1);
  p.add_le(vec({-1, 0, 0}), 0);
  p.add_le(vec({0, 0, -1}), 0);
  p.add_le(vec({1, 0, -1}), 4);
  const MappedPiece m = compress_piece(p, {1});
  EXPECT_LE(m.poly.dim(), 1);
  LinearProgram lp(m.poly.dim());
  lp.add_polyhedron(m.poly);
  lp.objective = m.T.row(0).transpose();
  LpOutcome lo = solve_lp(lp);
  ASSERT_EQ(lo.status, LpStatus::Optimal);
  EXPECT_NEAR(lo.value + m.t(0), 1.0, 1e-9);
  lp.objective = -lp.objective;
  lo = solve_lp(lp);
  EXPECT_NEAR(-lo.value + m.t(0), 3.0, 1e-9);
}

TEST(CompressPiece, ImpliedEqualityFromOpposedRows) {
  Polyhedron p(2);
  p.add_le(vec({1, -1}), 0);
  p.add_le(vec({-1, 1}), 0);
  p.add_le(vec({1, 0}), 2);
  p.add_le(vec({-1, 0}), 0);
  const MappedPiece m = compress_piece(p, {1});
  EXPECT_EQ(m.poly.dim(), 1);
  EXPECT_EQ(m.poly.rows(), 2);
}

TEST(CompressProperty, ImageMatchesProjection) {
  std::mt19937_64 gen(9);
  std::uniform_int_distribution<int> small(-2, 2), pick(0, 5);
  std::uniform_real_distribution<double> obj(-1, 1);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Index n = 3 + trial % 4;
    Polyhedron p = box(Vector::Constant(n, -2), Vector::Constant(n, 2));
    Vector row(n);
    for (int r = 0; r < 3; ++r) {
      for (Index j = 0; j < n; ++j) row(j) = small(gen);
      p.add_le(row, 1 + pick(gen));
    }
    for (Index j = 0; j < n; ++j) row(j) = small(gen);
    p.add_eq(row, 0.0);
    if (!is_feasible(p)) continue;
    std::vector<Index> keep;
    for (Index j = 0; j < n; ++j)
      if (pick(gen) < 3) keep.push_back(j);
    if (keep.empty()) keep.push_back(0);
    const MappedPiece m = compress_piece(p, keep);
    for (int o = 0; o < 8; ++o) {
      Vector c(static_cast<Index>(keep.size()));
      for (Index j = 0; j < c.size(); ++j) c(j) = obj(gen);
      Vector full = Vector::Zero(n);
      for (std::size_t k = 0; k < keep.size(); ++k) full(keep[k]) = c(static_cast<Index>(k));
      const double expect = piece_min(p, full);
      LinearProgram lp(m.poly.dim());
      lp.add_polyhedron(m.poly);
      lp.objective = m.T.transpose() * c;
      const LpOutcome got = solve_lp(lp);
      ASSERT_EQ(got.status, LpStatus::Optimal) << "trial " << trial;
      EXPECT_NEAR(got.value + c.dot(m.t), expect, 1e-7) << "trial " << trial;
      Vector target = m.image(got.point);
      const auto lifted = lift_point(p, keep, target);
      ASSERT_TRUE(lifted.has_value());
      EXPECT_LE(p.violation(*lifted), 1e-6);
    }
    ++checked;
  }
  EXPECT_GT(checked, 20);
}
