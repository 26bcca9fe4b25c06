#include "nasp/hull.hpp"

#include <algorithm>
#include <cmath>

namespace nasp {

MappedPiece MappedPiece::identity(Polyhedron p) {
  const Index n = p.dim();
  MappedPiece m{std::move(p), Matrix::Identity(n, n), Vector::Zero(n)};
  if (m.poly.E.cols() != n) m.poly.E.resize(0, n);
  return m;
}

HullFormulation balas_hull(const std::vector<Polyhedron>& pieces) {
  std::vector<MappedPiece> mapped;
  mapped.reserve(pieces.size());
  for (const Polyhedron& p : pieces) mapped.push_back(MappedPiece::identity(p));
  return balas_hull(std::move(mapped));
}

HullFormulation balas_hull(std::vector<MappedPiece> pieces) {
  if (pieces.empty()) fail(ErrorCode::EmptyPieceList, "hull of zero pieces");
  const Index xd = pieces.front().image_dim();
  for (std::size_t j = 0; j < pieces.size(); ++j) {
    MappedPiece& p = pieces[j];
    p.poly.validate();
    if (p.poly.E.cols() != p.poly.dim()) p.poly.E.resize(0, p.poly.dim());
    if (p.image_dim() != xd || p.T.cols() != p.poly.dim() || p.t.size() != xd)
      fail(ErrorCode::DimensionMismatch, "piece " + std::to_string(j) + " has a different dimension");
    if (!is_feasible(p.poly))
      fail(ErrorCode::EmptyPieceList, "piece " + std::to_string(j) + " is empty");
  }

  HullFormulation h;
  h.piece_count = static_cast<Index>(pieces.size());
  h.x_dim = xd;
  Index off = 0;
  for (const MappedPiece& p : pieces) {
    h.u_offset.push_back(off);
    h.u_dim.push_back(p.poly.dim());
    off += p.poly.dim();
  }
  h.delta_offset = off;
  h.x_offset = off + h.piece_count;
  const Index n = h.x_offset + xd;

  Index n_le = h.piece_count, n_eq = 1 + xd;
  for (const MappedPiece& p : pieces) {
    n_le += p.poly.rows();
    n_eq += p.poly.eq_rows();
  }
  Polyhedron& L = h.lifted;
  L.A = Matrix::Zero(n_le, n);
  L.b = Vector::Zero(n_le);
  L.E = Matrix::Zero(n_eq, n);
  L.f = Vector::Zero(n_eq);

  Index r = 0, e = 0;
  for (Index j = 0; j < h.piece_count; ++j) {
    const MappedPiece& p = pieces[j];
    const Index uo = h.u_offset[j], dj = h.delta_offset + j;
    L.A.block(r, uo, p.poly.rows(), p.poly.dim()) = p.poly.A;
    L.A.block(r, dj, p.poly.rows(), 1) = -p.poly.b;
    r += p.poly.rows();
    L.E.block(e, uo, p.poly.eq_rows(), p.poly.dim()) = p.poly.E;
    L.E.block(e, dj, p.poly.eq_rows(), 1) = -p.poly.f;
    e += p.poly.eq_rows();
    L.A(r++, dj) = -1.0;
  }
  for (Index j = 0; j < h.piece_count; ++j) L.E(e, h.delta_offset + j) = 1.0;
  L.f(e++) = 1.0;
  for (Index k = 0; k < xd; ++k, ++e) {
    L.E(e, h.x_offset + k) = 1.0;
    for (Index j = 0; j < h.piece_count; ++j) {
      const MappedPiece& p = pieces[j];
      L.E.block(e, h.u_offset[j], 1, p.poly.dim()) = -p.T.row(k);
      L.E(e, h.delta_offset + j) = -p.t(k);
    }
  }
  h.pieces = std::move(pieces);
  return h;
}

namespace {

bool in_recession_cone(const MappedPiece& p, const Vector& dir, Vector& w) {
  const Index d = p.poly.dim();
  LinearProgram lp(d);
  for (Index i = 0; i < p.poly.rows(); ++i) lp.add_row(p.poly.A.row(i).transpose(), RowSense::Le, 0.0);
  for (Index i = 0; i < p.poly.eq_rows(); ++i) lp.add_row(p.poly.E.row(i).transpose(), RowSense::Eq, 0.0);
  for (Index k = 0; k < p.image_dim(); ++k) lp.add_row(p.T.row(k).transpose(), RowSense::Eq, dir(k));
  const LpOutcome res = solve_lp(lp);
  if (res.status != LpStatus::Optimal) return false;
  w = res.point;
  return true;
}

}  // namespace

std::vector<SupportPoint> decompose_hull_point(const HullFormulation& h, const Vector& lifted) {
  if (lifted.size() != h.dim()) fail(ErrorCode::DimensionMismatch, "lifted point dimension");
  std::vector<SupportPoint> kept;
  std::vector<Vector> residual;
  double total = 0.0;
  for (Index j = 0; j < h.piece_count; ++j) {
    const MappedPiece& p = h.pieces[j];
    const double dj = lifted(h.delta_offset + j);
    const Vector u = lifted.segment(h.u_offset[j], h.u_dim[j]);
    if (dj > Tolerances::weight) {
      kept.push_back(SupportPoint{p.T * (u / dj) + p.t, dj, j});
      total += dj;
    } else {
      const Vector r = p.T * u + p.t * std::max(dj, 0.0);
      if (r.size() && r.cwiseAbs().maxCoeff() > 1e-9) residual.push_back(r);
    }
  }
  if (kept.empty()) fail(ErrorCode::DegenerateWeight, "every hull weight is below the support threshold");

  for (const Vector& r : residual) {
    std::vector<std::size_t> order(kept.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return kept[a].weight > kept[b].weight; });
    for (std::size_t i : order) {
      Vector w;
      if (in_recession_cone(h.pieces[kept[i].piece], r, w)) {
        kept[i].x += r / kept[i].weight;
        break;
      }
    }
  }

  for (SupportPoint& s : kept) s.weight /= total;

  std::vector<SupportPoint> merged;
  for (const SupportPoint& s : kept) {
    auto same = std::find_if(merged.begin(), merged.end(), [&](const SupportPoint& m) {
      return (m.x - s.x).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, s.x.cwiseAbs().maxCoeff());
    });
    if (same == merged.end()) merged.push_back(s);
    else same->weight += s.weight;
  }
  return merged;
}

namespace {

constexpr double kElimTol = 1e-9;

struct Rows {
  Matrix A;
  Vector b;
};

// Rows of the inequality system that hold with equality on the whole set.
std::vector<char> implied_equalities(const Polyhedron& p) {
  const Index n = p.dim(), m = p.rows();
  std::vector<char> tight(static_cast<std::size_t>(m), 0);
  if (m == 0) return tight;
  std::vector<char> candidate(static_cast<std::size_t>(m), 1);
  for (;;) {
    LinearProgram lp(n + m);
    for (Index i = 0; i < m; ++i) {
      Vector row = Vector::Zero(n + m);
      row.head(n) = p.A.row(i).transpose();
      row(n + i) = 1.0;
      lp.add_row(row, RowSense::Le, p.b(i));
      lp.lower(n + i) = 0.0;
      lp.upper(n + i) = candidate[i] ? 1.0 : 0.0;
      if (candidate[i]) lp.objective(n + i) = -1.0;
    }
    for (Index i = 0; i < p.eq_rows(); ++i) {
      Vector row = Vector::Zero(n + m);
      row.head(n) = p.E.row(i).transpose();
      lp.add_row(row, RowSense::Eq, p.f(i));
    }
    const LpOutcome res = solve_lp(lp);
    if (res.status != LpStatus::Optimal) return tight;
    bool progress = false, any_zero = false;
    for (Index i = 0; i < m; ++i) {
      if (!candidate[i]) continue;
      if (res.point(n + i) > 1e-7) {
        candidate[i] = 0;
        progress = true;
      } else {
        any_zero = true;
      }
    }
    if (!any_zero || !progress) {
      for (Index i = 0; i < m; ++i) tight[i] = candidate[i] && res.point(n + i) <= 1e-7;
      return tight;
    }
  }
}

}  // namespace

MappedPiece compress_piece(const Polyhedron& p, const std::vector<Index>& keep) {
  p.validate();
  const Index n = p.dim();
  std::vector<char> is_keep(static_cast<std::size_t>(n), 0);
  for (Index k : keep) {
    if (k < 0 || k >= n) fail(ErrorCode::DimensionMismatch, "kept coordinate out of range");
    is_keep[k] = 1;
  }

  const std::vector<char> tight = implied_equalities(p);
  std::vector<Index> le_rows;
  Index n_eq = p.eq_rows();
  for (Index i = 0; i < p.rows(); ++i) {
    if (tight[i]) ++n_eq;
    else le_rows.push_back(i);
  }
  Matrix E(n_eq, n);
  Vector f(n_eq);
  {
    Index r = 0;
    for (Index i = 0; i < p.eq_rows(); ++i, ++r) {
      E.row(r) = p.E.row(i);
      f(r) = p.f(i);
    }
    for (Index i = 0; i < p.rows(); ++i)
      if (tight[i]) {
        E.row(r) = p.A.row(i);
        f(r++) = p.b(i);
      }
  }

  // Gauss-Jordan with non-kept columns preferred as pivots.
  std::vector<Index> pivot_col;
  std::vector<char> is_pivot(static_cast<std::size_t>(n), 0);
  Index rank = 0;
  for (int pass = 0; pass < 2; ++pass) {
    for (;;) {
      Index br = -1, bc = -1;
      double best = 0.0;
      for (Index r = rank; r < E.rows(); ++r)
        for (Index c = 0; c < n; ++c) {
          if (is_pivot[c] || (pass == 0) == static_cast<bool>(is_keep[c])) continue;
          const double scale = std::max(1.0, E.row(r).cwiseAbs().maxCoeff());
          const double v = std::abs(E(r, c)) / scale;
          if (v > kElimTol && v > best) { best = v; br = r; bc = c; }
        }
      if (br < 0) break;
      E.row(br).swap(E.row(rank));
      std::swap(f(br), f(rank));
      const double piv = E(rank, bc);
      E.row(rank) /= piv;
      f(rank) /= piv;
      E(rank, bc) = 1.0;
      for (Index r = 0; r < E.rows(); ++r) {
        if (r == rank) continue;
        const double factor = E(r, bc);
        if (factor == 0.0) continue;
        E.row(r) -= factor * E.row(rank);
        f(r) -= factor * f(rank);
        E(r, bc) = 0.0;
      }
      pivot_col.push_back(bc);
      is_pivot[bc] = 1;
      ++rank;
    }
  }

  // Every variable as an affine function of the free ones: y = S u + s0.
  std::vector<Index> free_vars;
  for (Index c = 0; c < n; ++c)
    if (!is_pivot[c]) free_vars.push_back(c);
  const Index nf = static_cast<Index>(free_vars.size());
  Matrix S = Matrix::Zero(n, nf);
  Vector s0 = Vector::Zero(n);
  for (Index j = 0; j < nf; ++j) S(free_vars[j], j) = 1.0;
  for (Index r = 0; r < rank; ++r) {
    const Index c = pivot_col[r];
    s0(c) = f(r);
    for (Index j = 0; j < nf; ++j) {
      const double v = E(r, free_vars[j]);
      S(c, j) = std::abs(v) > 1e-13 ? -v : 0.0;
    }
  }

  Rows rows;
  const Index nle = static_cast<Index>(le_rows.size());
  rows.A.resize(nle, nf);
  rows.b.resize(nle);
  for (Index i = 0; i < nle; ++i) {
    const auto a = p.A.row(le_rows[i]);
    rows.A.row(i) = a * S;
    rows.b(i) = p.b(le_rows[i]) - a.dot(s0);
  }
  for (Index i = 0; i < rows.A.rows(); ++i)
    for (Index j = 0; j < nf; ++j)
      if (std::abs(rows.A(i, j)) <= 1e-12 * std::max(1.0, rows.A.row(i).cwiseAbs().maxCoeff()))
        rows.A(i, j) = 0.0;

  Matrix T(static_cast<Index>(keep.size()), nf);
  Vector t(static_cast<Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    T.row(static_cast<Index>(k)) = S.row(keep[k]);
    t(static_cast<Index>(k)) = s0(keep[k]);
  }

  // Drop free variables that do not reach the image and are either absent
  // from every row or push every row the same way.
  std::vector<char> alive_row(static_cast<std::size_t>(nle), 1);
  std::vector<char> alive_col(static_cast<std::size_t>(nf), 1);
  for (bool changed = true; changed;) {
    changed = false;
    for (Index j = 0; j < nf; ++j) {
      if (!alive_col[j] || !T.col(j).isZero(0.0)) continue;
      bool pos = false, neg = false;
      for (Index i = 0; i < nle; ++i) {
        if (!alive_row[i]) continue;
        pos |= rows.A(i, j) > 0;
        neg |= rows.A(i, j) < 0;
      }
      if (pos && neg) continue;
      alive_col[j] = 0;
      for (Index i = 0; i < nle; ++i)
        if (alive_row[i] && rows.A(i, j) != 0.0) alive_row[i] = 0;
      changed = true;
    }
  }

  std::vector<Index> cols, rws;
  for (Index j = 0; j < nf; ++j)
    if (alive_col[j]) cols.push_back(j);
  for (Index i = 0; i < nle; ++i)
    if (alive_row[i]) rws.push_back(i);
  const Index nu = static_cast<Index>(cols.size());

  Polyhedron out(nu);
  std::vector<Vector> cand_a;
  std::vector<double> cand_b;
  for (Index i : rws) {
    Vector a(nu);
    for (Index j = 0; j < nu; ++j) a(j) = rows.A(i, cols[j]);
    if (a.isZero(0.0)) continue;
    cand_a.push_back(a);
    cand_b.push_back(rows.b(i));
  }

  // Redundancy: a row is dropped when the others already imply it.
  std::vector<char> kept(cand_a.size(), 1);
  for (std::size_t i = 0; i < cand_a.size(); ++i) {
    LinearProgram lp(nu);
    lp.objective = -cand_a[i];
    for (std::size_t r = 0; r < cand_a.size(); ++r)
      if (r != i && kept[r]) lp.add_row(cand_a[r], RowSense::Le, cand_b[r]);
    const LpOutcome res = solve_lp(lp);
    if (res.status == LpStatus::Optimal &&
        -res.value <= cand_b[i] + 1e-9 * std::max(1.0, std::abs(cand_b[i])))
      kept[i] = 0;
  }
  for (std::size_t i = 0; i < cand_a.size(); ++i)
    if (kept[i]) out.add_le(cand_a[i], cand_b[i]);

  MappedPiece m;
  m.poly = std::move(out);
  if (m.poly.E.cols() != nu) m.poly.E.resize(0, nu);
  m.T.resize(T.rows(), nu);
  for (Index j = 0; j < nu; ++j) m.T.col(j) = T.col(cols[j]);
  m.t = t;
  return m;
}

std::optional<Vector> lift_point(const Polyhedron& p, const std::vector<Index>& keep, const Vector& target) {
  p.validate();
  const Index n = p.dim(), k = static_cast<Index>(keep.size());
  if (target.size() != k) fail(ErrorCode::DimensionMismatch, "lift target length");
  // min sum s  s.t.  p,  |y_keep - target| <= s
  LinearProgram lp(n + k);
  for (Index i = 0; i < p.rows(); ++i) {
    Vector row = Vector::Zero(n + k);
    row.head(n) = p.A.row(i).transpose();
    lp.add_row(row, RowSense::Le, p.b(i));
  }
  for (Index i = 0; i < p.eq_rows(); ++i) {
    Vector row = Vector::Zero(n + k);
    row.head(n) = p.E.row(i).transpose();
    lp.add_row(row, RowSense::Eq, p.f(i));
  }
  for (Index j = 0; j < k; ++j) {
    Vector row = Vector::Zero(n + k);
    row(keep[j]) = 1.0;
    row(n + j) = -1.0;
    lp.add_row(row, RowSense::Le, target(j));
    row(keep[j]) = -1.0;
    lp.add_row(row, RowSense::Le, -target(j));
    lp.objective(n + j) = 1.0;
    lp.lower(n + j) = 0.0;
  }
  const LpOutcome res = solve_lp(lp);
  if (res.status != LpStatus::Optimal) return std::nullopt;
  const double scale = std::max(1.0, target.size() ? target.cwiseAbs().maxCoeff() : 0.0);
  if (res.value > 1e-6 * scale) return std::nullopt;
  Vector y = res.point.head(n);
  for (Index j = 0; j < k; ++j) y(keep[j]) = target(j);
  return y;
}

}  // namespace nasp
