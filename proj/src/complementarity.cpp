#include "nasp/complementarity.hpp"

#include <algorithm>
#include <cmath>

namespace nasp {

void ComplementaritySet::validate() const {
  base.validate();
  if (M.rows() != q.size() || M.rows() != num_compl())
    fail(ErrorCode::DimensionMismatch, "M rows, q length and complementarity count must agree");
  if (M.rows() > 0 && M.cols() != dim())
    fail(ErrorCode::DimensionMismatch, "M columns differ from ambient dimension");
  for (Index v : compl_vars)
    if (v < 0 || v >= dim()) fail(ErrorCode::DimensionMismatch, "complementarity index out of range");
}

void ComplementaritySet::add_pair(Index var, const Vector& row, double rhs) {
  if (row.size() != dim()) fail(ErrorCode::DimensionMismatch, "pair row length");
  if (M.cols() != dim()) M.resize(0, dim());
  M.conservativeResize(M.rows() + 1, Eigen::NoChange);
  M.row(M.rows() - 1) = row.transpose();
  q.conservativeResize(q.size() + 1);
  q(q.size() - 1) = rhs;
  compl_vars.push_back(var);
}

std::string to_string(const Encoding& e) {
  std::string s;
  s.reserve(e.size());
  for (auto bit : e) s.push_back(bit ? '1' : '0');
  return s;
}

Polyhedron polyhedral_relaxation(const ComplementaritySet& s) {
  s.validate();
  Polyhedron out = s.base;
  if (out.E.cols() != s.dim()) out.E.resize(0, s.dim());
  for (Index i = 0; i < s.num_compl(); ++i) {
    Vector unit = Vector::Zero(s.dim());
    unit(s.compl_vars[i]) = -1.0;
    out.add_le(unit, 0.0);
    out.add_le(-s.M.row(i).transpose(), s.q(i));
  }
  return out;
}

namespace {

void pin(Polyhedron& p, const ComplementaritySet& s, Index i, bool z_side) {
  if (z_side) {
    p.add_le(s.M.row(i).transpose(), -s.q(i));
  } else {
    Vector unit = Vector::Zero(s.dim());
    unit(s.compl_vars[i]) = 1.0;
    p.add_le(unit, 0.0);
  }
}

}  // namespace

Polyhedron selected_polyhedron(const ComplementaritySet& s, const Encoding& e) {
  if (static_cast<Index>(e.size()) != s.num_compl())
    fail(ErrorCode::EncodingLengthMismatch, "encoding has " + std::to_string(e.size()) +
                                                " bits, set has " + std::to_string(s.num_compl()) +
                                                " complementarities");
  Polyhedron p = polyhedral_relaxation(s);
  for (Index i = 0; i < s.num_compl(); ++i) pin(p, s, i, e[i] != 0);
  return p;
}

std::vector<Piece> enumerate_pieces(const ComplementaritySet& s, int cap_bits) {
  s.validate();
  if (s.num_compl() > cap_bits)
    fail(ErrorCode::TooManyComplementarities,
         std::to_string(s.num_compl()) + " complementarities exceed the cap of 2^" +
             std::to_string(cap_bits));
  std::vector<Piece> out;
  const Polyhedron relax = polyhedral_relaxation(s);
  Encoding code(static_cast<std::size_t>(s.num_compl()), 0);

  auto recurse = [&](auto&& self, Index depth, const Polyhedron& partial) -> void {
    if (!is_feasible(partial)) return;
    if (depth == s.num_compl()) {
      out.push_back(Piece{code, partial});
      return;
    }
    for (std::uint8_t bit : {std::uint8_t{0}, std::uint8_t{1}}) {
      Polyhedron child = partial;
      pin(child, s, depth, bit != 0);
      code[depth] = bit;
      self(self, depth + 1, child);
    }
    code[depth] = 0;
  };
  recurse(recurse, 0, relax);
  return out;
}

bool contains(const ComplementaritySet& s, const Vector& x, double tol) {
  if (x.size() != s.dim()) fail(ErrorCode::DimensionMismatch, "point dimension");
  if (s.base.violation(x) > tol) return false;
  const Vector z = s.z(x);
  for (Index i = 0; i < s.num_compl(); ++i) {
    const double xi = x(s.compl_vars[i]);
    if (xi < -tol || z(i) < -tol) return false;
    if (xi * z(i) > tol) return false;
  }
  return true;
}

namespace {

struct Node {
  std::vector<std::int8_t> pair;  // -1 free, 0 x-side pinned, 1 z-side pinned
  std::vector<std::int8_t> bin;   // -1 free, 0 at most 0, 1 at least 1
};

constexpr std::size_t kDeadlineStride = 1000;

}  // namespace

SetOutcome optimize_over_set(const ComplementaritySet& s, const Vector& c, const BranchOptions& opts) {
  s.validate();
  if (c.size() != s.dim()) fail(ErrorCode::DimensionMismatch, "objective length");
  for (Index v : opts.binary_vars)
    if (v < 0 || v >= s.dim()) fail(ErrorCode::DimensionMismatch, "binary index out of range");

  const Index nc = s.num_compl();
  const bool first_only = opts.first_feasible || c.isZero(0.0);

  LinearProgram root(s.dim());
  root.objective = c;
  root.add_polyhedron(polyhedral_relaxation(s));

  SetOutcome out;
  bool have_incumbent = false;
  std::vector<Node> stack;
  stack.push_back(Node{std::vector<std::int8_t>(static_cast<std::size_t>(nc), -1),
                       std::vector<std::int8_t>(opts.binary_vars.size(), -1)});

  while (!stack.empty()) {
    if (out.nodes % kDeadlineStride == 0) opts.deadline.check();
    Node node = std::move(stack.back());
    stack.pop_back();
    ++out.nodes;

    LinearProgram lp = root;
    bool all_pinned = true;
    for (Index i = 0; i < nc; ++i) {
      if (node.pair[i] < 0) {
        all_pinned = false;
        continue;
      }
      if (node.pair[i] == 0) {
        const Index v = s.compl_vars[i];
        lp.upper(v) = std::min(lp.upper(v), 0.0);
      } else {
        lp.add_row(s.M.row(i).transpose(), RowSense::Le, -s.q(i));
      }
    }
    for (std::size_t k = 0; k < opts.binary_vars.size(); ++k) {
      const Index v = opts.binary_vars[k];
      if (node.bin[k] == 0) lp.upper(v) = std::min(lp.upper(v), 0.0);
      if (node.bin[k] == 1) lp.lower(v) = std::max(lp.lower(v), 1.0);
    }

    const LpOutcome res = solve_lp(lp);
    if (res.status == LpStatus::Infeasible) continue;

    const Vector& at = res.status == LpStatus::Optimal ? res.point : res.anchor;
    if (res.status == LpStatus::Optimal && have_incumbent &&
        res.value >= out.value - 1e-9 * std::max(1.0, std::abs(out.value)))
      continue;

    const Vector z = s.z(at);
    Index branch_pair = -1;
    double worst = Tolerances::comp;
    for (Index i = 0; i < nc; ++i) {
      if (node.pair[i] >= 0) continue;
      const double prod = std::max(at(s.compl_vars[i]), 0.0) * std::max(z(i), 0.0);
      if (prod > worst) {
        worst = prod;
        branch_pair = i;
      }
    }
    // The side already closer to zero is pinned in the child explored first.
    bool pin_var_first = true;
    if (branch_pair >= 0) pin_var_first = at(s.compl_vars[branch_pair]) <= z(branch_pair);

    if (res.status == LpStatus::Unbounded) {
      if (all_pinned) {
        out.status = LpStatus::Unbounded;
        out.ray = res.ray;
        out.anchor = res.anchor;
        out.point.resize(0);
        return out;
      }
      if (branch_pair < 0)
        for (Index i = 0; i < nc && branch_pair < 0; ++i)
          if (node.pair[i] < 0) branch_pair = i;
    }

    std::ptrdiff_t branch_bin = -1;
    if (branch_pair < 0) {
      double frac = Tolerances::feas;
      for (std::size_t k = 0; k < opts.binary_vars.size(); ++k) {
        if (node.bin[k] >= 0) continue;
        const double v = at(opts.binary_vars[k]);
        const double d = std::min(v, 1.0 - v);
        if (d > frac) {
          frac = d;
          branch_bin = static_cast<std::ptrdiff_t>(k);
        }
      }
    }

    if (branch_pair >= 0 || branch_bin >= 0) {
      Node one = node;
      Node zero = std::move(node);
      if (branch_pair >= 0) {
        one.pair[branch_pair] = 1;
        zero.pair[branch_pair] = 0;
      } else {
        one.bin[branch_bin] = 1;
        zero.bin[branch_bin] = 0;
        pin_var_first = at(opts.binary_vars[branch_bin]) <= 0.5;
      }
      if (pin_var_first) std::swap(one, zero);
      stack.push_back(std::move(zero));
      stack.push_back(std::move(one));
      continue;
    }

    // Complementary leaf.
    out.status = LpStatus::Optimal;
    out.point = res.point;
    out.value = res.value;
    have_incumbent = true;
    if (first_only) return out;
  }
  return out;
}

}  // namespace nasp
