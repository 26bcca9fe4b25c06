#include "nasp/nash.hpp"

#include <Eigen/Eigenvalues>

namespace nasp {

Index FacileNashGame::total_dim() const {
  Index n = 0;
  for (const QuadraticPlayer& p : players) n += p.dim();
  return n;
}

Index FacileNashGame::offset(std::size_t player) const {
  Index n = 0;
  for (std::size_t i = 0; i < player; ++i) n += players[i].dim();
  return n;
}

void FacileNashGame::normalize() {
  const Index total = total_dim();
  for (QuadraticPlayer& p : players) {
    const Index n = p.dim();
    if (p.Q.size() == 0) p.Q = Matrix::Zero(n, n);
    const Index rivals = total - n + num_prices();
    if (p.C.size() == 0) p.C = Matrix::Zero(n, rivals);
    if (p.feasible.A.cols() != n && p.feasible.rows() == 0) p.feasible.A.resize(0, n);
    if (p.feasible.E.cols() != n && p.feasible.eq_rows() == 0) p.feasible.E.resize(0, n);
    if (p.param_obj.size() == 0) p.param_obj = Matrix::Zero(n, param_dim);
    if (p.param_rhs.size() == 0) p.param_rhs = Matrix::Zero(p.feasible.rows(), param_dim);
    if (p.param_eq_rhs.size() == 0) p.param_eq_rhs = Matrix::Zero(p.feasible.eq_rows(), param_dim);
  }
  if (market_G.size() == 0) market_G = Matrix::Zero(market_h.size(), total);
}

void FacileNashGame::validate() const {
  const Index total = total_dim();
  for (std::size_t i = 0; i < players.size(); ++i) {
    const QuadraticPlayer& p = players[i];
    const Index n = p.dim();
    const std::string who = "player " + std::to_string(i) + ": ";
    p.feasible.validate();
    if (p.Q.rows() != n || p.Q.cols() != n) fail(ErrorCode::DimensionMismatch, who + "Q shape");
    if (p.C.rows() != n || p.C.cols() != total - n + num_prices())
      fail(ErrorCode::DimensionMismatch, who + "C shape");
    if (p.feasible.dim() != n) fail(ErrorCode::DimensionMismatch, who + "feasible set dimension");
    if (p.param_obj.rows() != n || p.param_obj.cols() != param_dim)
      fail(ErrorCode::DimensionMismatch, who + "parameter objective shape");
    if (p.param_rhs.rows() != p.feasible.rows() || p.param_rhs.cols() != param_dim)
      fail(ErrorCode::DimensionMismatch, who + "parameter rhs shape");
    if (p.param_eq_rhs.rows() != p.feasible.eq_rows() || p.param_eq_rhs.cols() != param_dim)
      fail(ErrorCode::DimensionMismatch, who + "parameter equality rhs shape");
    if (n > 0) {
      const Matrix sym = 0.5 * (p.Q + p.Q.transpose());
      const double floor = Eigen::SelfAdjointEigenSolver<Matrix>(sym, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
      if (floor < -1e-8) fail(ErrorCode::NonPsdObjective, who + "smallest eigenvalue " + std::to_string(floor));
    }
  }
  if (market_G.rows() != market_h.size() || (market_G.rows() > 0 && market_G.cols() != total))
    fail(ErrorCode::DimensionMismatch, "market clearing shape");
}

KktSystem kkt_lcp(const FacileNashGame& input) {
  FacileNashGame game = input;
  game.normalize();
  game.validate();

  KktSystem out;
  KktLayout& L = out.layout;
  const Index total = game.total_dim();
  const Index np = game.num_prices();
  L.param_offset = 0;
  L.players_offset = game.param_dim;
  L.price_offset = L.players_offset + total;
  Index next = L.price_offset + np;
  for (const QuadraticPlayer& p : game.players) {
    L.lambda_offset.push_back(next);
    next += p.feasible.rows();
  }
  for (const QuadraticPlayer& p : game.players) {
    L.nu_offset.push_back(next);
    next += p.feasible.eq_rows();
  }
  L.dim = next;

  ComplementaritySet& s = out.set;
  s = ComplementaritySet(L.dim);
  Vector row(L.dim);
  for (std::size_t i = 0; i < game.players.size(); ++i) {
    const QuadraticPlayer& p = game.players[i];
    const Index n = p.dim();
    const Index own = L.players_offset + game.offset(i);
    const Matrix Qs = 0.5 * (p.Q + p.Q.transpose());
    for (Index k = 0; k < n; ++k) {
      row.setZero();
      row.segment(L.param_offset, game.param_dim) = p.param_obj.row(k).transpose();
      row.segment(own, n) = Qs.row(k).transpose();
      Index col = 0;
      for (std::size_t j = 0; j < game.players.size(); ++j) {
        if (j == i) continue;
        const Index nj = game.players[j].dim();
        row.segment(L.players_offset + game.offset(j), nj) += p.C.block(k, col, 1, nj).transpose();
        col += nj;
      }
      row.segment(L.price_offset, np) = p.C.block(k, col, 1, np).transpose();
      row.segment(L.lambda_offset[i], p.feasible.rows()) = p.feasible.A.col(k);
      row.segment(L.nu_offset[i], p.feasible.eq_rows()) = p.feasible.E.col(k);
      s.base.add_eq(row, -p.c(k));
    }
    for (Index r = 0; r < p.feasible.eq_rows(); ++r) {
      row.setZero();
      row.segment(own, n) = p.feasible.E.row(r).transpose();
      row.segment(L.param_offset, game.param_dim) = -p.param_eq_rhs.row(r).transpose();
      s.base.add_eq(row, p.feasible.f(r));
    }
    // λ ⊥ b + H p - A y
    for (Index r = 0; r < p.feasible.rows(); ++r) {
      row.setZero();
      row.segment(own, n) = -p.feasible.A.row(r).transpose();
      row.segment(L.param_offset, game.param_dim) = p.param_rhs.row(r).transpose();
      s.add_pair(L.lambda_offset[i] + r, row, p.feasible.b(r));
    }
  }
  for (Index r = 0; r < np; ++r) {
    row.setZero();
    row.segment(L.players_offset, total) = game.market_G.row(r).transpose();
    s.base.add_eq(row, game.market_h(r));
  }
  return out;
}

PneResult find_pne(const FacileNashGame& game, const PneOptions& opts) {
  const KktSystem sys = kkt_lcp(game);
  const KktLayout& L = sys.layout;
  const Index total = game.total_dim();

  Vector obj = Vector::Zero(L.dim);
  if (opts.selection) {
    if (opts.selection->size() != total) fail(ErrorCode::DimensionMismatch, "selection objective length");
    obj.segment(L.players_offset, total) = *opts.selection;
  }
  BranchOptions bo;
  bo.deadline = opts.deadline;
  for (Index v : opts.binary_vars) {
    if (v < 0 || v >= total) fail(ErrorCode::DimensionMismatch, "binary variable out of range");
    bo.binary_vars.push_back(L.players_offset + v);
  }
  const SetOutcome res = optimize_over_set(sys.set, obj, bo);

  PneResult out;
  out.nodes = res.nodes;
  if (res.status == LpStatus::Infeasible) return out;
  out.found = true;
  out.lcp_point = res.status == LpStatus::Optimal ? res.point : res.anchor;
  out.players = out.lcp_point.segment(L.players_offset, total);
  out.prices = out.lcp_point.segment(L.price_offset, game.num_prices());
  return out;
}

namespace {

// Linear term of player i with everyone else fixed.
Vector folded_linear(const FacileNashGame& game, const QuadraticPlayer& p, std::size_t i,
                     const Vector& players, const Vector& prices, const Vector& param) {
  Vector rivals(p.C.cols());
  Index col = 0;
  for (std::size_t j = 0; j < game.players.size(); ++j) {
    if (j == i) continue;
    const Index nj = game.players[j].dim();
    rivals.segment(col, nj) = players.segment(game.offset(j), nj);
    col += nj;
  }
  rivals.tail(game.num_prices()) = prices;
  Vector lin = p.c + p.C * rivals;
  if (game.param_dim > 0) lin += p.param_obj * param;
  return lin;
}

}  // namespace

double player_cost(const FacileNashGame& input, std::size_t i, const Vector& players,
                   const Vector& prices, const Vector& param) {
  FacileNashGame game = input;
  game.normalize();
  const QuadraticPlayer& p = game.players.at(i);
  const Vector y = players.segment(game.offset(i), p.dim());
  return 0.5 * y.dot(p.Q * y) + folded_linear(game, p, i, players, prices, param).dot(y);
}

double best_response_value(const FacileNashGame& input, std::size_t i, const Vector& players,
                           const Vector& prices, const Vector& param) {
  FacileNashGame game = input;
  game.normalize();
  const QuadraticPlayer& p = game.players.at(i);

  QuadraticPlayer solo;
  solo.Q = p.Q;
  solo.c = folded_linear(game, p, i, players, prices, param);
  solo.C = Matrix::Zero(p.dim(), 0);
  solo.feasible = p.feasible;
  if (game.param_dim > 0) {
    solo.feasible.b += p.param_rhs * param;
    solo.feasible.f += p.param_eq_rhs * param;
  }
  if (!is_feasible(solo.feasible)) return kInf;
  FacileNashGame one;
  one.players.push_back(solo);
  const PneResult r = find_pne(one);
  if (!r.found) return -kInf;
  const Vector& y = r.players;
  return 0.5 * y.dot(solo.Q * y) + solo.c.dot(y);
}

}  // namespace nasp
