#pragma once

#include "nasp/complementarity.hpp"

namespace nasp {

/// min  ½ yᵀQy + (c + C [y_-i; π] + G p)ᵀ y
/// s.t. A y <= b + H p,  E y = f + He p
///
/// y_-i is the concatenation of the other players' variables in game order
/// and π the market prices. p is an outer parameter (a leader's decision);
/// the parameter matrices may be left empty when the game has none.
struct QuadraticPlayer {
  Matrix Q;
  Vector c;
  Matrix C;
  Polyhedron feasible;
  Matrix param_obj;
  Matrix param_rhs;
  Matrix param_eq_rhs;

  Index dim() const { return c.size(); }
};

/// Players plus optional market clearing  G Y = h  over the concatenated
/// player variables Y, whose prices π are the multipliers of a fictitious
/// player minimizing πᵀ(G Y - h) over free π.
struct FacileNashGame {
  std::vector<QuadraticPlayer> players;
  Index param_dim = 0;
  Matrix market_G;
  Vector market_h;

  Index num_prices() const { return market_h.size(); }
  Index total_dim() const;
  Index offset(std::size_t player) const;
  /// Fills empty parameter blocks with zeros, then checks every shape.
  void normalize();
  void validate() const;
};

/// Variable layout of kkt_lcp:  [p, y_1 .. y_n, π, λ_1 .. λ_n, ν_1 .. ν_n].
struct KktLayout {
  Index param_offset = 0;
  Index players_offset = 0;
  Index price_offset = 0;
  std::vector<Index> lambda_offset;
  std::vector<Index> nu_offset;
  Index dim = 0;
};

struct KktSystem {
  ComplementaritySet set;
  KktLayout layout;
};

/// Stationarity and equality rows are equalities; every inequality row of
/// every player contributes one pair λ ⊥ slack. p is left free.
KktSystem kkt_lcp(const FacileNashGame& game);

struct PneOptions {
  /// Minimized over the LCP set; indexes the concatenated player variables.
  std::optional<Vector> selection;
  /// Player-variable indices that must be 0 or 1.
  std::vector<Index> binary_vars;
  Deadline deadline;
};

struct PneResult {
  bool found = false;
  Vector players;  ///< concatenated player variables
  Vector prices;
  Vector lcp_point;
  std::size_t nodes = 0;
};

PneResult find_pne(const FacileNashGame& game, const PneOptions& opts = {});

/// Player i's objective at the joint point (parameter p, if any, in front).
double player_cost(const FacileNashGame& game, std::size_t i, const Vector& players,
                   const Vector& prices, const Vector& param = Vector());

/// Player i's optimal value with everyone else fixed; Unbounded as -inf.
double best_response_value(const FacileNashGame& game, std::size_t i, const Vector& players,
                           const Vector& prices, const Vector& param = Vector());

}  // namespace nasp
