#pragma once

#include "nasp/hull.hpp"
#include "nasp/nash.hpp"

namespace nasp {

/// A leader choosing x while its followers play a facile game parameterized
/// by x. `poly` constrains the leader's strategy (x, y) jointly.
struct StackelbergLeader {
  Index nx = 0;
  Polyhedron poly;
  FacileNashGame followers;

  Index strategy_dim() const { return nx + followers.total_dim(); }
};

/// Leader i minimizes (c_i + C_i [s_-i; π])ᵀ s_i over its feasible set,
/// where s is a strategy (x, y). Optional market clearing G S = h over the
/// concatenated strategies S has prices π.
struct Nasp {
  std::vector<StackelbergLeader> leaders;
  std::vector<Vector> c;
  std::vector<Matrix> C;
  Matrix market_G;
  Vector market_h;

  Index num_prices() const { return market_h.size(); }
  Index strategy_offset(std::size_t leader) const;
  Index total_strategy_dim() const;
  void validate() const;
};

/// Leader set over [x, y, follower prices, λ, ν]; the strategy is the prefix.
ComplementaritySet leader_feasible_set(const StackelbergLeader& l);

struct SupportEntry {
  Vector point;  ///< full leader-set point
  double probability = 0.0;
};

struct MixedProfile {
  std::vector<std::vector<SupportEntry>> supports;
  Vector prices;

  /// Probability-weighted strategy of leader i.
  Vector mean_strategy(const Nasp& n, std::size_t i) const;
  bool is_pure() const;
};

enum class SolveStatus : std::uint8_t { MNE, PNE, NoEquilibrium, TimeLimit };
const char* to_string(SolveStatus s);

struct Deviation {
  std::size_t leader = 0;
  bool unbounded = false;
  Vector point;  ///< best response (anchor of the ray when unbounded)
  Vector ray;
  double value = 0.0;    ///< best-response payoff (-inf when unbounded)
  double current = 0.0;  ///< profile's expected payoff
};

struct SolveReport {
  SolveStatus status = SolveStatus::NoEquilibrium;
  MixedProfile profile;
  std::size_t iterations = 0;
  double seconds = 0.0;
  std::vector<std::size_t> pieces_total;
  std::vector<std::size_t> pieces_used;
  std::vector<double> payoffs;
  bool certified = false;
};

/// Leader i's expected payoff under the profile.
double expected_payoff(const Nasp& n, const MixedProfile& profile, std::size_t i);

/// Per leader, a strictly better response (by more than tol) or nothing.
std::vector<std::optional<Deviation>> deviation_check(const Nasp& n, const MixedProfile& profile,
                                                      double tol = Tolerances::deviation);

/// Checks profile shape, probabilities and membership of support points.
/// Throws ProfileMismatch with a reason.
void validate_profile(const Nasp& n, const MixedProfile& profile);

enum class Strategy : std::uint8_t { Sequential, ReverseSequential, Random };
const char* to_string(Strategy s);

struct SolveOptions {
  double time_limit = 1800.0;
  bool select = false;  ///< minimize sum_i c_iᵀ s_i over equilibria
  Strategy strategy = Strategy::Sequential;
  std::size_t k = 1;
  std::uint64_t seed = 0;
  /// Initial inner-approximation pieces per leader; empty means first k.
  std::vector<std::vector<Encoding>> initial;
  /// Stop the inner approximation after the first restricted equilibrium,
  /// reporting it uncertified (used to inspect intermediate states).
  bool stop_before_deviation = false;
};

SolveReport full_enumeration(const Nasp& n, const SolveOptions& opts = {});
SolveReport inner_approximation(const Nasp& n, const SolveOptions& opts = {});
SolveReport pure_enumeration(const Nasp& n, const SolveOptions& opts = {});

/// Splits a lifted hull point of a leader into full-space support points.
std::vector<SupportEntry> decompose_mixed(const HullFormulation& hull, const Vector& lifted,
                                          const std::vector<Polyhedron>& original_pieces,
                                          const std::vector<Index>& keep);

}  // namespace nasp
