#pragma once

#include "nasp/energy.hpp"
#include "nasp/nasp.hpp"
#include "nasp/rng.hpp"

namespace nasp {

/// Latin x >= 0 minimizing xi*x against a Greek leader over xi in [-5,5]
/// whose follower picks chi = max(-xi-1, xi-1), chi >= 0. The Greek payoff is
/// x*xi, or -x*xi when `flipped`.
Nasp remark2_game(bool flipped);

/// Two leaders on {0,1}-valued simplex strategies (enforced by followers)
/// playing matching pennies.
Nasp example1_game();

/// Is there an integer s with p <= s < t that no subset of q sums to?
/// Requires t - p = 2^r with 1 <= r <= |q|.
struct SubsetSumInterval {
  std::vector<long> q;
  long p = 0;
  long t = 0;
  long r = 0;

  void validate() const;
  bool is_yes() const;
};

/// With `exact_pick` the Latin leader sets exactly r of the middle block
/// x_{k+1..P} to one instead of at most r.
Nasp gen_pne_hardness(const SubsetSumInterval& d, bool exact_pick = false);
Nasp gen_mne_hardness(const SubsetSumInterval& d);

/// One leader over (h, y, x) whose six-variable follower z realizes
/// {h = x, y = 1} ∪ {h = 0, y = 0} with x >= 0.
StackelbergLeader s_gadget_leader();

/// Two leaders, 1-3 boxed variables each, one LP follower with a single
/// variable and two rows, integer payoffs in [-5,5].
Nasp random_trivial_nasp(Lcg64& rng);

/// Games with no MNE: a leader restricted to {0} ∪ {1} with a strict
/// preference for 0 paired with a rival whose best response is unbounded
/// unless the first plays 1.
Nasp no_equilibrium_nasp(Lcg64& rng);

struct GenConfig {
  std::uint64_t seed = 0;
  std::size_t countries = 2;
  std::size_t followers_min = 3;
  std::size_t followers_max = 3;
  std::vector<double> capacities = {50, 100, 130, 170, 200, 1000, 1050, 20000};
  std::vector<double> emission_costs = {25, 50, 100, 200, 300, 500, 550, 600};
  std::vector<double> linear_costs = {150, 200, 220, 250, 275, 290, 300};
  std::vector<double> quadratic_costs = {0, 0.1, 0.2, 0.3, 0.5, 0.55, 0.6};
  std::vector<double> tax_caps = {0, 50, 100, 150, 200, 250, 275, 300};
  std::vector<double> demand_alpha = {275, 300, 325, 350, 375, 450};
  std::vector<double> demand_beta = {0.5, 0.6, 0.7, 0.75, 0.8, 0.9};
  std::vector<double> price_cap_fraction = {0.8, 0.85, 0.9, 0.95};
  std::vector<TaxParadigm> paradigms = {TaxParadigm::Standard, TaxParadigm::Single, TaxParadigm::Carbon};
  /// Producer classes to draw from; empty means all three.
  std::vector<ProducerClass> classes;
  bool trade = true;
  int tax_revenue = 0;

  void validate() const;
};

EnergyInstance gen_energy(const GenConfig& cfg);

}  // namespace nasp
