#include <gtest/gtest.h>

#include "nasp/energy.hpp"
#include "nasp/generators.hpp"

#include <algorithm>

using namespace nasp;

namespace {

CountrySpec one_producer(double alpha, double beta, double lin, double quad, double cap, double tax_cap,
                         double price_cap) {
  CountrySpec c;
  c.name = "A";
  c.demand_intercept = alpha;
  c.demand_slope = beta;
  c.price_cap = price_cap;
  ProducerSpec p;
  p.linear_cost = lin;
  p.quadratic_cost = quad;
  p.capacity = cap;
  p.emission_cost = 10.0;
  p.tax_cap = tax_cap;
  c.producers = {p};
  return c;
}

EnergyReport solve_report(const EnergyInstance& inst, SolveReport* out = nullptr, bool inner = false) {
  const Nasp n = build_nasp(inst);
  SolveOptions o;
  o.time_limit = 300.0;
  const SolveReport r = inner ? inner_approximation(n, o) : full_enumeration(n, o);
  EXPECT_TRUE(r.status == SolveStatus::MNE || r.status == SolveStatus::PNE) << to_string(r.status);
  EXPECT_TRUE(r.certified);
  if (out) *out = r;
  return report(inst, r.profile);
}

/// Max over producers of the violation of their Cournot KKT conditions.
double follower_kkt_residual(const EnergyInstance& inst, const EnergyReport& rep) {
  double worst = 0.0;
  for (std::size_t ci = 0; ci < inst.countries.size(); ++ci) {
    const CountrySpec& c = inst.countries[ci];
    const CountryReport& cr = rep.countries[ci];
    double supply = 0.0;
    for (double q : cr.production) supply += q;
    for (std::size_t p = 0; p < c.producers.size(); ++p) {
      const ProducerSpec& s = c.producers[p];
      const double q = cr.production[p];
      const double grad = s.linear_cost + s.quadratic_cost * q + cr.taxes[p] - c.demand_intercept +
                          c.demand_slope * (supply + cr.imports - cr.exports) + c.demand_slope * q;
      const double scale = std::max(1.0, c.demand_intercept);
      double v = std::max(-q, q - s.capacity) / scale;
      if (q > 1e-7 * scale && q < s.capacity - 1e-7 * scale) v = std::max(v, std::abs(grad) / scale);
      if (q <= 1e-7 * scale) v = std::max(v, -grad / scale);
      if (q >= s.capacity - 1e-7 * scale) v = std::max(v, grad / scale);
      worst = std::max(worst, v);
    }
  }
  return worst;
}

}  // namespace

TEST(Energy, UntaxedMonopolyMatchesFirstOrderCondition) {
  // q = (300 - 100) / (0 + 2 * 0.5) = 200, price 300 - 0.5 * 200 = 200.
  EnergyInstance inst;
  inst.countries = {one_producer(300, 0.5, 100, 0, 1000, 0, 250)};
  const EnergyReport r = solve_report(inst);
  EXPECT_NEAR(r.countries[0].production[0], 200.0, 1e-6);
  EXPECT_NEAR(r.countries[0].domestic_price, 200.0, 1e-6);
  EXPECT_NEAR(r.total_emission, 10.0 * 200.0, 1e-5);
  EXPECT_NEAR(r.trade_volume, 0.0, 1e-9);
}

TEST(Energy, QuadraticCostAndCapacityClip) {
  EnergyInstance inst;
  inst.countries = {one_producer(300, 0.5, 100, 0.5, 1000, 0, 270)};
  EXPECT_NEAR(solve_report(inst).countries[0].production[0], 200.0 / 1.5, 1e-6);
  inst.countries = {one_producer(300, 0.5, 100, 0.5, 100, 0, 270)};
  const EnergyReport r = solve_report(inst);
  EXPECT_NEAR(r.countries[0].production[0], 100.0, 1e-6);
  EXPECT_NEAR(r.countries[0].domestic_price, 250.0, 1e-6);
}

TEST(Energy, EmissionMinimizerTaxesUntilPriceCapBinds) {
  // Tax t gives q = 200 - t; price <= 250 needs q >= 100, so t = 100.
  EnergyInstance inst;
  inst.countries = {one_producer(300, 0.5, 100, 0, 1000, 150, 250)};
  const EnergyReport r = solve_report(inst);
  EXPECT_NEAR(r.countries[0].taxes[0], 100.0, 1e-6);
  EXPECT_NEAR(r.countries[0].production[0], 100.0, 1e-6);
  EXPECT_NEAR(r.countries[0].domestic_price, 250.0, 1e-6);
}

TEST(Energy, TaxCapLimitsTheTax) {
  EnergyInstance inst;
  inst.countries = {one_producer(300, 0.5, 100, 0, 1000, 40, 250)};
  const EnergyReport r = solve_report(inst);
  EXPECT_NEAR(r.countries[0].taxes[0], 40.0, 1e-6);
  EXPECT_NEAR(r.countries[0].production[0], 160.0, 1e-6);
}

TEST(Energy, CarbonAndSingleParadigmsLinkTaxes) {
  CountrySpec c = one_producer(300, 0.5, 100, 0.2, 1000, 300, 260);
  ProducerSpec dirty = c.producers[0];
  dirty.emission_cost = 30.0;
  c.producers.push_back(dirty);
  for (TaxParadigm p : {TaxParadigm::Carbon, TaxParadigm::Single}) {
    c.paradigm = p;
    EnergyInstance inst;
    inst.countries = {c};
    const EnergyReport r = solve_report(inst);
    const std::vector<double>& t = r.countries[0].taxes;
    if (p == TaxParadigm::Single) EXPECT_NEAR(t[0], t[1], 1e-6);
    if (p == TaxParadigm::Carbon) EXPECT_NEAR(t[0] * 30.0, t[1] * 10.0, 1e-6);
    EXPECT_LE(r.countries[0].domestic_price, c.price_cap + 1e-6);
  }
}

TEST(Energy, LayoutCountsVariables) {
  EnergyInstance inst;
  CountrySpec a = one_producer(300, 0.5, 100, 0, 1000, 0, 250);
  a.producers.push_back(a.producers[0]);
  a.paradigm = TaxParadigm::Carbon;
  a.tax_revenue = 1;
  inst.countries = {a, a, a};
  inst.trade = true;
  const std::vector<CountryLayout> L = energy_layout(inst);
  // 2 taxes, 1 ghg, 2 imports, 1 export, 2 revenues, then 2 productions.
  EXPECT_EQ(L[0].nx, 8);
  EXPECT_EQ(L[0].strategy, 10);
  EXPECT_EQ(L[1].partners, (std::vector<std::size_t>{0, 2}));
  const Nasp n = build_nasp(inst);
  EXPECT_EQ(n.num_prices(), 1);
  EXPECT_EQ(n.market_G.row(0).sum(), 3.0);  // six imports minus three exports
}

TEST(Energy, InvalidInstancesAreRejected) {
  EnergyInstance inst;
  EXPECT_THROW(build_nasp(inst), Error);
  inst.countries = {one_producer(300, 0.5, 100, 0, 1000, 0, 250)};
  inst.trade = true;
  EXPECT_THROW(build_nasp(inst), Error);
  inst.trade = false;
  inst.countries[0].demand_slope = 0.0;
  EXPECT_THROW(build_nasp(inst), Error);
  inst.countries[0] = one_producer(300, 0.5, 100, 0, 1000, 0, 300);
  EXPECT_THROW(build_nasp(inst), Error);
  inst.countries[0] = one_producer(300, 0.5, -1, 0, 1000, 0, 250);
  EXPECT_THROW(build_nasp(inst), Error);
}

TEST(Energy, ReportRejectsMismatchedProfile) {
  EnergyInstance inst;
  inst.countries = {one_producer(300, 0.5, 100, 0, 1000, 0, 250)};
  MixedProfile p;
  try {
    report(inst, p);
    FAIL() << "expected ProfileMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ProfileMismatch);
  }
}

TEST(Energy, ZeroProductionReportsZeroEmission) {
  EnergyInstance inst;
  inst.countries = {one_producer(300, 0.5, 100, 0, 1000, 0, 250)};
  const Nasp n = build_nasp(inst);
  MixedProfile p;
  SupportEntry e;
  e.point = Vector::Zero(leader_feasible_set(n.leaders[0]).dim());
  e.probability = 1.0;
  p.supports = {{e}};
  const EnergyReport r = report(inst, p);
  EXPECT_EQ(r.total_emission, 0.0);
  EXPECT_EQ(r.trade_volume, 0.0);
  EXPECT_EQ(r.countries[0].domestic_price, 300.0);
  const std::string csv = report_csv(r);
  EXPECT_EQ(csv.rfind("country,production,domestic_price,imports,exports,emission\n", 0), 0u);
}

TEST(Energy, SymmetricCountriesTradeNothingNet) {
  EnergyInstance inst;
  CountrySpec a = one_producer(300, 0.5, 100, 0.2, 1000, 100, 250);
  CountrySpec b = a;
  b.name = "B";
  inst.countries = {a, b};
  inst.trade = true;
  const EnergyReport r = solve_report(inst);
  for (const CountryReport& c : r.countries) EXPECT_NEAR(c.imports - c.exports, 0.0, 1e-5);
  EXPECT_NEAR(r.countries[0].domestic_price, r.countries[1].domestic_price, 1e-5);
  EXPECT_NEAR(r.countries[0].emission, r.countries[1].emission, 1e-5);
}

// Property: certified profiles of generated instances satisfy the followers'
// KKT conditions, the price cap, market clearing and the McCormick envelope.
TEST(EnergyProperty, GeneratedInstancesRespectModelInvariants) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    cfg.followers_min = cfg.followers_max = 2;
    cfg.trade = seed % 2 == 0;
    cfg.tax_revenue = seed < 4 ? 1 : 0;
    const EnergyInstance inst = gen_energy(cfg);
    SolveReport sr;
    const EnergyReport r = solve_report(inst, &sr, true);
    if (sr.status != SolveStatus::PNE && sr.status != SolveStatus::MNE) continue;
    if (sr.profile.is_pure()) EXPECT_LE(follower_kkt_residual(inst, r), 1e-7) << seed;
    double imports = 0.0, exports = 0.0;
    for (std::size_t ci = 0; ci < inst.countries.size(); ++ci) {
      EXPECT_LE(r.countries[ci].domestic_price, inst.countries[ci].price_cap + 1e-6) << seed;
      imports += r.countries[ci].imports;
      exports += r.countries[ci].exports;
    }
    EXPECT_NEAR(imports, exports, 1e-6 * std::max(1.0, imports));
    if (cfg.tax_revenue) {
      const Nasp n = build_nasp(inst);
      const std::vector<CountryLayout> L = energy_layout(inst);
      for (std::size_t ci = 0; ci < inst.countries.size(); ++ci)
        for (const SupportEntry& e : sr.profile.supports[ci])
          for (std::size_t p = 0; p < inst.countries[ci].producers.size(); ++p) {
            const ProducerSpec& s = inst.countries[ci].producers[p];
            const double w = e.point(L[ci].revenues + static_cast<Index>(p));
            const double t = e.point(L[ci].taxes + static_cast<Index>(p));
            const double q = e.point(L[ci].production + static_cast<Index>(p));
            EXPECT_GE(w, std::max(0.0, s.tax_cap * q + s.capacity * t - s.tax_cap * s.capacity) - 1e-6);
            EXPECT_LE(w, std::min(s.tax_cap * q, s.capacity * t) + 1e-6);
          }
    }
  }
}
