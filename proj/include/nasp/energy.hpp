#pragma once

#include "nasp/nasp.hpp"

#include <string>

namespace nasp {

enum class TaxParadigm : std::uint8_t { Standard, Single, Carbon };
enum class ProducerClass : std::uint8_t { Green, Average, High };

const char* to_string(TaxParadigm p);
const char* to_string(ProducerClass c);
TaxParadigm parse_paradigm(const std::string& s);
ProducerClass parse_producer_class(const std::string& s);

struct ProducerSpec {
  double linear_cost = 0.0;
  double quadratic_cost = 0.0;
  double capacity = 0.0;
  double emission_cost = 0.0;
  double tax_cap = 0.0;
};

struct CountrySpec {
  std::string name;
  std::vector<ProducerSpec> producers;
  double demand_intercept = 0.0;
  double demand_slope = 1.0;
  /// Upper limit on the domestic price.
  double price_cap = 0.0;
  TaxParadigm paradigm = TaxParadigm::Standard;
  int tax_revenue = 0;
};

struct EnergyInstance {
  std::vector<CountrySpec> countries;
  bool trade = false;

  void validate() const;
};

/// Where each quantity sits inside a country's strategy vector
/// [taxes, ghg tax, imports per partner, exports, revenues | production].
struct CountryLayout {
  Index taxes = 0;
  Index ghg = -1;
  Index imports = -1;
  Index exports = -1;
  Index revenues = -1;
  Index production = 0;
  Index nx = 0;
  Index strategy = 0;
  std::vector<std::size_t> partners;
};

std::vector<CountryLayout> energy_layout(const EnergyInstance& inst);

/// One leader per country; producers are Cournot followers; with trade the
/// clearing price is the multiplier of sum(imports) = sum(exports).
Nasp build_nasp(const EnergyInstance& inst);

struct CountryReport {
  std::string name;
  std::vector<double> production;
  std::vector<double> taxes;
  double domestic_price = 0.0;
  double imports = 0.0;
  double exports = 0.0;
  double emission = 0.0;
};

struct EnergyReport {
  std::vector<CountryReport> countries;
  double trade_volume = 0.0;
  double total_emission = 0.0;
  double clearing_price = 0.0;
};

/// Evaluates the profile at its expectation.
EnergyReport report(const EnergyInstance& inst, const MixedProfile& profile);

std::string report_csv(const EnergyReport& r);

}  // namespace nasp
