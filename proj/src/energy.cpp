#include "nasp/energy.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace nasp {

const char* to_string(TaxParadigm p) {
  switch (p) {
    case TaxParadigm::Standard: return "standard";
    case TaxParadigm::Single: return "single";
    case TaxParadigm::Carbon: return "carbon";
  }
  return "unknown";
}

const char* to_string(ProducerClass c) {
  switch (c) {
    case ProducerClass::Green: return "green";
    case ProducerClass::Average: return "average";
    case ProducerClass::High: return "high";
  }
  return "unknown";
}

TaxParadigm parse_paradigm(const std::string& s) {
  if (s == "standard") return TaxParadigm::Standard;
  if (s == "single") return TaxParadigm::Single;
  if (s == "carbon") return TaxParadigm::Carbon;
  fail(ErrorCode::InvalidInstance, "unknown tax paradigm '" + s + "'");
}

ProducerClass parse_producer_class(const std::string& s) {
  if (s == "green") return ProducerClass::Green;
  if (s == "average") return ProducerClass::Average;
  if (s == "high") return ProducerClass::High;
  fail(ErrorCode::InvalidConfig, "unknown producer class '" + s + "'");
}

void EnergyInstance::validate() const {
  if (countries.empty()) fail(ErrorCode::InvalidInstance, "an energy instance needs at least one country");
  if (trade && countries.size() < 2) fail(ErrorCode::InvalidInstance, "trade requires at least two countries");
  for (const CountrySpec& c : countries) {
    const std::string who = "country '" + c.name + "': ";
    if (c.producers.empty()) fail(ErrorCode::InvalidInstance, who + "no producers");
    if (!(c.demand_slope > 0)) fail(ErrorCode::InvalidInstance, who + "demand slope must be positive");
    if (!(c.price_cap >= 0) || !(c.demand_intercept > c.price_cap))
      fail(ErrorCode::InvalidInstance, who + "need demand intercept > price cap >= 0");
    if (c.tax_revenue != 0 && c.tax_revenue != 1) fail(ErrorCode::InvalidInstance, who + "tax_revenue must be 0 or 1");
    for (const ProducerSpec& p : c.producers) {
      if (!(p.linear_cost >= 0 && p.quadratic_cost >= 0 && p.capacity >= 0 && p.emission_cost >= 0 &&
            p.tax_cap >= 0))
        fail(ErrorCode::InvalidInstance, who + "producer parameters must be nonnegative and finite");
      if (!std::isfinite(p.capacity) || !std::isfinite(p.tax_cap))
        fail(ErrorCode::InvalidInstance, who + "capacities and tax caps must be finite");
    }
  }
}

std::vector<CountryLayout> energy_layout(const EnergyInstance& inst) {
  std::vector<CountryLayout> out;
  for (std::size_t ci = 0; ci < inst.countries.size(); ++ci) {
    const CountrySpec& c = inst.countries[ci];
    const Index P = static_cast<Index>(c.producers.size());
    CountryLayout L;
    Index next = 0;
    L.taxes = next;
    next += P;
    if (c.paradigm == TaxParadigm::Carbon) L.ghg = next++;
    if (inst.trade) {
      for (std::size_t o = 0; o < inst.countries.size(); ++o)
        if (o != ci) L.partners.push_back(o);
      L.imports = next;
      next += static_cast<Index>(L.partners.size());
      L.exports = next++;
    }
    if (c.tax_revenue) {
      L.revenues = next;
      next += P;
    }
    L.nx = next;
    L.production = next;
    L.strategy = next + P;
    out.push_back(L);
  }
  return out;
}

namespace {

double total_capacity(const CountrySpec& c) {
  double s = 0.0;
  for (const ProducerSpec& p : c.producers) s += p.capacity;
  return s;
}

}  // namespace

Nasp build_nasp(const EnergyInstance& inst) {
  inst.validate();
  const std::vector<CountryLayout> layout = energy_layout(inst);
  Nasp n;
  Index total = 0;
  for (const CountryLayout& L : layout) total += L.strategy;
  const Index np = inst.trade ? 1 : 0;

  for (std::size_t ci = 0; ci < inst.countries.size(); ++ci) {
    const CountrySpec& c = inst.countries[ci];
    const CountryLayout& L = layout[ci];
    const Index P = static_cast<Index>(c.producers.size());
    const Index S = L.strategy;
    const double beta = c.demand_slope;
    StackelbergLeader leader;
    leader.nx = L.nx;
    Polyhedron& poly = leader.poly;
    poly = Polyhedron(S);
    auto unit = [&](Index k, double v = 1.0) {
      Vector r = Vector::Zero(S);
      r(k) = v;
      return r;
    };

    for (Index p = 0; p < P; ++p) {
      poly.add_le(unit(L.taxes + p, -1.0), 0.0);
      poly.add_le(unit(L.taxes + p), c.producers[p].tax_cap);
    }
    if (c.paradigm == TaxParadigm::Carbon) {
      poly.add_le(unit(L.ghg, -1.0), 0.0);
      for (Index p = 0; p < P; ++p) {
        Vector r = unit(L.taxes + p);
        r(L.ghg) = -c.producers[p].emission_cost;
        poly.add_eq(r, 0.0);
      }
    } else if (c.paradigm == TaxParadigm::Single) {
      for (Index p = 1; p < P; ++p) {
        Vector r = unit(L.taxes + p);
        r(L.taxes) = -1.0;
        poly.add_eq(r, 0.0);
      }
    }

    Vector price_row = Vector::Zero(S);  // -beta * domestic supply
    for (Index p = 0; p < P; ++p) price_row(L.production + p) = -beta;
    if (inst.trade) {
      for (std::size_t k = 0; k < L.partners.size(); ++k) {
        const Index v = L.imports + static_cast<Index>(k);
        poly.add_le(unit(v, -1.0), 0.0);
        poly.add_le(unit(v), total_capacity(inst.countries[L.partners[k]]));
        price_row(v) = -beta;
      }
      poly.add_le(unit(L.exports, -1.0), 0.0);
      Vector r = unit(L.exports);
      for (Index p = 0; p < P; ++p) r(L.production + p) = -1.0;
      poly.add_le(r, 0.0);
      price_row(L.exports) = beta;
    }
    // demand_intercept - beta * supply <= price_cap
    poly.add_le(price_row, c.price_cap - c.demand_intercept);

    if (c.tax_revenue) {
      for (Index p = 0; p < P; ++p) {
        const Index w = L.revenues + p, t = L.taxes + p, q = L.production + p;
        const double tc = c.producers[p].tax_cap, qc = c.producers[p].capacity;
        poly.add_le(unit(w, -1.0), 0.0);
        Vector lo = unit(w, -1.0);
        lo(q) = tc;
        lo(t) = qc;
        poly.add_le(lo, tc * qc);
        Vector up1 = unit(w);
        up1(q) = -tc;
        poly.add_le(up1, 0.0);
        Vector up2 = unit(w);
        up2(t) = -qc;
        poly.add_le(up2, 0.0);
      }
    }

    FacileNashGame& g = leader.followers;
    g.param_dim = L.nx;
    for (Index p = 0; p < P; ++p) {
      const ProducerSpec& spec = c.producers[p];
      QuadraticPlayer f;
      f.Q = Matrix::Constant(1, 1, spec.quadratic_cost + 2.0 * beta);
      f.c = Vector::Constant(1, spec.linear_cost - c.demand_intercept);
      f.C = Matrix::Constant(1, P - 1, beta);
      f.feasible = Polyhedron(1);
      f.feasible.add_le(Vector::Constant(1, -1.0), 0.0);
      f.feasible.add_le(Vector::Constant(1, 1.0), spec.capacity);
      f.param_obj = Matrix::Zero(1, L.nx);
      f.param_obj(0, L.taxes + p) = 1.0;
      if (inst.trade) {
        for (std::size_t k = 0; k < L.partners.size(); ++k) f.param_obj(0, L.imports + static_cast<Index>(k)) = beta;
        f.param_obj(0, L.exports) = -beta;
      }
      g.players.push_back(std::move(f));
    }
    g.normalize();

    Vector cvec = Vector::Zero(S);
    for (Index p = 0; p < P; ++p) {
      cvec(L.production + p) = c.producers[p].emission_cost;
      if (c.tax_revenue) cvec(L.revenues + p) = -1.0;
    }
    Matrix Cmat = Matrix::Zero(S, total - S + np);
    if (inst.trade) {
      const Index price = Cmat.cols() - 1;
      for (std::size_t k = 0; k < L.partners.size(); ++k) Cmat(L.imports + static_cast<Index>(k), price) = 1.0;
      Cmat(L.exports, price) = -1.0;
    }
    n.leaders.push_back(std::move(leader));
    n.c.push_back(cvec);
    n.C.push_back(Cmat);
  }

  if (inst.trade) {
    n.market_G = Matrix::Zero(1, total);
    n.market_h = Vector::Zero(1);
    Index off = 0;
    for (const CountryLayout& L : layout) {
      for (std::size_t k = 0; k < L.partners.size(); ++k) n.market_G(0, off + L.imports + static_cast<Index>(k)) = 1.0;
      n.market_G(0, off + L.exports) = -1.0;
      off += L.strategy;
    }
  } else {
    n.market_G.resize(0, total);
    n.market_h.resize(0);
  }
  n.validate();
  return n;
}

EnergyReport report(const EnergyInstance& inst, const MixedProfile& profile) {
  inst.validate();
  const std::vector<CountryLayout> layout = energy_layout(inst);
  const Nasp n = build_nasp(inst);
  if (profile.supports.size() != inst.countries.size())
    fail(ErrorCode::ProfileMismatch, "profile has " + std::to_string(profile.supports.size()) +
                                         " leaders, instance has " + std::to_string(inst.countries.size()));
  for (std::size_t i = 0; i < profile.supports.size(); ++i)
    for (const SupportEntry& e : profile.supports[i])
      if (e.point.size() < layout[i].strategy) fail(ErrorCode::ProfileMismatch, "support point too short");
  if (profile.prices.size() != n.num_prices()) fail(ErrorCode::ProfileMismatch, "price vector length");

  EnergyReport r;
  for (std::size_t ci = 0; ci < inst.countries.size(); ++ci) {
    const CountrySpec& c = inst.countries[ci];
    const CountryLayout& L = layout[ci];
    const Vector m = profile.mean_strategy(n, ci);
    CountryReport cr;
    cr.name = c.name;
    double supply = 0.0;
    for (std::size_t p = 0; p < c.producers.size(); ++p) {
      const double q = m(L.production + static_cast<Index>(p));
      cr.production.push_back(q);
      cr.taxes.push_back(m(L.taxes + static_cast<Index>(p)));
      cr.emission += c.producers[p].emission_cost * q;
      supply += q;
    }
    if (inst.trade) {
      for (std::size_t k = 0; k < L.partners.size(); ++k) cr.imports += m(L.imports + static_cast<Index>(k));
      cr.exports = m(L.exports);
    }
    cr.domestic_price = c.demand_intercept - c.demand_slope * (supply + cr.imports - cr.exports);
    r.total_emission += cr.emission;
    r.trade_volume += cr.exports;
    r.countries.push_back(std::move(cr));
  }
  if (inst.trade) r.clearing_price = profile.prices(0);
  return r;
}

std::string report_csv(const EnergyReport& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "country,production,domestic_price,imports,exports,emission\n";
  for (const CountryReport& c : r.countries) {
    double prod = 0.0;
    for (double q : c.production) prod += q;
    os << c.name << ',' << prod << ',' << c.domestic_price << ',' << c.imports << ',' << c.exports << ','
       << c.emission << '\n';
  }
  os << "total," << "," << "," << "," << r.trade_volume << ',' << r.total_emission << '\n';
  return os.str();
}

}  // namespace nasp
