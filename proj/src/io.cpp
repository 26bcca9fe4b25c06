#include "nasp/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace nasp {

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::InvalidInstance, what); }

// Non-finite reals have no JSON literal; they travel as strings.
Json real(double v) {
  if (v == 0.0) return 0.0;  // drops the sign of negative zero
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double get_real(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::nan("");
  }
  bad("expected a number, got " + j.dump());
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

Json vec_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(real(v(i)));
  return a;
}

Vector vec_from(const Json& j) {
  if (!j.is_array()) bad("expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = get_real(j[i]);
  return v;
}

// Matrices keep their shape so that 0 x n blocks survive a round trip.
Json mat_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) rows.push_back(vec_json(m.row(r).transpose()));
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Matrix mat_from(const Json& j) {
  const Index r = field(j, "rows").get<Index>();
  const Index c = field(j, "cols").get<Index>();
  const Json& data = field(j, "data");
  if (r < 0 || c < 0 || !data.is_array() || static_cast<Index>(data.size()) != r) bad("matrix shape");
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    const Vector row = vec_from(data[static_cast<std::size_t>(i)]);
    if (row.size() != c) bad("matrix row length");
    m.row(i) = row.transpose();
  }
  return m;
}

Json poly_json(const Polyhedron& p) {
  return Json{{"A", mat_json(p.A)}, {"b", vec_json(p.b)}, {"E", mat_json(p.E)}, {"f", vec_json(p.f)}};
}

Polyhedron poly_from(const Json& j) {
  Polyhedron p(mat_from(field(j, "A")), vec_from(field(j, "b")));
  if (j.contains("E")) {
    p.E = mat_from(j.at("E"));
    p.f = vec_from(field(j, "f"));
  } else {
    p.E.resize(0, p.A.cols());
  }
  return p;
}

Json game_json(const FacileNashGame& g) {
  Json players = Json::array();
  for (const QuadraticPlayer& f : g.players)
    players.push_back(Json{{"Q", mat_json(f.Q)},
                           {"c", vec_json(f.c)},
                           {"C", mat_json(f.C)},
                           {"feasible", poly_json(f.feasible)},
                           {"param_obj", mat_json(f.param_obj)},
                           {"param_rhs", mat_json(f.param_rhs)},
                           {"param_eq_rhs", mat_json(f.param_eq_rhs)}});
  return Json{{"param_dim", g.param_dim},
              {"players", players},
              {"market_G", mat_json(g.market_G)},
              {"market_h", vec_json(g.market_h)}};
}

FacileNashGame game_from(const Json& j) {
  FacileNashGame g;
  g.param_dim = field(j, "param_dim").get<Index>();
  for (const Json& pj : field(j, "players")) {
    QuadraticPlayer f;
    f.Q = mat_from(field(pj, "Q"));
    f.c = vec_from(field(pj, "c"));
    f.C = mat_from(field(pj, "C"));
    f.feasible = poly_from(field(pj, "feasible"));
    if (pj.contains("param_obj")) f.param_obj = mat_from(pj.at("param_obj"));
    if (pj.contains("param_rhs")) f.param_rhs = mat_from(pj.at("param_rhs"));
    if (pj.contains("param_eq_rhs")) f.param_eq_rhs = mat_from(pj.at("param_eq_rhs"));
    g.players.push_back(std::move(f));
  }
  if (j.contains("market_G")) {
    g.market_G = mat_from(j.at("market_G"));
    g.market_h = vec_from(field(j, "market_h"));
  }
  return g;
}

SolveStatus parse_status(const std::string& s) {
  for (SolveStatus v : {SolveStatus::MNE, SolveStatus::PNE, SolveStatus::NoEquilibrium, SolveStatus::TimeLimit})
    if (s == to_string(v)) return v;
  bad("unknown status '" + s + "'");
}

}  // namespace

Json to_json(const Nasp& n) {
  Json leaders = Json::array();
  for (std::size_t i = 0; i < n.leaders.size(); ++i) {
    const StackelbergLeader& l = n.leaders[i];
    leaders.push_back(Json{{"nx", l.nx},
                           {"poly", poly_json(l.poly)},
                           {"followers", game_json(l.followers)},
                           {"c", vec_json(n.c[i])},
                           {"C", mat_json(n.C[i])}});
  }
  return Json{{"leaders", leaders}, {"market_G", mat_json(n.market_G)}, {"market_h", vec_json(n.market_h)}};
}

Nasp nasp_from_json(const Json& j) {
  Nasp n;
  const Json& leaders = field(j, "leaders");
  if (!leaders.is_array()) bad("'leaders' must be an array");
  for (const Json& lj : leaders) {
    StackelbergLeader l;
    l.nx = field(lj, "nx").get<Index>();
    l.poly = poly_from(field(lj, "poly"));
    l.followers = game_from(field(lj, "followers"));
    l.followers.normalize();
    n.c.push_back(vec_from(field(lj, "c")));
    n.C.push_back(mat_from(field(lj, "C")));
    n.leaders.push_back(std::move(l));
  }
  if (j.contains("market_G")) {
    n.market_G = mat_from(j.at("market_G"));
    n.market_h = vec_from(field(j, "market_h"));
  } else {
    n.market_G.resize(0, n.total_strategy_dim());
  }
  try {
    n.validate();
  } catch (const Error& e) {
    bad(e.what());
  }
  return n;
}

Json to_json(const EnergyInstance& inst) {
  Json countries = Json::array();
  for (const CountrySpec& c : inst.countries) {
    Json producers = Json::array();
    for (const ProducerSpec& p : c.producers)
      producers.push_back(Json{{"linear_cost", p.linear_cost},
                               {"quadratic_cost", p.quadratic_cost},
                               {"capacity", p.capacity},
                               {"emission_cost", p.emission_cost},
                               {"tax_cap", p.tax_cap}});
    countries.push_back(Json{{"name", c.name},
                             {"demand_intercept", c.demand_intercept},
                             {"demand_slope", c.demand_slope},
                             {"price_cap", c.price_cap},
                             {"paradigm", to_string(c.paradigm)},
                             {"tax_revenue", c.tax_revenue},
                             {"producers", producers}});
  }
  return Json{{"trade", inst.trade}, {"countries", countries}};
}

EnergyInstance energy_from_json(const Json& j) {
  EnergyInstance inst;
  try {
    inst.trade = field(j, "trade").get<bool>();
    for (const Json& cj : field(j, "countries")) {
      CountrySpec c;
      c.name = field(cj, "name").get<std::string>();
      c.demand_intercept = field(cj, "demand_intercept").get<double>();
      c.demand_slope = field(cj, "demand_slope").get<double>();
      c.price_cap = field(cj, "price_cap").get<double>();
      c.paradigm = parse_paradigm(field(cj, "paradigm").get<std::string>());
      c.tax_revenue = field(cj, "tax_revenue").get<int>();
      for (const Json& pj : field(cj, "producers")) {
        ProducerSpec p;
        p.linear_cost = field(pj, "linear_cost").get<double>();
        p.quadratic_cost = field(pj, "quadratic_cost").get<double>();
        p.capacity = field(pj, "capacity").get<double>();
        p.emission_cost = field(pj, "emission_cost").get<double>();
        p.tax_cap = field(pj, "tax_cap").get<double>();
        c.producers.push_back(p);
      }
      inst.countries.push_back(std::move(c));
    }
  } catch (const Json::exception& e) {
    bad(e.what());
  }
  inst.validate();
  return inst;
}

Json instance_to_json(const InstanceFile& f) {
  if (f.energy) return Json{{"kind", "energy"}, {"energy", to_json(*f.energy)}};
  return Json{{"kind", "nasp"}, {"nasp", to_json(f.nasp)}};
}

InstanceFile instance_from_json(const Json& j) {
  InstanceFile f;
  try {
    const std::string kind = field(j, "kind").get<std::string>();
    if (kind == "energy") {
      f.energy = energy_from_json(field(j, "energy"));
      f.nasp = build_nasp(*f.energy);
    } else if (kind == "nasp") {
      f.nasp = nasp_from_json(field(j, "nasp"));
    } else {
      bad("unknown instance kind '" + kind + "'");
    }
  } catch (const Json::exception& e) {
    bad(e.what());
  }
  return f;
}

Json result_to_json(const SolveReport& r, const ResultMeta& meta) {
  Json leaders = Json::array();
  for (std::size_t i = 0; i < r.profile.supports.size(); ++i) {
    Json support = Json::array();
    for (const SupportEntry& e : r.profile.supports[i])
      support.push_back(Json{{"probability", real(e.probability)}, {"point", vec_json(e.point)}});
    Json lj{{"support", support}};
    if (i < r.payoffs.size()) lj["objective"] = real(r.payoffs[i]);
    leaders.push_back(lj);
  }
  Json j{{"status", to_string(r.status)},
         {"certified", r.certified},
         {"algorithm", meta.algorithm},
         {"strategy", meta.strategy},
         {"k", meta.k},
         {"seed", meta.seed},
         {"select", meta.select},
         {"iterations", r.iterations},
         {"pieces_total", r.pieces_total},
         {"pieces_used", r.pieces_used},
         {"leaders", leaders},
         {"prices", vec_json(r.profile.prices)}};
  if (meta.timing) j["wall_time"] = r.seconds;
  return j;
}

SolveReport result_from_json(const Json& j) {
  SolveReport r;
  try {
    r.status = parse_status(field(j, "status").get<std::string>());
    if (j.contains("certified")) r.certified = j.at("certified").get<bool>();
    if (j.contains("iterations")) r.iterations = j.at("iterations").get<std::size_t>();
    for (const Json& lj : field(j, "leaders")) {
      std::vector<SupportEntry> support;
      for (const Json& ej : field(lj, "support")) {
        SupportEntry e;
        e.probability = get_real(field(ej, "probability"));
        e.point = vec_from(field(ej, "point"));
        support.push_back(std::move(e));
      }
      r.profile.supports.push_back(std::move(support));
      if (lj.contains("objective")) r.payoffs.push_back(get_real(lj.at("objective")));
    }
    r.profile.prices = j.contains("prices") ? vec_from(j.at("prices")) : Vector();
  } catch (const Json::exception& e) {
    bad(e.what());
  }
  return r;
}

Json to_json(const EnergyReport& r) {
  Json countries = Json::array();
  for (const CountryReport& c : r.countries)
    countries.push_back(Json{{"name", c.name},
                             {"production", c.production},
                             {"taxes", c.taxes},
                             {"domestic_price", c.domestic_price},
                             {"imports", c.imports},
                             {"exports", c.exports},
                             {"emission", c.emission}});
  return Json{{"countries", countries},
              {"trade_volume", r.trade_volume},
              {"total_emission", r.total_emission},
              {"clearing_price", r.clearing_price}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    bad("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) bad("cannot write '" + path + "'");
  out << dump(j);
  if (!out) bad("write to '" + path + "' failed");
}

}  // namespace nasp
