#include "nasp/generators.hpp"

#include <algorithm>
#include <set>

namespace nasp {

namespace {

Vector unit(Index n, Index k, double v = 1.0) {
  Vector r = Vector::Zero(n);
  r(k) = v;
  return r;
}

/// LP follower minimizing cᵀy over rows added with `ge`.
QuadraticPlayer lp_follower(const Vector& c, Index param_dim) {
  QuadraticPlayer f;
  f.c = c;
  f.feasible = Polyhedron(c.size());
  f.param_rhs = Matrix::Zero(0, param_dim);
  return f;
}

/// Adds  y_var >= constant + hᵀp  to the follower.
void ge(QuadraticPlayer& f, Index var, double constant, const Vector& h) {
  f.feasible.add_le(unit(f.dim(), var, -1.0), -constant);
  f.param_rhs.conservativeResize(f.param_rhs.rows() + 1, Eigen::NoChange);
  f.param_rhs.row(f.param_rhs.rows() - 1) = -h.transpose();
}

/// y_var = max(-p_x, p_x - 1); with y_var >= 0 this forces p_x <= 0 or p_x >= 1.
void abs_rows(QuadraticPlayer& f, Index var, Index param_dim, Index x) {
  ge(f, var, 0.0, unit(param_dim, x, -1.0));
  ge(f, var, -1.0, unit(param_dim, x, 1.0));
}

FacileNashGame single_follower(QuadraticPlayer f, Index param_dim) {
  FacileNashGame g;
  g.param_dim = param_dim;
  g.players.push_back(std::move(f));
  g.normalize();
  return g;
}

/// Rows of the set-S extended formulation. (h, y, x) index the leader's
/// strategy, z the first of six follower variables inside the strategy and
/// zf the same variable inside the follower block.
void add_s_gadget(Polyhedron& poly, QuadraticPlayer& f, Index nx, Index h, Index y, Index x, Index z, Index zf) {
  const Index S = poly.dim();
  poly.add_le(unit(S, x, -1.0), 0.0);
  poly.add_le(unit(S, y, -1.0), 0.0);
  poly.add_le(unit(S, h, -1.0), 0.0);
  poly.add_le(unit(S, y), 1.0);
  Vector hx = unit(S, h);
  hx(x) = -1.0;
  poly.add_le(hx, 0.0);
  for (Index m = 0; m < 6; ++m) poly.add_le(unit(S, z + m, -1.0), 0.0);

  auto lin = [&](double ch, double cy, double cx) {
    Vector v = Vector::Zero(nx);
    v(h) = ch;
    v(y) = cy;
    v(x) = cx;
    return v;
  };
  ge(f, zf + 0, 0.0, lin(1, 0, -1));
  ge(f, zf + 0, 0.0, lin(-1, 0, 0));
  ge(f, zf + 1, 1.0, lin(0, -1, 0));
  ge(f, zf + 1, 0.0, lin(-1, 0, 0));
  ge(f, zf + 2, -1.0, lin(0, 1, 0));
  ge(f, zf + 2, 0.0, lin(-1, 0, 0));
  ge(f, zf + 3, 0.0, lin(-1, 0, 1));
  ge(f, zf + 3, 0.0, lin(0, -1, 0));
  ge(f, zf + 4, 0.0, lin(1, 0, -1));
  ge(f, zf + 4, 0.0, lin(0, -1, 0));
  ge(f, zf + 5, -1.0, lin(0, 1, 0));
  ge(f, zf + 5, 0.0, lin(0, -1, 0));
}

double pow2(long e) { return static_cast<double>(1L << e); }

}  // namespace

Nasp remark2_game(bool flipped) {
  Nasp n;
  StackelbergLeader latin;
  latin.nx = 1;
  latin.poly = Polyhedron(1);
  latin.poly.add_le(unit(1, 0, -1.0), 0.0);
  latin.followers.param_dim = 1;

  StackelbergLeader greek;
  greek.nx = 1;
  QuadraticPlayer chi = lp_follower(Vector::Ones(1), 1);
  ge(chi, 0, -1.0, unit(1, 0, -1.0));
  ge(chi, 0, -1.0, unit(1, 0, 1.0));
  greek.followers = single_follower(std::move(chi), 1);
  greek.poly = Polyhedron(2);
  greek.poly.add_le(unit(2, 0), 5.0);
  greek.poly.add_le(unit(2, 0, -1.0), 5.0);
  greek.poly.add_le(unit(2, 1, -1.0), 0.0);

  n.leaders = {latin, greek};
  n.c = {Vector::Zero(1), Vector::Zero(2)};
  Matrix CL = Matrix::Zero(1, 2);
  CL(0, 0) = 1.0;
  Matrix CG = Matrix::Zero(2, 1);
  CG(0, 0) = flipped ? -1.0 : 1.0;
  n.C = {CL, CG};
  n.market_G.resize(0, 3);
  n.validate();
  return n;
}

Nasp example1_game() {
  auto leader = [] {
    StackelbergLeader l;
    l.nx = 2;
    QuadraticPlayer f = lp_follower(Vector::Ones(2), 2);
    for (Index i = 0; i < 2; ++i) abs_rows(f, i, 2, i);
    l.followers = single_follower(std::move(f), 2);
    l.poly = Polyhedron(4);
    for (Index k = 0; k < 4; ++k) l.poly.add_le(unit(4, k, -1.0), 0.0);
    for (Index k = 0; k < 2; ++k) l.poly.add_le(unit(4, k), 1.0);
    Vector sum = Vector::Zero(4);
    sum << 1, 1, 0, 0;
    l.poly.add_eq(sum, 1.0);
    return l;
  };
  Nasp n;
  n.leaders = {leader(), leader()};
  n.c = {Vector::Zero(4), Vector::Zero(4)};
  Matrix CL = Matrix::Zero(4, 4), CG = Matrix::Zero(4, 4);
  CL(0, 0) = -1.0;
  CL(1, 1) = -1.0;
  CG(0, 1) = -1.0;
  CG(1, 0) = -1.0;
  n.C = {CL, CG};
  n.market_G.resize(0, 8);
  n.validate();
  return n;
}

void SubsetSumInterval::validate() const {
  if (q.empty()) fail(ErrorCode::InvalidInstance, "subset sum interval needs at least one q");
  for (long v : q)
    if (v <= 0) fail(ErrorCode::InvalidInstance, "q entries must be positive");
  if (p <= 0 || t <= p) fail(ErrorCode::InvalidInstance, "need 0 < p < t");
  if (r < 1 || r > static_cast<long>(q.size()) || r > 30)
    fail(ErrorCode::InvalidInstance, "need 1 <= r <= |q|");
  if (t - p != (1L << r)) fail(ErrorCode::InvalidInstance, "need t - p = 2^r");
}

bool SubsetSumInterval::is_yes() const {
  validate();
  std::set<long> sums = {0};
  for (long v : q) {
    std::set<long> next = sums;
    for (long s : sums) next.insert(s + v);
    sums.swap(next);
  }
  for (long s = p; s < t; ++s)
    if (!sums.count(s)) return true;
  return false;
}

Nasp gen_pne_hardness(const SubsetSumInterval& d, bool exact_pick) {
  d.validate();
  const Index k = static_cast<Index>(d.q.size());
  const Index r = d.r;
  const Index P = k + 2 * r;
  double Q = 0.0;
  for (long v : d.q) Q += static_cast<double>(v);
  const double T = static_cast<double>(d.t) - 1.0 + static_cast<double>(r) * Q;
  auto w = [&](Index i) { return i <= k + r ? pow2(i - k - 1) : 0.0; };

  // Latin: x_0..x_2P, y_0..y_2P.
  const Index nxL = 2 * P + 1, SL = 2 * nxL;
  StackelbergLeader latin;
  latin.nx = nxL;
  QuadraticPlayer fy = lp_follower(Vector::Ones(nxL), nxL);
  for (Index i = 0; i < nxL; ++i) abs_rows(fy, i, nxL, i);
  latin.followers = single_follower(std::move(fy), nxL);
  Polyhedron& pl = latin.poly;
  pl = Polyhedron(SL);
  for (Index i = 1; i <= k; ++i) pl.add_eq(unit(SL, i), 0.0);
  for (Index i = 0; i < nxL; ++i) pl.add_le(unit(SL, nxL + i, -1.0), 0.0);
  for (Index i = 0; i < nxL; ++i) pl.add_le(unit(SL, i, -1.0), 0.0);
  Vector pick = Vector::Zero(SL);
  for (Index i = k + 1; i <= P; ++i) pick(i) = 1.0;
  if (exact_pick)
    pl.add_eq(pick, static_cast<double>(r));
  else
    pl.add_le(pick, static_cast<double>(r));
  for (Index i = 1; i <= P; ++i) {
    Vector a = unit(SL, i);
    a(P + i) = 1.0;
    pl.add_le(a, 1.0);
  }
  for (Index i = 1; i <= P; ++i) {
    Vector a = unit(SL, 0);
    a(P + i) = 1.0;
    pl.add_le(a, 1.0);
  }

  // Greek: xi_0..xi_P, chi_0..chi_P.
  const Index nxG = P + 1, SG = 2 * nxG;
  StackelbergLeader greek;
  greek.nx = nxG;
  QuadraticPlayer fc = lp_follower(Vector::Ones(nxG), nxG);
  for (Index i = 0; i < nxG; ++i) abs_rows(fc, i, nxG, i);
  greek.followers = single_follower(std::move(fc), nxG);
  Polyhedron& pg = greek.poly;
  pg = Polyhedron(SG);
  for (Index i = 0; i < nxG; ++i) pg.add_le(unit(SG, i, -1.0), 0.0);
  for (Index i = 0; i < nxG; ++i) pg.add_le(unit(SG, i), 1.0);
  for (Index i = 0; i < nxG; ++i) pg.add_le(unit(SG, nxG + i, -1.0), 0.0);
  Vector cover = Vector::Zero(SG);
  cover(0) = -static_cast<double>(r);
  for (Index i = k + 1; i <= P; ++i) cover(i) = -1.0;
  pg.add_le(cover, -static_cast<double>(r));
  Vector budget = Vector::Zero(SG);
  budget(0) = T;
  for (Index i = 1; i <= k; ++i) budget(i) = static_cast<double>(d.q[i - 1]);
  for (Index i = k + 1; i <= P; ++i) budget(i) = Q + w(i);
  pg.add_le(budget, T);

  // Both leaders maximize in the reduction; payoffs here are negated costs.
  Vector cL = Vector::Zero(SL);
  Matrix CL = Matrix::Zero(SL, SG);
  CL(0, 0) = -(T - 1.0);
  for (Index i = 1; i <= k; ++i) CL(P + i, i) = -static_cast<double>(d.q[i - 1]);
  for (Index i = k + 1; i <= P; ++i) CL(P + i, i) = -Q;

  Vector cG = Vector::Zero(SG);
  Matrix CG = Matrix::Zero(SG, SL);
  cG(0) = -(T - 1.0) - T * static_cast<double>(P - k);
  for (Index i = k + 1; i <= P; ++i) CG(0, i) = T;
  for (Index i = 1; i <= k; ++i) {
    cG(i) = -static_cast<double>(d.q[i - 1]);
    CG(i, P + i) = static_cast<double>(d.q[i - 1]);
  }
  for (Index i = k + 1; i <= P; ++i) {
    cG(i) = -(Q + w(i) + T);
    CG(i, i) = Q + w(i) + 2.0 * T;
    CG(i, P + i) = Q + w(i);
  }

  Nasp n;
  n.leaders = {std::move(latin), std::move(greek)};
  n.c = {cL, cG};
  n.C = {CL, CG};
  n.market_G.resize(0, SL + SG);
  n.validate();
  return n;
}

StackelbergLeader s_gadget_leader() {
  StackelbergLeader l;
  l.nx = 3;
  l.poly = Polyhedron(9);
  QuadraticPlayer f = lp_follower(Vector::Ones(6), 3);
  add_s_gadget(l.poly, f, 3, 0, 1, 2, 3, 0);
  l.followers = single_follower(std::move(f), 3);
  return l;
}

Nasp gen_mne_hardness(const SubsetSumInterval& d) {
  d.validate();
  const Index k = static_cast<Index>(d.q.size());
  const Index r = d.r;
  double Q = 0.0;
  for (long v : d.q) Q += static_cast<double>(v);
  const double p = static_cast<double>(d.p);

  // Latin: x_0..x_{k+3r+1}, then y_0..y_k, then six z per gadget.
  const Index nxL = k + 3 * r + 2, ny = k + 1, last = k + 3 * r + 1;
  const Index SL = nxL + ny + 6 * r;
  StackelbergLeader latin;
  latin.nx = nxL;
  Polyhedron& pl = latin.poly;
  pl = Polyhedron(SL);
  QuadraticPlayer f = lp_follower(Vector::Ones(ny + 6 * r), nxL);
  for (Index i = 0; i <= k; ++i) {
    pl.add_le(unit(SL, i, -1.0), 0.0);
    pl.add_le(unit(SL, i), 1.0);
    pl.add_le(unit(SL, nxL + i, -1.0), 0.0);
    abs_rows(f, i, nxL, i);
  }
  for (Index i = 1; i <= r; ++i) {
    Vector e = unit(SL, last);
    e(k + 2 * r + i) = -1.0;
    pl.add_eq(e, 0.0);
  }
  Vector bin = unit(SL, last);
  for (Index i = 1; i <= r; ++i) bin(k + r + i) = -pow2(i - 1);
  pl.add_eq(bin, p);
  Vector knap = unit(SL, last, -1.0);
  knap(0) = 0.5;
  for (Index i = 1; i <= k; ++i) knap(i) = static_cast<double>(d.q[i - 1]);
  pl.add_le(knap, 0.0);
  for (Index i = 1; i <= r; ++i)
    add_s_gadget(pl, f, nxL, k + i, k + r + i, k + 2 * r + i, nxL + ny + 6 * (i - 1), ny + 6 * (i - 1));
  latin.followers = single_follower(std::move(f), nxL);

  // Greek: xi_0..xi_{r+1}, chi_1..chi_r.
  const Index nxG = r + 2, SG = nxG + r;
  StackelbergLeader greek;
  greek.nx = nxG;
  Polyhedron& pg = greek.poly;
  pg = Polyhedron(SG);
  QuadraticPlayer fc = lp_follower(Vector::Ones(r), nxG);
  for (Index i = 1; i <= r; ++i) {
    pg.add_le(unit(SG, i, -1.0), 0.0);
    pg.add_le(unit(SG, i), 1.0);
    pg.add_le(unit(SG, nxG + i - 1, -1.0), 0.0);
    abs_rows(fc, i - 1, nxG, i);
  }
  Vector gbin = unit(SG, r + 1);
  for (Index i = 1; i <= r; ++i) gbin(i) = -pow2(i - 1);
  pg.add_eq(gbin, p);
  greek.followers = single_follower(std::move(fc), nxG);

  Vector cL = Vector::Zero(SL);
  Matrix CL = Matrix::Zero(SL, SG);
  cL(0) = -0.5;
  for (Index i = 1; i <= k; ++i) cL(i) = -static_cast<double>(d.q[i - 1]);
  for (Index i = 1; i <= r; ++i) cL(k + i) = (Q + 1.0) * pow2(i - 1);
  cL(last) = (Q + 1.0) * p;
  CL(last, r + 1) = -2.0 * (Q + 1.0);

  Vector cG = Vector::Zero(SG);
  Matrix CG = Matrix::Zero(SG, SL);
  cG(0) = -1.0;
  CG(0, 0) = 1.0;

  Nasp n;
  n.leaders = {std::move(latin), std::move(greek)};
  n.c = {cL, cG};
  n.C = {CL, CG};
  n.market_G.resize(0, SL + SG);
  n.validate();
  return n;
}

Nasp random_trivial_nasp(Lcg64& rng) {
  auto draw = [&](long lo, long hi) { return static_cast<double>(lo + static_cast<long>(rng.below(hi - lo + 1))); };
  Nasp n;
  for (int i = 0; i < 2; ++i) {
    const Index nx = 1 + static_cast<Index>(rng.below(3));
    const Index S = nx + 1;
    StackelbergLeader l;
    l.nx = nx;
    QuadraticPlayer f = lp_follower(Vector::Ones(1), nx);
    Vector a1(nx), a2(nx);
    for (Index j = 0; j < nx; ++j) {
      a1(j) = draw(-2, 2);
      a2(j) = draw(-2, 2);
    }
    const double b1 = draw(-2, 2), b2 = draw(-2, 2);
    ge(f, 0, b1, a1);
    ge(f, 0, b2, a2);
    l.followers = single_follower(std::move(f), nx);
    l.poly = Polyhedron(S);
    for (Index j = 0; j < nx; ++j) {
      l.poly.add_le(unit(S, j, -1.0), 0.0);
      l.poly.add_le(unit(S, j), draw(1, 3));
    }
    // y >= gamma keeps x = 0 feasible but cuts the box into a union.
    const double gamma = std::max(b1, b2) - draw(0, 2);
    l.poly.add_le(unit(S, nx, -1.0), -gamma);
    n.leaders.push_back(std::move(l));
  }
  const Index S0 = n.leaders[0].strategy_dim(), S1 = n.leaders[1].strategy_dim();
  for (int i = 0; i < 2; ++i) {
    const Index S = i == 0 ? S0 : S1, R = i == 0 ? S1 : S0;
    Vector c(S);
    Matrix C(S, R);
    for (Index a = 0; a < S; ++a) c(a) = draw(-5, 5);
    for (Index a = 0; a < S; ++a)
      for (Index b = 0; b < R; ++b) C(a, b) = draw(-5, 5);
    n.c.push_back(c);
    n.C.push_back(C);
  }
  n.market_G.resize(0, S0 + S1);
  n.validate();
  return n;
}

Nasp no_equilibrium_nasp(Lcg64& rng) {
  const double a = 1.0 + static_cast<double>(rng.below(5));
  const double b = 1.0 + static_cast<double>(rng.below(5));
  auto binary_leader = [](double upper) {
    StackelbergLeader l;
    l.nx = 1;
    QuadraticPlayer f = lp_follower(Vector::Ones(1), 1);
    abs_rows(f, 0, 1, 0);
    l.followers = single_follower(std::move(f), 1);
    l.poly = Polyhedron(2);
    l.poly.add_le(unit(2, 0, -1.0), 0.0);
    l.poly.add_le(unit(2, 1, -1.0), 0.0);
    if (upper > 0) l.poly.add_le(unit(2, 0), upper);
    return l;
  };
  Nasp n;
  // Latin x in {0, 1}; Greek xi in {0} ∪ [1, inf).
  n.leaders = {binary_leader(1.0), binary_leader(0.0)};
  Vector cL = Vector::Zero(2), cG = Vector::Zero(2);
  cL(0) = a;
  cG(0) = -b;
  Matrix CL = Matrix::Zero(2, 2), CG = Matrix::Zero(2, 2);
  CG(0, 0) = b;
  n.c = {cL, cG};
  n.C = {CL, CG};
  n.market_G.resize(0, 4);
  n.validate();
  return n;
}

void GenConfig::validate() const {
  if (countries < 1) fail(ErrorCode::InvalidConfig, "need at least one country");
  if (trade && countries < 2) fail(ErrorCode::InvalidConfig, "trade requires at least two countries");
  if (followers_min < 1 || followers_min > followers_max)
    fail(ErrorCode::InvalidConfig, "need 1 <= followers_min <= followers_max");
  auto nonneg = [](const std::vector<double>& v, std::size_t min_size, const char* what) {
    if (v.size() < min_size)
      fail(ErrorCode::InvalidConfig, std::string(what) + " menu needs at least " + std::to_string(min_size) + " values");
    for (double x : v)
      if (!(x >= 0) || !std::isfinite(x)) fail(ErrorCode::InvalidConfig, std::string(what) + " values must be finite and >= 0");
  };
  nonneg(capacities, 1, "capacity");
  nonneg(emission_costs, 5, "emission cost");
  nonneg(linear_costs, 5, "linear cost");
  nonneg(quadratic_costs, 5, "quadratic cost");
  nonneg(tax_caps, 5, "tax cap");
  nonneg(demand_alpha, 1, "demand alpha");
  nonneg(demand_beta, 1, "demand beta");
  nonneg(price_cap_fraction, 1, "price cap fraction");
  for (double b : demand_beta)
    if (!(b > 0)) fail(ErrorCode::InvalidConfig, "demand beta must be positive");
  for (double a : demand_alpha)
    if (!(a > 0)) fail(ErrorCode::InvalidConfig, "demand alpha must be positive");
  for (double f : price_cap_fraction)
    if (!(f < 1)) fail(ErrorCode::InvalidConfig, "price cap fraction must be below 1");
  if (paradigms.empty()) fail(ErrorCode::InvalidConfig, "paradigm menu is empty");
  if (tax_revenue != 0 && tax_revenue != 1) fail(ErrorCode::InvalidConfig, "tax_revenue must be 0 or 1");
}

namespace {

/// Class slice of a menu: sizes [2, 2, rest] after sorting.
std::vector<double> slice(std::vector<double> menu, bool ascending, ProducerClass cls) {
  std::sort(menu.begin(), menu.end());
  if (!ascending) std::reverse(menu.begin(), menu.end());
  switch (cls) {
    case ProducerClass::Green: return {menu[0], menu[1]};
    case ProducerClass::Average: return {menu[2], menu[3]};
    case ProducerClass::High: return {menu.begin() + 4, menu.end()};
  }
  return menu;
}

/// Domestic price when producers play Cournot without taxes or trade.
double autarky_price(const CountrySpec& c) {
  const std::size_t P = c.producers.size();
  std::vector<double> q(P, 0.0);
  const double beta = c.demand_slope;
  for (int sweep = 0; sweep < 10000; ++sweep) {
    double moved = 0.0;
    for (std::size_t i = 0; i < P; ++i) {
      const ProducerSpec& s = c.producers[i];
      double others = 0.0;
      for (std::size_t j = 0; j < P; ++j)
        if (j != i) others += q[j];
      const double best =
          std::clamp((c.demand_intercept - s.linear_cost - beta * others) / (s.quadratic_cost + 2.0 * beta), 0.0,
                     s.capacity);
      moved = std::max(moved, std::abs(best - q[i]));
      q[i] = best;
    }
    if (moved < 1e-10) break;
  }
  double total = 0.0;
  for (double v : q) total += v;
  return c.demand_intercept - beta * total;
}

}  // namespace

EnergyInstance gen_energy(const GenConfig& cfg) {
  cfg.validate();
  const std::vector<ProducerClass> classes =
      cfg.classes.empty() ? std::vector<ProducerClass>{ProducerClass::Green, ProducerClass::Average, ProducerClass::High}
                          : cfg.classes;
  Lcg64 root(cfg.seed);
  EnergyInstance inst;
  inst.trade = cfg.trade;
  for (std::size_t ci = 0; ci < cfg.countries; ++ci) {
    Lcg64 rng = root.split(ci);
    bool ok = false;
    for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
      CountrySpec c;
      c.name = "C" + std::to_string(ci + 1);
      const std::size_t P = cfg.followers_min + rng.below(cfg.followers_max - cfg.followers_min + 1);
      c.demand_intercept = rng.pick(cfg.demand_alpha);
      c.demand_slope = rng.pick(cfg.demand_beta);
      c.price_cap = rng.pick(cfg.price_cap_fraction) * c.demand_intercept;
      c.paradigm = rng.pick(cfg.paradigms);
      c.tax_revenue = cfg.tax_revenue;
      for (std::size_t p = 0; p < P; ++p) {
        const ProducerClass cls = rng.pick(classes);
        ProducerSpec s;
        s.emission_cost = rng.pick(slice(cfg.emission_costs, true, cls));
        s.linear_cost = rng.pick(slice(cfg.linear_costs, false, cls));
        s.quadratic_cost = rng.pick(slice(cfg.quadratic_costs, false, cls));
        s.tax_cap = rng.pick(slice(cfg.tax_caps, true, cls));
        s.capacity = rng.pick(cfg.capacities);
        c.producers.push_back(s);
      }
      // Taxes only raise the price, so untaxed autarky must meet the cap.
      if (autarky_price(c) <= c.price_cap) {
        inst.countries.push_back(std::move(c));
        ok = true;
      }
    }
    if (!ok) fail(ErrorCode::InvalidConfig, "could not draw a country whose untaxed price meets its cap");
  }
  inst.validate();
  return inst;
}

}  // namespace nasp
