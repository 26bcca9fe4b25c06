#include "nasp/nasp.hpp"

#include "nasp/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>

namespace nasp {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::MNE: return "MNE";
    case SolveStatus::PNE: return "PNE";
    case SolveStatus::NoEquilibrium: return "NoEquilibrium";
    case SolveStatus::TimeLimit: return "TimeLimit";
  }
  return "Unknown";
}

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Sequential: return "seq";
    case Strategy::ReverseSequential: return "rseq";
    case Strategy::Random: return "rand";
  }
  return "unknown";
}

Index Nasp::strategy_offset(std::size_t leader) const {
  Index off = 0;
  for (std::size_t i = 0; i < leader; ++i) off += leaders[i].strategy_dim();
  return off;
}

Index Nasp::total_strategy_dim() const { return strategy_offset(leaders.size()); }

void Nasp::validate() const {
  if (leaders.empty()) fail(ErrorCode::InvalidInstance, "no leaders");
  if (c.size() != leaders.size() || C.size() != leaders.size())
    fail(ErrorCode::InvalidInstance, "one payoff (c, C) per leader is required");
  const Index total = total_strategy_dim();
  for (std::size_t i = 0; i < leaders.size(); ++i) {
    const StackelbergLeader& l = leaders[i];
    const Index s = l.strategy_dim();
    const std::string who = "leader " + std::to_string(i) + ": ";
    if (l.nx < 0) fail(ErrorCode::InvalidInstance, who + "negative leader dimension");
    if (l.followers.param_dim != l.nx)
      fail(ErrorCode::InvalidInstance, who + "followers must be parameterized by the leader variables");
    l.poly.validate();
    if (l.poly.dim() != s) fail(ErrorCode::DimensionMismatch, who + "polyhedron dimension");
    if (c[i].size() != s) fail(ErrorCode::DimensionMismatch, who + "c length");
    if (C[i].rows() != s || C[i].cols() != total - s + num_prices())
      fail(ErrorCode::DimensionMismatch, who + "C shape");
  }
  if (market_G.rows() != market_h.size() || (market_G.rows() > 0 && market_G.cols() != total))
    fail(ErrorCode::DimensionMismatch, "market clearing shape");
}

ComplementaritySet leader_feasible_set(const StackelbergLeader& l) {
  const Index s = l.strategy_dim();
  if (l.followers.players.empty()) {
    ComplementaritySet set(l.nx);
    set.base = l.poly;
    if (set.base.E.cols() != l.nx) set.base.E.resize(0, l.nx);
    set.M.resize(0, l.nx);
    return set;
  }
  FacileNashGame g = l.followers;
  g.param_dim = l.nx;
  KktSystem sys = kkt_lcp(g);
  ComplementaritySet set = std::move(sys.set);
  const Index n = set.dim();
  Vector row(n);
  for (Index r = 0; r < l.poly.rows(); ++r) {
    row.setZero();
    row.head(s) = l.poly.A.row(r).transpose();
    set.base.add_le(row, l.poly.b(r));
  }
  for (Index r = 0; r < l.poly.eq_rows(); ++r) {
    row.setZero();
    row.head(s) = l.poly.E.row(r).transpose();
    set.base.add_eq(row, l.poly.f(r));
  }
  return set;
}

Vector MixedProfile::mean_strategy(const Nasp& n, std::size_t i) const {
  const Index s = n.leaders[i].strategy_dim();
  Vector m = Vector::Zero(s);
  for (const SupportEntry& e : supports.at(i)) m += e.probability * e.point.head(s);
  return m;
}

bool MixedProfile::is_pure() const {
  return std::all_of(supports.begin(), supports.end(), [](const auto& s) { return s.size() == 1; });
}

namespace {

// Rivals' strategies followed by prices, as leader i's C expects.
Vector rival_vector(const Nasp& n, const MixedProfile& p, std::size_t i) {
  Vector v(n.total_strategy_dim() - n.leaders[i].strategy_dim() + n.num_prices());
  Index off = 0;
  for (std::size_t j = 0; j < n.leaders.size(); ++j) {
    if (j == i) continue;
    const Vector m = p.mean_strategy(n, j);
    v.segment(off, m.size()) = m;
    off += m.size();
  }
  v.tail(n.num_prices()) = p.prices;
  return v;
}

// Column of leader i's C that multiplies coordinate k of leader j.
Index rival_column(const Nasp& n, std::size_t i, std::size_t j, Index k) {
  Index off = 0;
  for (std::size_t m = 0; m < j; ++m)
    if (m != i) off += n.leaders[m].strategy_dim();
  return off + k;
}

}  // namespace

double expected_payoff(const Nasp& n, const MixedProfile& profile, std::size_t i) {
  const Vector m = profile.mean_strategy(n, i);
  return (n.c[i] + n.C[i] * rival_vector(n, profile, i)).dot(m);
}

void validate_profile(const Nasp& n, const MixedProfile& profile) {
  if (profile.supports.size() != n.leaders.size())
    fail(ErrorCode::ProfileMismatch, "profile has " + std::to_string(profile.supports.size()) +
                                         " leaders, instance has " + std::to_string(n.leaders.size()));
  if (profile.prices.size() != n.num_prices()) fail(ErrorCode::ProfileMismatch, "price vector length");
  for (std::size_t i = 0; i < n.leaders.size(); ++i) {
    const std::string who = "leader " + std::to_string(i) + ": ";
    const auto& sup = profile.supports[i];
    if (sup.empty()) fail(ErrorCode::ProfileMismatch, who + "empty support");
    const ComplementaritySet set = leader_feasible_set(n.leaders[i]);
    double total = 0.0;
    for (const SupportEntry& e : sup) {
      if (!(e.probability >= -1e-12)) fail(ErrorCode::ProfileMismatch, who + "negative probability");
      total += e.probability;
      if (e.point.size() != set.dim()) fail(ErrorCode::ProfileMismatch, who + "support point dimension");
      const double scale = std::max(1.0, e.point.cwiseAbs().maxCoeff());
      if (!contains(set, e.point, 1e-6 * scale))
        fail(ErrorCode::ProfileMismatch, who + "support point outside the feasible set");
    }
    if (std::abs(total - 1.0) > 1e-9)
      fail(ErrorCode::ProfileMismatch, who + "probabilities sum to " + std::to_string(total));
  }
}

std::vector<std::optional<Deviation>> deviation_check(const Nasp& n, const MixedProfile& profile, double tol) {
  std::vector<std::optional<Deviation>> out(n.leaders.size());
  for (std::size_t i = 0; i < n.leaders.size(); ++i) {
    const ComplementaritySet set = leader_feasible_set(n.leaders[i]);
    const Index s = n.leaders[i].strategy_dim();
    Vector obj = Vector::Zero(set.dim());
    obj.head(s) = n.c[i] + n.C[i] * rival_vector(n, profile, i);
    const double current = obj.head(s).dot(profile.mean_strategy(n, i));
    const SetOutcome best = optimize_over_set(set, obj);
    if (best.status == LpStatus::Infeasible)
      fail(ErrorCode::InvalidInstance, "leader " + std::to_string(i) + " has an empty feasible set");
    Deviation d;
    d.leader = i;
    d.current = current;
    if (best.status == LpStatus::Unbounded) {
      d.unbounded = true;
      d.point = best.anchor;
      d.ray = best.ray;
      d.value = -kInf;
      out[i] = d;
    } else if (best.value < current - tol) {
      d.point = best.point;
      d.value = best.value;
      out[i] = d;
    }
  }
  return out;
}

std::vector<SupportEntry> decompose_mixed(const HullFormulation& hull, const Vector& lifted,
                                          const std::vector<Polyhedron>& original_pieces,
                                          const std::vector<Index>& keep) {
  std::vector<SupportEntry> out;
  for (const SupportPoint& sp : decompose_hull_point(hull, lifted)) {
    auto full = lift_point(original_pieces.at(static_cast<std::size_t>(sp.piece)), keep, sp.x);
    if (!full) {
      for (const Polyhedron& other : original_pieces)
        if ((full = lift_point(other, keep, sp.x))) break;
    }
    if (!full) fail(ErrorCode::NumericalFailure, "support point could not be lifted to its piece");
    out.push_back(SupportEntry{std::move(*full), sp.weight});
  }
  return out;
}

namespace {

struct LeaderContext {
  ComplementaritySet set;
  std::vector<Piece> pieces;
  std::map<Encoding, std::size_t> index_of;
  std::vector<Index> keep;
  std::map<std::size_t, MappedPiece> compressed;
  std::vector<std::size_t> order;
};

std::vector<Index> payoff_coordinates(const Nasp& n, std::size_t i) {
  const Index s = n.leaders[i].strategy_dim();
  const Index off = n.strategy_offset(i);
  std::vector<Index> keep;
  for (Index k = 0; k < s; ++k) {
    bool used = n.c[i](k) != 0.0 || !n.C[i].row(k).isZero(0.0);
    for (std::size_t j = 0; j < n.leaders.size() && !used; ++j)
      if (j != i) used = !n.C[j].col(rival_column(n, j, i, k)).isZero(0.0);
    if (!used && n.num_prices() > 0) used = !n.market_G.col(off + k).isZero(0.0);
    if (used) keep.push_back(k);
  }
  return keep;
}

std::vector<LeaderContext> prepare(const Nasp& n, const SolveOptions& opts, const Deadline& deadline) {
  n.validate();
  std::vector<LeaderContext> ctx(n.leaders.size());
  const Lcg64 root(opts.seed);
  for (std::size_t i = 0; i < n.leaders.size(); ++i) {
    deadline.check();
    LeaderContext& c = ctx[i];
    c.set = leader_feasible_set(n.leaders[i]);
    c.pieces = enumerate_pieces(c.set);
    if (c.pieces.empty())
      fail(ErrorCode::InvalidInstance, "leader " + std::to_string(i) + " has an empty feasible set");
    for (std::size_t p = 0; p < c.pieces.size(); ++p) c.index_of[c.pieces[p].code] = p;
    c.keep = payoff_coordinates(n, i);
    c.order.resize(c.pieces.size());
    std::iota(c.order.begin(), c.order.end(), std::size_t{0});
    if (opts.strategy == Strategy::ReverseSequential) std::reverse(c.order.begin(), c.order.end());
    if (opts.strategy == Strategy::Random) {
      Lcg64 rng = root.split(i);
      rng.shuffle(c.order);
    }
  }
  return ctx;
}

const MappedPiece& compressed_piece(LeaderContext& c, std::size_t p) {
  auto it = c.compressed.find(p);
  if (it == c.compressed.end()) it = c.compressed.emplace(p, compress_piece(c.pieces[p].poly, c.keep)).first;
  return it->second;
}

struct Restricted {
  bool found = false;
  MixedProfile profile;
};

Restricted solve_restricted(const Nasp& n, std::vector<LeaderContext>& ctx,
                            const std::vector<std::vector<std::size_t>>& J, bool pure, bool select,
                            const Deadline& deadline) {
  const std::size_t L = n.leaders.size();
  std::vector<HullFormulation> hulls;
  hulls.reserve(L);
  for (std::size_t i = 0; i < L; ++i) {
    std::vector<MappedPiece> parts;
    for (std::size_t p : J[i]) parts.push_back(compressed_piece(ctx[i], p));
    HullFormulation h = balas_hull(std::move(parts));
    for (std::size_t p : J[i]) h.codes.push_back(ctx[i].pieces[p].code);
    hulls.push_back(std::move(h));
  }

  FacileNashGame game;
  const Index np = n.num_prices();
  std::vector<Index> hoff(L + 1, 0);
  for (std::size_t i = 0; i < L; ++i) hoff[i + 1] = hoff[i] + hulls[i].dim();
  const Index total = hoff[L];
  for (std::size_t i = 0; i < L; ++i) {
    const HullFormulation& h = hulls[i];
    const std::vector<Index>& R = ctx[i].keep;
    QuadraticPlayer p;
    p.c = Vector::Zero(h.dim());
    p.Q = Matrix::Zero(h.dim(), h.dim());
    p.C = Matrix::Zero(h.dim(), total - h.dim() + np);
    p.feasible = h.lifted;
    for (std::size_t r = 0; r < R.size(); ++r) {
      const Index row = h.x_offset + static_cast<Index>(r);
      p.c(row) = n.c[i](R[r]);
      Index colbase = 0;
      for (std::size_t j = 0; j < L; ++j) {
        if (j == i) continue;
        const std::vector<Index>& Rj = ctx[j].keep;
        for (std::size_t r2 = 0; r2 < Rj.size(); ++r2)
          p.C(row, colbase + hulls[j].x_offset + static_cast<Index>(r2)) =
              n.C[i](R[r], rival_column(n, i, j, Rj[r2]));
        colbase += hulls[j].dim();
      }
      const Index price_col = n.C[i].cols() - np;
      for (Index k = 0; k < np; ++k) p.C(row, colbase + k) = n.C[i](R[r], price_col + k);
    }
    game.players.push_back(std::move(p));
  }
  game.market_h = n.market_h;
  game.market_G = Matrix::Zero(np, total);
  for (std::size_t i = 0; i < L; ++i) {
    const std::vector<Index>& R = ctx[i].keep;
    const Index soff = n.strategy_offset(i);
    for (std::size_t r = 0; r < R.size(); ++r)
      for (Index k = 0; k < np; ++k)
        game.market_G(k, hoff[i] + hulls[i].x_offset + static_cast<Index>(r)) = n.market_G(k, soff + R[r]);
  }

  PneOptions po;
  po.deadline = deadline;
  if (select) {
    Vector sel = Vector::Zero(total);
    for (std::size_t i = 0; i < L; ++i)
      for (std::size_t r = 0; r < ctx[i].keep.size(); ++r)
        sel(hoff[i] + hulls[i].x_offset + static_cast<Index>(r)) = n.c[i](ctx[i].keep[r]);
    po.selection = sel;
  }
  if (pure)
    for (std::size_t i = 0; i < L; ++i)
      for (Index j = 0; j < hulls[i].piece_count; ++j) po.binary_vars.push_back(hoff[i] + hulls[i].delta_offset + j);

  const PneResult r = find_pne(game, po);
  Restricted out;
  if (!r.found) return out;
  out.found = true;
  out.profile.prices = r.prices;
  for (std::size_t i = 0; i < L; ++i) {
    std::vector<Polyhedron> originals;
    for (std::size_t p : J[i]) originals.push_back(ctx[i].pieces[p].poly);
    const Vector lifted = r.players.segment(hoff[i], hulls[i].dim());
    out.profile.supports.push_back(decompose_mixed(hulls[i], lifted, originals, ctx[i].keep));
  }
  return out;
}

void finish(const Nasp& n, SolveReport& rep, const std::vector<LeaderContext>& ctx,
            const std::vector<std::vector<std::size_t>>& J) {
  rep.pieces_total.clear();
  rep.pieces_used.clear();
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    rep.pieces_total.push_back(ctx[i].pieces.size());
    rep.pieces_used.push_back(J.empty() ? 0 : J[i].size());
  }
  if (rep.status == SolveStatus::MNE || rep.status == SolveStatus::PNE) {
    rep.status = rep.profile.is_pure() ? SolveStatus::PNE : SolveStatus::MNE;
    rep.payoffs.clear();
    for (std::size_t i = 0; i < n.leaders.size(); ++i) rep.payoffs.push_back(expected_payoff(n, rep.profile, i));
  }
}

template <class Body>
SolveReport timed(const SolveOptions& opts, Body&& body) {
  const auto start = std::chrono::steady_clock::now();
  const Deadline deadline(opts.time_limit);
  SolveReport rep;
  try {
    body(rep, deadline);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TimeLimit) throw;
    rep.status = SolveStatus::TimeLimit;
    rep.profile = MixedProfile{};
    rep.certified = false;
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

bool certify(const Nasp& n, const MixedProfile& profile) {
  for (const auto& d : deviation_check(n, profile)) if (d) return false;
  return true;
}

std::vector<std::size_t> all_pieces(const LeaderContext& c) {
  std::vector<std::size_t> v(c.pieces.size());
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

// Bit 1 where the z side is larger; ties go to 0.
Encoding threshold(const ComplementaritySet& s, const Vector& x) {
  const Vector z = s.z(x);
  Encoding e(static_cast<std::size_t>(s.num_compl()), 0);
  for (Index i = 0; i < s.num_compl(); ++i) {
    const double xc = x(s.compl_vars[i]);
    const double scale = std::max({1.0, std::abs(xc), std::abs(z(i))});
    e[i] = xc > z(i) + 1e-9 * scale ? 1 : 0;
  }
  return e;
}

bool add_next(const LeaderContext& c, std::vector<std::size_t>& J, std::size_t k) {
  std::size_t added = 0;
  for (std::size_t p : c.order) {
    if (added == k) break;
    if (std::find(J.begin(), J.end(), p) != J.end()) continue;
    J.push_back(p);
    ++added;
  }
  return added > 0;
}

}  // namespace

SolveReport full_enumeration(const Nasp& n, const SolveOptions& opts) {
  std::vector<LeaderContext> ctx;
  std::vector<std::vector<std::size_t>> J;
  SolveReport rep = timed(opts, [&](SolveReport& r, const Deadline& deadline) {
    ctx = prepare(n, opts, deadline);
    for (const LeaderContext& c : ctx) J.push_back(all_pieces(c));
    r.iterations = 1;
    Restricted res = solve_restricted(n, ctx, J, false, opts.select, deadline);
    if (!res.found) {
      r.status = SolveStatus::NoEquilibrium;
      return;
    }
    r.status = SolveStatus::MNE;
    r.profile = std::move(res.profile);
    r.certified = certify(n, r.profile);
  });
  finish(n, rep, ctx, J);
  return rep;
}

SolveReport pure_enumeration(const Nasp& n, const SolveOptions& opts) {
  std::vector<LeaderContext> ctx;
  std::vector<std::vector<std::size_t>> J;
  SolveReport rep = timed(opts, [&](SolveReport& r, const Deadline& deadline) {
    ctx = prepare(n, opts, deadline);
    for (const LeaderContext& c : ctx) J.push_back(all_pieces(c));
    r.iterations = 1;
    Restricted res = solve_restricted(n, ctx, J, true, opts.select, deadline);
    if (!res.found) {
      r.status = SolveStatus::NoEquilibrium;
      return;
    }
    r.status = SolveStatus::PNE;
    r.profile = std::move(res.profile);
    r.certified = certify(n, r.profile);
  });
  finish(n, rep, ctx, J);
  return rep;
}

SolveReport inner_approximation(const Nasp& n, const SolveOptions& opts) {
  if (opts.k == 0) fail(ErrorCode::InvalidConfig, "k must be at least 1");
  std::vector<LeaderContext> ctx;
  std::vector<std::vector<std::size_t>> J;
  SolveReport rep = timed(opts, [&](SolveReport& r, const Deadline& deadline) {
    ctx = prepare(n, opts, deadline);
    const std::size_t L = ctx.size();
    J.assign(L, {});
    if (!opts.initial.empty() && opts.initial.size() != L)
      fail(ErrorCode::InvalidConfig, "initial pieces must be given for every leader");
    for (std::size_t i = 0; i < L; ++i) {
      if (!opts.initial.empty() && !opts.initial[i].empty()) {
        for (const Encoding& e : opts.initial[i]) {
          auto it = ctx[i].index_of.find(e);
          if (it == ctx[i].index_of.end())
            fail(ErrorCode::InvalidConfig, "leader " + std::to_string(i) + ": encoding " + to_string(e) +
                                               " is not a nonempty piece");
          J[i].push_back(it->second);
        }
      } else {
        add_next(ctx[i], J[i], opts.k);
      }
    }

    for (;;) {
      deadline.check();
      ++r.iterations;
      Restricted res = solve_restricted(n, ctx, J, false, opts.select, deadline);
      if (!res.found) {
        bool grew = false;
        for (std::size_t i = 0; i < L; ++i) grew |= add_next(ctx[i], J[i], opts.k);
        if (!grew) {
          r.status = SolveStatus::NoEquilibrium;
          return;
        }
        continue;
      }
      if (opts.stop_before_deviation) {
        r.status = SolveStatus::MNE;
        r.profile = std::move(res.profile);
        r.certified = false;
        return;
      }
      const auto devs = deviation_check(n, res.profile);
      bool grew = false, deviated = false;
      for (std::size_t i = 0; i < L; ++i) {
        if (!devs[i]) continue;
        deviated = true;
        const Encoding code = threshold(ctx[i].set, devs[i]->point);
        auto it = ctx[i].index_of.find(code);
        std::optional<std::size_t> pick;
        if (it != ctx[i].index_of.end() &&
            std::find(J[i].begin(), J[i].end(), it->second) == J[i].end())
          pick = it->second;
        if (!pick) {
          const double scale = std::max(1.0, devs[i]->point.cwiseAbs().maxCoeff());
          for (std::size_t p : ctx[i].order) {
            if (std::find(J[i].begin(), J[i].end(), p) != J[i].end()) continue;
            if (ctx[i].pieces[p].poly.violation(devs[i]->point) <= 1e-7 * scale) {
              pick = p;
              break;
            }
          }
        }
        if (pick) {
          J[i].push_back(*pick);
          grew = true;
        } else {
          grew |= add_next(ctx[i], J[i], opts.k);
        }
      }
      if (!deviated) {
        r.status = SolveStatus::MNE;
        r.profile = std::move(res.profile);
        r.certified = true;
        return;
      }
      if (!grew) {
        // Every piece is already included: this was the full enumeration.
        r.status = SolveStatus::MNE;
        r.profile = std::move(res.profile);
        r.certified = false;
        return;
      }
    }
  });
  finish(n, rep, ctx, J);
  return rep;
}

}  // namespace nasp
