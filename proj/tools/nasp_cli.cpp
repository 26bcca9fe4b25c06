#include "nasp/generators.hpp"
#include "nasp/io.hpp"

#include "CLI11.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

using namespace nasp;

namespace {

enum Exit : int {
  kOk = 0,
  kDeviation = 1,
  kNoEquilibrium = 2,
  kTimeLimit = 3,
  kInputError = 4,
  kNumerical = 5,
};

int exit_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::NumericalFailure:
    case ErrorCode::DegenerateWeight:
      return kNumerical;
    case ErrorCode::TimeLimit:
      return kTimeLimit;
    default:
      return kInputError;
  }
}

int exit_for(SolveStatus s) {
  switch (s) {
    case SolveStatus::MNE:
    case SolveStatus::PNE:
      return kOk;
    case SolveStatus::NoEquilibrium:
      return kNoEquilibrium;
    case SolveStatus::TimeLimit:
      return kTimeLimit;
  }
  return kNumerical;
}

void emit(const std::string& path, const Json& j) {
  if (path.empty() || path == "-") std::cout << dump(j);
  else write_json_file(path, j);
}

struct GenerateArgs {
  std::string kind = "energy";
  std::uint64_t seed = 0;
  std::size_t countries = 2;
  std::size_t followers = 2;
  bool no_trade = false;
  int tax_revenue = 0;
  std::vector<long> q;
  long p = 0, t = 0, r = 0;
  bool exact_pick = false;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  InstanceFile f;
  if (a.kind == "energy") {
    GenConfig cfg;
    cfg.seed = a.seed;
    cfg.countries = a.countries;
    cfg.followers_min = cfg.followers_max = a.followers;
    cfg.trade = !a.no_trade;
    cfg.tax_revenue = a.tax_revenue;
    f.energy = gen_energy(cfg);
  } else if (a.kind == "remark2" || a.kind == "remark2-flipped") {
    f.nasp = remark2_game(a.kind == "remark2-flipped");
  } else if (a.kind == "example1") {
    f.nasp = example1_game();
  } else if (a.kind == "pne-hardness" || a.kind == "mne-hardness") {
    SubsetSumInterval d{a.q, a.p, a.t, a.r};
    f.nasp = a.kind == "pne-hardness" ? gen_pne_hardness(d, a.exact_pick) : gen_mne_hardness(d);
  } else if (a.kind == "random-trivial" || a.kind == "no-equilibrium") {
    Lcg64 rng(a.seed);
    f.nasp = a.kind == "random-trivial" ? random_trivial_nasp(rng) : no_equilibrium_nasp(rng);
  } else {
    fail(ErrorCode::InvalidConfig, "unknown instance kind '" + a.kind + "'");
  }
  emit(a.out, instance_to_json(f));
  return kOk;
}

struct SolveArgs {
  std::vector<std::string> inputs;
  std::string algorithm = "full";
  std::string strategy = "seq";
  std::size_t k = 1;
  std::uint64_t seed = 0;
  double time_limit = 1800.0;
  bool select = false;
  bool timing = false;
  std::size_t jobs = 1;
  std::string out;
};

Strategy parse_strategy(const std::string& s) {
  if (s == "seq") return Strategy::Sequential;
  if (s == "rseq") return Strategy::ReverseSequential;
  if (s == "rand") return Strategy::Random;
  fail(ErrorCode::InvalidConfig, "unknown strategy '" + s + "'");
}

/// Solves one file; returns the exit code and the result JSON (if any).
int solve_one(const SolveArgs& a, const std::string& in, Json& result, std::string& error) {
  try {
    const InstanceFile f = instance_from_json(read_json_file(in));
    SolveOptions o;
    o.time_limit = a.time_limit;
    o.select = a.select;
    o.strategy = parse_strategy(a.strategy);
    o.k = a.k;
    o.seed = a.seed;
    SolveReport r;
    if (a.algorithm == "full") r = full_enumeration(f.nasp, o);
    else if (a.algorithm == "inner") r = inner_approximation(f.nasp, o);
    else if (a.algorithm == "pure") r = pure_enumeration(f.nasp, o);
    else fail(ErrorCode::InvalidConfig, "unknown algorithm '" + a.algorithm + "'");
    ResultMeta meta{a.algorithm, a.algorithm == "inner" ? a.strategy : "", a.algorithm == "inner" ? a.k : 0,
                    a.seed, a.select, a.timing};
    result = result_to_json(r, meta);
    return exit_for(r.status);
  } catch (const Error& e) {
    error = e.what();
    return exit_for(e.code());
  }
}

std::string batch_output(const std::string& dir, const std::string& in) {
  return (std::filesystem::path(dir) / (std::filesystem::path(in).stem().string() + ".result.json")).string();
}

int run_solve(const SolveArgs& a) {
  if (!(a.time_limit > 0)) fail(ErrorCode::InvalidConfig, "time limit must be positive");
  if (a.k == 0) fail(ErrorCode::InvalidConfig, "k must be at least 1");
  if (a.inputs.size() == 1) {
    Json result;
    std::string error;
    const int code = solve_one(a, a.inputs[0], result, error);
    if (!error.empty()) {
      std::cerr << "error: " << error << "\n";
      return code;
    }
    emit(a.out, result);
    return code;
  }

  // Batch mode: one result file per input inside the output directory.
  if (a.out.empty()) fail(ErrorCode::InvalidConfig, "batch solves need --out DIR");
  std::filesystem::create_directories(a.out);
  std::vector<int> codes(a.inputs.size(), kOk);
  std::vector<std::string> errors(a.inputs.size());
  std::atomic<std::size_t> next{0};
  std::mutex io;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < a.inputs.size();) {
      Json result;
      codes[i] = solve_one(a, a.inputs[i], result, errors[i]);
      if (errors[i].empty()) {
        try {
          write_json_file(batch_output(a.out, a.inputs[i]), result);
        } catch (const Error& e) {
          errors[i] = e.what();
          codes[i] = kInputError;
        }
      }
      std::lock_guard<std::mutex> lock(io);
      std::cerr << a.inputs[i] << ": " << (errors[i].empty() ? "exit " + std::to_string(codes[i]) : errors[i]) << "\n";
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::max<std::size_t>(1, std::min(a.jobs, a.inputs.size())); ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  return *std::max_element(codes.begin(), codes.end());
}

int run_validate(const std::string& in, const std::string& result_path, double tol) {
  const InstanceFile f = instance_from_json(read_json_file(in));
  const SolveReport r = result_from_json(read_json_file(result_path));
  if (r.status != SolveStatus::MNE && r.status != SolveStatus::PNE) {
    std::cout << "result has no equilibrium (status " << to_string(r.status) << ")\n";
    return exit_for(r.status);
  }
  try {
    validate_profile(f.nasp, r.profile);
  } catch (const Error& e) {
    std::cout << "FAIL invalid profile: " << e.what() << "\n";
    return kInputError;
  }
  const auto devs = deviation_check(f.nasp, r.profile, tol);
  bool ok = true;
  for (std::size_t i = 0; i < devs.size(); ++i) {
    if (!devs[i]) continue;
    ok = false;
    std::cout << "FAIL leader " << i << " deviates: payoff " << devs[i]->current << " -> "
              << (devs[i]->unbounded ? std::string("unbounded") : std::to_string(devs[i]->value)) << "\n";
  }
  if (ok) std::cout << "OK no profitable deviation\n";
  return ok ? kOk : kDeviation;
}

int run_report(const std::string& in, const std::string& result_path, const std::string& out, const std::string& csv) {
  const InstanceFile f = instance_from_json(read_json_file(in));
  if (!f.energy) fail(ErrorCode::InvalidInstance, "report needs an energy instance");
  const SolveReport r = result_from_json(read_json_file(result_path));
  if (r.status != SolveStatus::MNE && r.status != SolveStatus::PNE)
    fail(ErrorCode::ProfileMismatch, std::string("result has no equilibrium (status ") + to_string(r.status) + ")");
  const EnergyReport rep = report(*f.energy, r.profile);
  emit(out, to_json(rep));
  if (!csv.empty()) {
    std::ofstream os(csv, std::ios::binary);
    if (!os) fail(ErrorCode::InvalidInstance, "cannot write '" + csv + "'");
    os << report_csv(rep);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibria of Nash games among Stackelberg players"};
  app.require_subcommand(1);

  GenerateArgs g;
  CLI::App* gen = app.add_subcommand("generate", "Write an instance JSON");
  gen->add_option("--kind", g.kind, "energy, remark2, remark2-flipped, example1, pne-hardness, mne-hardness, "
                                    "random-trivial or no-equilibrium")
      ->capture_default_str();
  gen->add_option("--seed", g.seed, "Random seed")->capture_default_str();
  gen->add_option("--countries", g.countries, "Energy: number of countries")->capture_default_str();
  gen->add_option("--followers", g.followers, "Energy: producers per country")->capture_default_str();
  gen->add_flag("--no-trade", g.no_trade, "Energy: disable trade");
  gen->add_option("--taxb", g.tax_revenue, "Energy: tax revenue toggle (0 or 1)")->capture_default_str();
  gen->add_option("--q", g.q, "Hardness: subset-sum weights");
  gen->add_option("--p", g.p, "Hardness: interval start");
  gen->add_option("--t", g.t, "Hardness: interval end (exclusive)");
  gen->add_option("--r", g.r, "Hardness: log2(t - p)");
  gen->add_flag("--exact-pick", g.exact_pick, "PNE hardness: the Latin leader picks exactly r items");
  gen->add_option("--out", g.out, "Output path (stdout when omitted)");

  SolveArgs s;
  CLI::App* sol = app.add_subcommand("solve", "Compute an equilibrium");
  sol->add_option("--in", s.inputs, "Instance file(s)")->required();
  sol->add_option("--algorithm", s.algorithm, "full, inner or pure")
      ->check(CLI::IsMember({"full", "inner", "pure"}))
      ->capture_default_str();
  sol->add_option("--strategy", s.strategy, "Inner approximation extension: seq, rseq or rand")
      ->check(CLI::IsMember({"seq", "rseq", "rand"}))
      ->capture_default_str();
  sol->add_option("--k", s.k, "Pieces added per extension")->capture_default_str();
  sol->add_option("--seed", s.seed, "Seed for the random strategy")->capture_default_str();
  sol->add_option("--timelimit", s.time_limit, "Seconds")->capture_default_str();
  sol->add_flag("--select", s.select, "Prefer the equilibrium minimizing the sum of linear leader costs");
  sol->add_flag("--timing", s.timing, "Record wall time in the result");
  sol->add_option("--jobs", s.jobs, "Parallel solves for several inputs")->capture_default_str();
  sol->add_option("--out", s.out, "Result path, or directory for several inputs");

  std::string v_in, v_result;
  double v_tol = Tolerances::deviation;
  CLI::App* val = app.add_subcommand("validate", "Check a result for profitable deviations");
  val->add_option("--in", v_in, "Instance file")->required();
  val->add_option("--result", v_result, "Result file")->required();
  val->add_option("--tol", v_tol, "Deviation tolerance")->capture_default_str();

  std::string r_in, r_result, r_out, r_csv;
  CLI::App* rep = app.add_subcommand("report", "Energy market summary of a result");
  rep->add_option("--in", r_in, "Energy instance file")->required();
  rep->add_option("--result", r_result, "Result file")->required();
  rep->add_option("--out", r_out, "Report JSON path (stdout when omitted)");
  rep->add_option("--csv", r_csv, "Also write a CSV table here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*gen) return run_generate(g);
    if (*sol) return run_solve(s);
    if (*val) return run_validate(v_in, v_result, v_tol);
    if (*rep) return run_report(r_in, r_result, r_out, r_csv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kOk;
}
