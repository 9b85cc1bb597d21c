#include "cli.hpp"
#include "ivpoly/matfun.hpp"
#include "ivpoly/report.hpp"
#include "ivpoly/verify.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace ivp;

namespace {

struct Outcome {
  bool passed = true;
  std::vector<std::string> failures;

  void add(const TestReport& r) {
    if (!r.passed) {
      passed = false;
      failures.push_back(r.name + " stat=" + format_double(r.statistic) + " thr=" + format_double(r.threshold) +
                         " " + r.notes);
    }
  }
  void add(const std::vector<TestReport>& rs) {
    for (const auto& r : rs) add(r);
  }
  void fail(const std::string& why) {
    passed = false;
    failures.push_back(why);
  }
};

std::vector<Step> word(const std::string& s) { return DownRightPath::parse_word(s); }

DownRightPath from_top(int M, const std::string& w) { return {{0, M}, word(w)}; }

Outcome criterion1() {
  Outcome o;
  for (int d : {1, 2, 3, 6}) o.add(algebraic_checks(d, 10000, Seed(101, {static_cast<std::uint64_t>(d)}), 1e-9));
  return o;
}

Outcome criterion2() {
  Outcome o;
  for (int d : {1, 2, 3}) o.add(special_function_checks(d, 100000, Seed(202, {static_cast<std::uint64_t>(d)})));
  return o;
}

Outcome criterion3() {
  Outcome o;
  for (int d : {1, 2}) {
    IdentitySuiteOptions opts;
    opts.d = d;
    opts.samples = 100000;
    o.add(identity_suite(opts, Seed(303, {static_cast<std::uint64_t>(d)})));
  }
  return o;
}

Outcome criterion4() {
  Outcome o;
  struct Case {
    int d;
    double theta, u;
  };
  const std::vector<Case> cases{{1, 2.0, 0.0}, {2, 3.0, 0.5}, {3, 4.0, 1.0}};
  std::uint64_t k = 0;
  for (const Case& c : cases) {
    const Seed s(404, {k++});
    o.add(one_step_identity(c.d, c.theta, c.u, 100000, s.child(0), 0.01));
    QuadrantStationarityConfig cfg;
    cfg.d = c.d;
    cfg.theta = c.theta;
    cfg.u = c.u;
    cfg.M = 2;
    cfg.paths = {from_top(2, "RRDD"), from_top(2, "RDRD"), from_top(2, "DRDR")};
    cfg.replicates = 100000;
    o.add(stationarity_quadrant(cfg, s.child(1)));
    o.add(expectation_identity(c.d, c.theta, c.u, 2, 3, 2, 100000, s.child(2)));
  }
  return o;
}

Outcome criterion5() {
  Outcome o;
  struct Case {
    int d;
    std::vector<double> thetas;
    double u;
  };
  const std::vector<Case> cases{{1, {2.0, 2.0}, 0.3},           {1, {1.8, 2.4}, 0.3},
                                {2, {2.5, 2.5}, 0.2},           {2, {1.8, 2.2}, 0.2},
                                {2, {2.5, 2.5, 2.5, 2.5}, 0.3}, {2, {1.9, 2.6, 2.2, 3.0}, 0.3}};
  const double level = 0.01 / static_cast<double>(cases.size());
  std::uint64_t k = 0;
  for (const Case& c : cases) {
    StripStationarityConfig cfg;
    cfg.params.d = c.d;
    cfg.params.thetas = c.thetas;
    cfg.params.u = c.u;
    cfg.params.v = -c.u;
    cfg.bottom_word.assign(c.thetas.size(), Step::Down);
    cfg.replicates = 100000;
    cfg.level = level;
    o.add(stationarity_strip_equilibrium(cfg, Seed(505, {k++})));
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  o.add(mcmc_quadrature_check(1.5, 0.8, 0.9, 200000, Seed(606, {0})));
  StripParams sp;
  sp.d = 1;
  sp.thetas = {1.5, 1.9, 2.3};
  sp.u = 0.5;
  sp.v = 0.6;
  sp.regime = StripRegime::MaximalCurrent;
  o.add(push_block_marginal_check(sp, word("RDR"), 20000, Seed(606, {1})));
  return o;
}

Outcome criterion7() {
  Outcome o;
  o.add(martingale_check(1, 3.0, 8, 100000, Seed(707, {1})));
  o.add(martingale_check(2, 3.0, 8, 100000, Seed(707, {2})));
  return o;
}

Outcome criterion8() {
  Outcome o;
  std::uint64_t k = 0;
  for (double theta : {1.5, 2.0, 3.0}) {
    const QuadrantParams qp = QuadrantParams::homogeneous(1, theta, 0.0);
    o.add(free_energy(FreeEnergyModel::QuadrantDelta, &qp, nullptr, 256, 400, Seed(808, {k++})).report);
  }
  for (int d : {1, 2}) {
    StripParams sp;
    sp.d = d;
    sp.thetas = {2.5, 2.5, 2.5, 2.5};
    sp.u = 0.3;
    sp.v = -0.3;
    o.add(free_energy(FreeEnergyModel::Strip, nullptr, &sp, 512, 400, Seed(808, {k++})).report);
  }
  const QuadrantParams q3 = QuadrantParams::homogeneous(3, 2.0, 0.0);
  const FreeEnergyResult r3 = free_energy(FreeEnergyModel::QuadrantDelta, &q3, nullptr, 256, 100, Seed(808, {k++}));
  std::printf("  d=3 quadrant (theta=2): estimate=%.6f -2psi_3=%.6f -6log(theta-1)=%.6f (not asserted)\n",
              r3.estimate.mean_logdet_over_n, r3.target, -6.0 * std::log(2.0 - 1.0) + 0.0);
  return o;
}

std::string run_cli(std::vector<std::string> args, int threads) {
  args.push_back("--threads");
  args.push_back(std::to_string(threads));
  std::ostringstream out;
  const int code = cli::run(cli::parse_config(args), out);
  return std::to_string(code) + "\n" + out.str();
}

Outcome criterion9() {
  Outcome o;
  const std::vector<std::vector<std::string>> commands{
      {"quadrant", "--boundary", "stationary", "--d", "2", "--theta", "3", "--u", "0.5", "--n", "6", "--m", "4",
       "--M", "4", "--seed", "9"},
      {"strip", "--d", "2", "--thetas", "2,2.5,3", "--u", "0.3", "--v", "-0.3", "--steps", "5", "--seed", "9"},
      {"strip", "--d", "1", "--thetas", "1.5,2", "--u", "0.5", "--v", "0.6", "--regime", "maximal_current",
       "--steps", "2", "--sweeps", "40", "--burn-in", "10", "--seed", "9"},
      {"free-energy", "--model", "quadrant-delta", "--d", "2", "--theta", "3", "--n", "24", "--replicates", "16",
       "--seed", "9"},
      {"verify", "martingale", "--d", "2", "--theta", "3", "--k-max", "6", "--replicates", "400", "--seed", "9"},
      {"verify", "stationarity-strip", "--d", "1", "--thetas", "2,2", "--u", "0.3", "--v", "-0.3", "--replicates",
       "400", "--seed", "9"},
      {"verify", "identity-suite", "--d", "2", "--samples", "4000", "--cases", "200", "--seed", "9"},
      {"free-energy", "--model", "strip", "--d", "2", "--thetas", "2.5,2.5", "--u", "0.3", "--v", "-0.3", "--n", "64",
       "--replicates", "16", "--seed", "9"},
      {"gibbs-sample", "--d", "1", "--thetas", "1.5", "--u", "0.8", "--v", "0.9", "--sweeps", "60", "--burn-in",
       "10", "--seed", "9"}};
  for (const auto& cmd : commands) {
    const std::string one = run_cli(cmd, 1);
    for (int t : {4, 8}) {
      if (run_cli(cmd, t) != one) o.fail(cmd[0] + (cmd.size() > 1 ? " " + cmd[1] : "") + " differs at " +
                                         std::to_string(t) + " threads");
    }
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"1 algebraic exactness", 60, criterion1},       {"2 special functions", 300, criterion2},
      {"3 identity suite", 900, criterion3},           {"4 quadrant stationarity", 600, criterion4},
      {"5 strip equilibrium stationarity", 600, criterion5}, {"6 maximal-current checks", 900, criterion6},
      {"7 martingale", 300, criterion7},               {"8 free energy", 1800, criterion8},
      {"9 determinism across threads", 600, criterion9}};
  bool all = true;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) o.fail("runtime " + format_double(secs) + " s over budget");
    for (const auto& f : o.failures) std::printf("  %s\n", f.c_str());
    std::printf("%s criterion %s (%.1f s)\n", o.passed ? "PASS" : "FAIL", c.name, secs);
    std::fflush(stdout);
    all = all && o.passed;
  }
  return all ? 0 : 1;
}
