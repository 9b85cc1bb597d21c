#include "cli.hpp"

#include "ivpoly/gibbs.hpp"
#include "ivpoly/parallel.hpp"
#include "ivpoly/report.hpp"
#include "ivpoly/verify.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <functional>
#include <iostream>
#include <sstream>
#include <variant>

namespace ivp::cli {

namespace {

using json = nlohmann::json;

struct Binding {
  std::string key;
  CLI::Option* opt;
  std::function<void(RunConfig&, const RunConfig&)> copy;
  std::function<void(RunConfig&, const json&)> load;
};

template <class T>
Binding bind_field(CLI::App& app, RunConfig& flags, const std::string& key, T RunConfig::*member,
             const std::string& desc) {
  CLI::Option* opt;
  const std::string flag = "--" + [&] {
    std::string s = key;
    std::replace(s.begin(), s.end(), '_', '-');
    return s;
  }();
  if constexpr (std::is_same_v<T, bool>) {
    opt = app.add_flag(flag, flags.*member, desc);
  } else if constexpr (std::is_same_v<T, std::vector<double>> || std::is_same_v<T, std::vector<std::string>>) {
    opt = app.add_option(flag, flags.*member, desc)->delimiter(',');
  } else {
    opt = app.add_option(flag, flags.*member, desc);
  }
  return {key, opt, [member](RunConfig& dst, const RunConfig& src) { dst.*member = src.*member; },
          [member](RunConfig& dst, const json& j) { dst.*member = j.get<T>(); }};
}

const char* kSampleDistHelp =
    "Draw Wishart, inverse-Wishart (density |x|^theta e^{-tr x} against the invariant measure) "
    "or matrix-GIG samples.";
const char* kQuadrantHelp =
    "Partition functions Z(n,m) = W(n,m) * (Z(n-1,m) + Z(n,m-1)) with W ~ inverse-Wishart(alpha_n + beta_m), "
    "under the delta boundary (B_1 = id) or the stationary Wishart/inverse-Wishart boundary.";
const char* kStripHelp =
    "Strip 0 <= n-m <= N with boundary disorder theta_m+u (left) and theta_m+v (right); "
    "equilibrium starts from the inverse-Wishart walk, maximal current from a two-layer Gibbs sample.";
const char* kGibbsHelp =
    "Metropolis-within-Gibbs sampling of the pinned two-layer Gibbs measure whose first layer is the "
    "maximal-current stationary state.";
const char* kVerifyHelp = "Statistical and algebraic verification suites; exit code 3 when a check fails.";
const char* kFreeEnergyHelp =
    "Monte Carlo estimate of log|Z(n,n)|/n against -2 psi(theta) (quadrant, d = 1) or "
    "-psi_d(theta-u) - psi_d(theta+u) (equilibrium strip).";

struct SuiteHelp {
  const char* name;
  const char* help;
};
const SuiteHelp kSuites[] = {
    {"identity-suite",
     "Algebraic identities of the star product, special functions, Cauchy and Littlewood identities, "
     "normalization constants."},
    {"stationarity-quadrant",
     "One-step update identity in law and increment laws along down-right paths from (0,M)."},
    {"stationarity-strip", "Equilibrium strip: increments along every path between the bottom path and the horizontal one."},
    {"martingale", "Point-to-line martingale mean and the pathwise determinant bound."},
    {"expectation", "E log|Z(n,m)| - log|Z(0,0)| = -n psi_d(theta-u) - m psi_d(theta+u)."},
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

void validate(const RunConfig& c) {
  require(c.d >= 1, "d must be a positive integer");
  require(c.threads >= 1, "threads must be at least 1");
  require(c.replicates >= 1, "replicates must be at least 1");
  require(c.samples >= 1 && c.cases >= 1, "samples and cases must be positive");
  require(c.format == "csv" || c.format == "json", "format must be csv or json");
  require(c.regime == "equilibrium" || c.regime == "maximal_current" || c.regime == "maximal-current",
          "regime must be equilibrium or maximal_current");
  require(c.boundary == "delta" || c.boundary == "stationary", "boundary must be delta or stationary");
  require(c.model == "quadrant-delta" || c.model == "strip", "model must be quadrant-delta or strip");
  require(c.dist == "wishart" || c.dist == "inverse-wishart" || c.dist == "gig",
          "dist must be wishart, inverse-wishart or gig");
  require(c.level > 0.0 && c.level < 1.0, "level must lie in (0,1)");
  parse_seed(c.seed);
  for (const auto& p : c.paths) DownRightPath::parse_word(p);

  const double lo = 0.5 * (c.d - 1);
  const bool stationary_quadrant = (c.subcommand == "quadrant" && c.boundary == "stationary") ||
                                   (c.subcommand == "verify" &&
                                    (c.suite == "stationarity-quadrant" || c.suite == "expectation"));
  if (stationary_quadrant) {
    std::ostringstream os;
    os << "stationary quadrant needs theta - u > (d-1)/2 and theta + u > (d-1)/2; got theta=" << c.theta
       << " u=" << c.u << " d=" << c.d;
    require(c.theta - c.u > lo && c.theta + c.u > lo, os.str());
    require(c.M >= 0, "M must be nonnegative");
  }
  if (c.subcommand == "quadrant") {
    require(c.n >= 0 && c.m >= 0, "n and m must be nonnegative");
    if (!c.force_identity_disorder) quadrant_params(c).validate(c.n, std::max<long>(c.m, c.M));
  }
  if (c.subcommand == "verify" && c.suite == "martingale") {
    require(2.0 * c.theta > 0.5 * (c.d + 1), "martingale needs 2 theta > (d+1)/2 so that E[W] is finite");
    require(c.k_max >= 1, "k_max must be positive");
  }
  if (c.subcommand == "verify" && c.suite == "expectation") {
    require(c.m <= c.M && c.n >= 0 && c.m >= 0, "expectation needs 0 <= m <= M and n >= 0");
  }
  if (c.subcommand == "strip" || c.subcommand == "gibbs-sample" ||
      (c.subcommand == "verify" && c.suite == "stationarity-strip") ||
      (c.subcommand == "free-energy" && c.model == "strip")) {
    try {
      strip_params(c).validate();
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
    if (c.subcommand == "verify" || c.subcommand == "free-energy") {
      require(std::abs(c.u + c.v) < 1e-12, "the equilibrium strip needs u + v = 0");
    }
  }
  if (c.subcommand == "free-energy" && c.model == "quadrant-delta") {
    try {
      quadrant_params(c).validate(c.n, c.n);
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
    require(c.n >= 1 && c.replicates >= 2, "free-energy needs n >= 1 and at least two replicates");
  }
}

Seed run_seed(const RunConfig& c) { return parse_seed(c.seed); }

using Cell = std::variant<double, long, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

void write_table(const Table& t, const std::string& format, std::ostream& out) {
  if (format == "json") {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json j;
      for (std::size_t i = 0; i < row.size(); ++i) {
        std::visit([&](const auto& x) { j[t.header[i]] = x; }, row[i]);
      }
      arr.push_back(j);
    }
    out << arr.dump(2) << '\n';
    return;
  }
  for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      if (const double* x = std::get_if<double>(&row[i])) out << format_double(*x);
      else if (const long* k = std::get_if<long>(&row[i])) out << *k;
      else out << std::get<std::string>(row[i]);
    }
    out << '\n';
  }
}

void add_entry_header(Table& t, int d) {
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) t.header.push_back("x" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
}

void push_entries(std::vector<Cell>& row, const Mat& x) {
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = i; j < x.cols(); ++j) row.emplace_back(x(i, j));
}

int write_reports(std::vector<TestReport> reports, const std::string& format, std::ostream& out) {
  std::stable_sort(reports.begin(), reports.end(),
                   [](const TestReport& a, const TestReport& b) { return a.name < b.name; });
  out << (format == "json" ? reports_to_json(reports) : reports_to_csv(reports));
  return all_passed(reports) ? kOk : kSuiteFailed;
}

std::vector<DownRightPath> quadrant_paths(const RunConfig& c) {
  std::vector<std::string> words = c.paths;
  if (words.empty()) words = {"RRDD", "RDRD", "DRDR"};
  std::vector<DownRightPath> out;
  for (const auto& w : words) out.push_back({{0, c.M}, DownRightPath::parse_word(w)});
  return out;
}

int run_sample_dist(const RunConfig& c, std::ostream& out) {
  const Seed seed = run_seed(c);
  Table t;
  t.header = {"index", "logdet"};
  add_entry_header(t, c.d);
  std::vector<Mat> xs(static_cast<std::size_t>(c.replicates));
  if (c.dist == "gig") {
    const GigParams g(c.a, c.p * identity(c.d), c.q * identity(c.d));
    Mat cur = identity(c.d);
    for (std::size_t r = 0; r < xs.size(); ++r) {
      cur = sample_matrix_gig(g, cur, c.mh_steps, seed.child(r));
      xs[r] = cur;
    }
  } else {
    require_shape(c.d, c.theta, "sample-dist");
    parallel_for(xs.size(), [&](std::size_t r) {
      xs[r] = c.dist == "wishart" ? sample_wishart(c.d, c.theta, seed.child(r))
                                  : sample_inv_wishart(c.d, c.theta, seed.child(r));
    });
  }
  for (std::size_t r = 0; r < xs.size(); ++r) {
    std::vector<Cell> row{static_cast<long>(r), logdet(xs[r])};
    push_entries(row, xs[r]);
    t.rows.push_back(std::move(row));
  }
  write_table(t, c.format, out);
  return kOk;
}

int run_quadrant(const RunConfig& c, std::ostream& out) {
  const Seed seed = run_seed(c);
  const QuadrantParams qp = quadrant_params(c);
  long m_max = c.m;
  IndexedFamily b;
  if (c.boundary == "delta") {
    b = delta_boundary(c.d, static_cast<int>(m_max), static_cast<int>(c.n));
  } else {
    m_max = std::max<long>(c.m, c.M);
    const BoundarySpec spec{c.d, c.theta, c.u, c.M, std::nullopt};
    b = sample_stationary_boundary(spec, static_cast<int>(m_max), static_cast<int>(c.n), seed.child(0));
  }
  EvolveOptions opts;
  opts.threads = c.threads;
  const QuadrantField f = quadrant_evolve(qp, b, c.n, m_max, seed.child(1), opts);
  Table t;
  t.header = {"n", "m"};
  add_entry_header(t, c.d);
  for (long n = 0; n <= c.n; ++n)
    for (long m = 0; m <= m_max; ++m) {
      std::vector<Cell> row{n, m};
      push_entries(row, f.at(n, m));
      t.rows.push_back(std::move(row));
    }
  write_table(t, c.format, out);
  return kOk;
}

McmcOptions mcmc_options(const RunConfig& c) {
  McmcOptions o;
  o.sweeps = c.sweeps;
  o.burn_in = c.burn_in;
  o.chains = c.chains;
  return o;
}

int run_strip(const RunConfig& c, std::ostream& out) {
  const Seed seed = run_seed(c);
  const StripParams sp = strip_params(c);
  const std::size_t N = static_cast<std::size_t>(sp.width());
  const DownRightPath path{{0, 0}, c.paths.empty() ? std::vector<Step>(N, Step::Right)
                                                   : DownRightPath::parse_word(c.paths.front())};
  if (path.length() != N) throw ConfigError("strip: path length must equal N");
  StripState s;
  if (sp.regime == StripRegime::Equilibrium) {
    s = strip_equilibrium_initial(sp, path, identity(c.d), seed.child(0));
  } else {
    const McmcResult res = mcmc_two_layer(sp, path, identity(c.d), mcmc_options(c), seed.child(0));
    s = {path, res.samples.back().lambda1};
  }
  std::vector<StripState> states{s};
  const auto evolved = strip_evolve(sp, s, c.steps, seed.child(1));
  states.insert(states.end(), evolved.begin(), evolved.end());
  Table t;
  t.header = {"step", "i", "n", "m"};
  add_entry_header(t, c.d);
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto pts = states[k].path.vertices();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      std::vector<Cell> row{static_cast<long>(k), static_cast<long>(i), pts[i].n, pts[i].m};
      push_entries(row, states[k].values[i]);
      t.rows.push_back(std::move(row));
    }
  }
  write_table(t, c.format, out);
  return kOk;
}

int run_gibbs(const RunConfig& c, std::ostream& out) {
  const StripParams sp = strip_params(c);
  const std::size_t N = static_cast<std::size_t>(sp.width());
  const DownRightPath path{{0, 0}, c.paths.empty() ? std::vector<Step>(N, Step::Right)
                                                   : DownRightPath::parse_word(c.paths.front())};
  if (path.length() != N) throw ConfigError("gibbs-sample: path length must equal N");
  const McmcResult res = mcmc_two_layer(sp, path, identity(c.d), mcmc_options(c), run_seed(c));
  Table t;
  t.header = {"sample", "layer", "i"};
  add_entry_header(t, c.d);
  for (std::size_t k = 0; k < res.samples.size(); ++k)
    for (int layer = 0; layer < 2; ++layer)
      for (std::size_t i = 0; i <= N; ++i) {
        std::vector<Cell> row{static_cast<long>(k), static_cast<long>(layer + 1), static_cast<long>(i)};
        push_entries(row, res.samples[k].at({layer, static_cast<int>(i)}));
        t.rows.push_back(std::move(row));
      }
  write_table(t, c.format, out);
  return res.converged ? kOk : kNumericalFailure;
}

int run_verify(const RunConfig& c, std::ostream& out) {
  const Seed seed = run_seed(c);
  std::vector<TestReport> reports;
  if (c.suite == "identity-suite") {
    for (auto& r : algebraic_checks(c.d, c.cases, seed.child(0))) reports.push_back(r);
    for (auto& r : special_function_checks(c.d, c.samples, seed.child(1))) reports.push_back(r);
    IdentitySuiteOptions o;
    o.d = c.d;
    o.samples = c.samples;
    for (auto& r : identity_suite(o, seed.child(2))) reports.push_back(r);
  } else if (c.suite == "stationarity-quadrant") {
    reports = calibration_reports(seed.child(0));
    reports.push_back(one_step_identity(c.d, c.theta, c.u, c.replicates, seed.child(1), c.level));
    QuadrantStationarityConfig q;
    q.d = c.d;
    q.theta = c.theta;
    q.u = c.u;
    q.M = c.M;
    q.paths = quadrant_paths(c);
    q.replicates = c.replicates;
    q.level = c.level;
    reports.push_back(stationarity_quadrant(q, seed.child(2)));
    reports.push_back(expectation_identity(c.d, c.theta, c.u, c.M, static_cast<int>(c.n),
                                           static_cast<int>(std::min<long>(c.m, c.M)), c.replicates,
                                           seed.child(3)));
  } else if (c.suite == "stationarity-strip") {
    reports = calibration_reports(seed.child(0));
    StripStationarityConfig s;
    s.params = strip_params(c);
    s.params.regime = StripRegime::Equilibrium;
    const std::size_t N = static_cast<std::size_t>(s.params.width());
    s.bottom_word = c.paths.empty() ? std::vector<Step>(N, Step::Down) : DownRightPath::parse_word(c.paths.front());
    s.replicates = c.replicates;
    s.level = c.level;
    reports.push_back(stationarity_strip_equilibrium(s, seed.child(1)));
  } else if (c.suite == "martingale") {
    reports.push_back(martingale_check(c.d, c.theta, c.k_max, c.replicates, seed));
  } else if (c.suite == "expectation") {
    reports.push_back(expectation_identity(c.d, c.theta, c.u, c.M, static_cast<int>(c.n), static_cast<int>(c.m),
                                           c.replicates, seed));
  } else {
    throw ConfigError("verify: unknown suite '" + c.suite + "'");
  }
  return write_reports(std::move(reports), c.format, out);
}

int run_free_energy(const RunConfig& c, std::ostream& out) {
  const Seed seed = run_seed(c);
  FreeEnergyResult res;
  if (c.model == "quadrant-delta") {
    const QuadrantParams qp = quadrant_params(c);
    res = free_energy(FreeEnergyModel::QuadrantDelta, &qp, nullptr, c.n, c.replicates, seed);
  } else {
    StripParams sp = strip_params(c);
    sp.regime = StripRegime::Equilibrium;
    res = free_energy(FreeEnergyModel::Strip, nullptr, &sp, c.n, c.replicates, seed);
  }
  if (c.format == "json") {
    nlohmann::ordered_json j;
    j["samples"] = res.estimate.samples;
    j["mean"] = res.estimate.mean_logdet_over_n;
    j["std_error"] = res.estimate.std_error;
    j["target"] = res.target;
    j["report"] = nlohmann::ordered_json::parse(reports_to_json({res.report}))[0];
    out << j.dump(2) << '\n';
  } else {
    Table t;
    t.header = {"row", "logdet_over_n", "std_error", "target", "passed"};
    for (std::size_t r = 0; r < res.estimate.samples.size(); ++r)
      t.rows.push_back({std::to_string(r), res.estimate.samples[r], std::string(), std::string(), std::string()});
    t.rows.push_back({std::string("summary"), res.estimate.mean_logdet_over_n, res.estimate.std_error, res.target,
                      std::string(res.report.passed ? "true" : "false")});
    write_table(t, c.format, out);
  }
  return res.report.passed ? kOk : kSuiteFailed;
}

}  // namespace

QuadrantParams quadrant_params(const RunConfig& c) {
  QuadrantParams qp = QuadrantParams::homogeneous(c.d, c.theta, c.u);
  if (!c.alphas.empty()) qp.alphas = c.alphas;
  if (!c.betas.empty()) qp.betas = c.betas;
  qp.identity_disorder = c.force_identity_disorder;
  return qp;
}

StripParams strip_params(const RunConfig& c) {
  StripParams sp;
  sp.d = c.d;
  sp.thetas = c.thetas.empty() ? std::vector<double>(static_cast<std::size_t>(std::max(c.N, 1)), c.theta) : c.thetas;
  sp.u = c.u;
  sp.v = c.v;
  sp.regime = c.regime == "equilibrium" && c.subcommand != "gibbs-sample" ? StripRegime::Equilibrium
                                                                          : StripRegime::MaximalCurrent;
  sp.identity_disorder = c.force_identity_disorder;
  return sp;
}

RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Directed polymers with inverse-Wishart matrix disorder", "ivpoly"};
  app.fallthrough();
  app.require_subcommand(1);
  RunConfig flags;
  std::vector<Binding> b;
  b.push_back(bind_field(app, flags, "d", &RunConfig::d, "matrix dimension"));
  b.push_back(bind_field(app, flags, "theta", &RunConfig::theta, "bulk parameter theta"));
  b.push_back(bind_field(app, flags, "u", &RunConfig::u, "boundary parameter u"));
  b.push_back(bind_field(app, flags, "v", &RunConfig::v, "boundary parameter v"));
  b.push_back(bind_field(app, flags, "thetas", &RunConfig::thetas, "strip parameters theta_1..theta_N (comma separated)"));
  b.push_back(bind_field(app, flags, "alphas", &RunConfig::alphas, "quadrant column parameters alpha_1, alpha_2, ..."));
  b.push_back(bind_field(app, flags, "betas", &RunConfig::betas, "quadrant row parameters beta_1, beta_2, ..."));
  b.push_back(bind_field(app, flags, "N", &RunConfig::N, "strip width when --thetas is absent"));
  b.push_back(bind_field(app, flags, "regime", &RunConfig::regime, "strip regime: equilibrium or maximal_current"));
  b.push_back(bind_field(app, flags, "boundary", &RunConfig::boundary, "quadrant boundary: delta or stationary"));
  b.push_back(bind_field(app, flags, "model", &RunConfig::model, "free-energy model: quadrant-delta or strip"));
  b.push_back(bind_field(app, flags, "dist", &RunConfig::dist, "sample-dist law: wishart, inverse-wishart or gig"));
  b.push_back(bind_field(app, flags, "paths", &RunConfig::paths, "down-right path words such as RRDD (comma separated)"));
  b.push_back(bind_field(app, flags, "M", &RunConfig::M, "row of the stationary reference (0,M)"));
  b.push_back(bind_field(app, flags, "n", &RunConfig::n, "column index or system size"));
  b.push_back(bind_field(app, flags, "m", &RunConfig::m, "row index"));
  b.push_back(bind_field(app, flags, "steps", &RunConfig::steps, "strip diagonal moves"));
  b.push_back(bind_field(app, flags, "k_max", &RunConfig::k_max, "largest anti-diagonal for the martingale"));
  b.push_back(bind_field(app, flags, "a", &RunConfig::a, "matrix-GIG exponent"));
  b.push_back(bind_field(app, flags, "p", &RunConfig::p, "matrix-GIG P = p id"));
  b.push_back(bind_field(app, flags, "q", &RunConfig::q, "matrix-GIG Q = q id"));
  b.push_back(bind_field(app, flags, "mh_steps", &RunConfig::mh_steps, "Metropolis rounds per matrix-GIG draw"));
  b.push_back(bind_field(app, flags, "replicates", &RunConfig::replicates, "independent replicates"));
  b.push_back(bind_field(app, flags, "samples", &RunConfig::samples, "importance samples per integral"));
  b.push_back(bind_field(app, flags, "cases", &RunConfig::cases, "random cases per algebraic identity"));
  b.push_back(bind_field(app, flags, "sweeps", &RunConfig::sweeps, "Gibbs sweeps per chain"));
  b.push_back(bind_field(app, flags, "burn_in", &RunConfig::burn_in, "discarded sweeps per chain"));
  b.push_back(bind_field(app, flags, "chains", &RunConfig::chains, "independent chains"));
  b.push_back(bind_field(app, flags, "level", &RunConfig::level, "family-wise test level"));
  b.push_back(bind_field(app, flags, "seed", &RunConfig::seed, "root seed, optionally with a stream path: 7 or 7:1.2"));
  b.push_back(bind_field(app, flags, "threads", &RunConfig::threads, "worker threads"));
  b.push_back(bind_field(app, flags, "output", &RunConfig::output, "output file, - for stdout"));
  b.push_back(bind_field(app, flags, "format", &RunConfig::format, "csv or json"));
  b.push_back(bind_field(app, flags, "force_identity_disorder", &RunConfig::force_identity_disorder,
                   "replace every disorder draw by the identity"));
  app.add_option("--config", flags.config, "JSON file with RunConfig fields; flags override it");

  std::vector<CLI::App*> subs;
  subs.push_back(app.add_subcommand("sample-dist", kSampleDistHelp));
  subs.push_back(app.add_subcommand("quadrant", kQuadrantHelp));
  subs.push_back(app.add_subcommand("strip", kStripHelp));
  subs.push_back(app.add_subcommand("gibbs-sample", kGibbsHelp));
  CLI::App* verify = app.add_subcommand("verify", kVerifyHelp);
  subs.push_back(verify);
  subs.push_back(app.add_subcommand("free-energy", kFreeEnergyHelp));
  for (auto* s : subs) s->fallthrough();
  verify->require_subcommand(1);
  for (const auto& s : kSuites) verify->add_subcommand(s.name, s.help)->fallthrough();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    const auto chosen = app.get_subcommands();
    const CLI::App* target = chosen.empty() ? &app : chosen.back();
    if (!chosen.empty() && !chosen.back()->get_subcommands().empty()) target = chosen.back()->get_subcommands().back();
    if (target == &app) throw ConfigError(app.help(), kOk);
    std::ostringstream os;
    os << target->help() << "\nShared options:\n";
    for (const CLI::Option* o : app.get_options()) {
      if (o->get_name() == "--help") continue;
      os << "  " << std::left << std::setw(28) << o->get_name() << o->get_description() << "\n";
    }
    throw ConfigError(os.str(), kOk);
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  RunConfig cfg;
  if (const char* env = std::getenv("MPL_SEED")) cfg.seed = env;
  if (!flags.config.empty()) {
    std::ifstream in(flags.config);
    if (!in) throw ConfigError("cannot read config file " + flags.config);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config file: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
      auto it = std::find_if(b.begin(), b.end(), [&](const Binding& x) { return x.key == key; });
      if (it == b.end()) throw ConfigError("config file: unknown key '" + key + "'");
      try {
        it->load(cfg, value);
      } catch (const json::exception&) {
        throw ConfigError("config file: bad value for '" + key + "'");
      }
    }
  }
  for (const auto& x : b)
    if (x.opt->count() > 0) x.copy(cfg, flags);
  cfg.config = flags.config;

  CLI::App* sub = app.get_subcommands().front();
  cfg.subcommand = sub->get_name();
  if (cfg.subcommand == "verify") cfg.suite = sub->get_subcommands().front()->get_name();
  try {
    validate(cfg);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

int run(const RunConfig& cfg, std::ostream& out) {
  set_default_threads(cfg.threads);
  if (cfg.subcommand == "sample-dist") return run_sample_dist(cfg, out);
  if (cfg.subcommand == "quadrant") return run_quadrant(cfg, out);
  if (cfg.subcommand == "strip") return run_strip(cfg, out);
  if (cfg.subcommand == "gibbs-sample") return run_gibbs(cfg, out);
  if (cfg.subcommand == "verify") return run_verify(cfg, out);
  if (cfg.subcommand == "free-energy") return run_free_energy(cfg, out);
  throw ConfigError("unknown subcommand '" + cfg.subcommand + "'");
}

int main(int argc, char** argv) {
  RunConfig cfg;
  try {
    cfg = parse_config(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const ConfigError& e) {
    (e.code == kOk ? std::cout : std::cerr) << e.what() << (e.code == kOk ? "" : "\n");
    return e.code;
  }
  try {
    std::ostringstream buf;
    const int code = run(cfg, buf);
    if (cfg.output == "-") {
      std::cout << buf.str();
      std::cout.flush();
      if (!std::cout) return kNumericalFailure;
    } else {
      std::ofstream f(cfg.output, std::ios::binary);
      f << buf.str();
      f.close();
      if (!f) {
        std::cerr << "cannot write " << cfg.output << "\n";
        return kNumericalFailure;
      }
    }
    return code;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return e.code;
  } catch (const ParameterError& e) {
    std::cerr << "invalid parameters: " << e.what() << "\n";
    return kInvalidConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

}  // namespace ivp::cli
