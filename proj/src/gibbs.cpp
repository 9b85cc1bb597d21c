#include "ivpoly/gibbs.hpp"

#include "ivpoly/parallel.hpp"
#include "ivpoly/stats.hpp"
#include "ivpoly/tproposal.hpp"

#include <cmath>
#include <sstream>

namespace ivp {

TwoLayerGraph TwoLayerGraph::build(const DownRightPath& path, const std::vector<double>& gammas,
                                   double u, double v) {
  if (gammas.size() != path.length()) throw ParameterError("TwoLayerGraph: one label per step required");
  TwoLayerGraph g;
  g.path = path;
  g.gammas = gammas;
  g.u = u;
  g.v = v;
  const int N = static_cast<int>(path.length());
  g.edges.push_back({Edge::Kind::Arc, {0, 0}, {1, 0}, u, false});
  for (int i = 1; i <= N; ++i) {
    const double c = gammas[static_cast<std::size_t>(i - 1)];
    const bool right = path.word[static_cast<std::size_t>(i - 1)] == Step::Right;
    const int hi = right ? i : i - 1, lo = right ? i - 1 : i;
    for (int layer = 0; layer < 2; ++layer) {
      g.edges.push_back({Edge::Kind::Solid, {layer, hi}, {layer, lo}, c, true});
    }
    g.edges.push_back({Edge::Kind::Dotted, {0, lo}, {1, hi}, 0.0, true});
  }
  g.edges.push_back({Edge::Kind::Arc, {0, N}, {1, N}, v, false});
  return g;
}

TwoLayerGraph TwoLayerGraph::for_strip(const DownRightPath& path, const StripParams& params) {
  StripParams mc = params;
  mc.regime = StripRegime::MaximalCurrent;
  return build(path, edge_labels(path, mc), params.u, params.v);
}

TwoLayerConfig TwoLayerConfig::constant(std::size_t n_plus_1, const Mat& value) {
  return {std::vector<Mat>(n_plus_1, value), std::vector<Mat>(n_plus_1, value)};
}

TwoLayerConfig TwoLayerConfig::star_all(const Mat& x) const {
  TwoLayerConfig out = *this;
  for (Mat& m : out.lambda1) m = star(m, x);
  for (Mat& m : out.lambda2) m = star(m, x);
  return out;
}

double edge_log_weight(const Mat& x, const Mat& y, double c, bool trace) {
  double w = 0.0;
  if (c != 0.0) w += c * (logdet(y) - logdet(x));
  if (trace) w -= y.cwiseProduct(spd_inverse(x)).sum();
  return w;
}

double log_weight(const TwoLayerConfig& config, const TwoLayerGraph& graph) {
  if (config.lambda1.size() != graph.length() + 1 || config.lambda2.size() != graph.length() + 1) {
    throw ParameterError("log_weight: configuration does not match the graph");
  }
  double w = 0.0;
  for (const Edge& e : graph.edges) w += edge_log_weight(config.at(e.x), config.at(e.y), e.c, e.trace);
  return w;
}

double log_weight_one_layer(const std::vector<Mat>& values, const DownRightPath& path,
                            const std::vector<double>& gammas) {
  if (values.size() != path.length() + 1 || gammas.size() != path.length()) {
    throw ParameterError("log_weight_one_layer: shape mismatch");
  }
  double w = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const bool right = path.word[i - 1] == Step::Right;
    w += edge_log_weight(right ? values[i] : values[i - 1], right ? values[i - 1] : values[i],
                         gammas[i - 1], true);
  }
  return w;
}

double psi_factor(double gamma, const MatPair& lambda, const MatPair& mu) {
  return edge_log_weight(lambda[0], mu[0], gamma, true) + edge_log_weight(lambda[1], mu[1], gamma, true) +
         edge_log_weight(mu[0], lambda[1], 0.0, true);
}

GigParams site_conditional(const TwoLayerGraph& graph, const TwoLayerConfig& config, const VertexRef& site) {
  const int d = static_cast<int>(config.lambda1.front().rows());
  double a = 0.0;
  Mat P = zeros(d), Q = zeros(d);
  for (const Edge& e : graph.edges) {
    if (e.y == site) {
      a += e.c;
      if (e.trace) P += spd_inverse(config.at(e.x));
    } else if (e.x == site) {
      a -= e.c;
      if (e.trace) Q += config.at(e.y);
    }
  }
  return GigParams(a, P, Q);
}

IntegralEstimate skew_whittaker(const std::vector<double>& gammas, const MatPair& lambda,
                                const MatPair& mu, long n, const Seed& seed) {
  if (gammas.empty()) throw ParameterError("skew_whittaker: need at least one parameter");
  if (gammas.size() == 1) return {std::exp(psi_factor(gammas[0], lambda, mu)), 0.0, 1};
  if (gammas.size() == 2) {
    const double g1 = gammas[0], g2 = gammas[1];
    const GigParams k1(g2 - g1, spd_inverse(lambda[0]), mu[0] + lambda[1]);
    const GigParams k2(g2 - g1, spd_inverse(lambda[1]) + spd_inverse(mu[0]), mu[1]);
    const IntegralEstimate e1 = gig_integral(k1, n, seed.child(0));
    const IntegralEstimate e2 = gig_integral(k2, n, seed.child(1));
    const double pre = std::exp(g1 * (logdet(mu[0]) + logdet(mu[1])) - g2 * (logdet(lambda[0]) + logdet(lambda[1])));
    const double value = pre * e1.value * e2.value;
    const double rel = std::hypot(e1.rel_error(), e2.rel_error());
    return {value, value * rel, n};
  }
  const int d = static_cast<int>(lambda[0].rows());
  const std::size_t len = gammas.size();
  for (std::size_t i = 0; i + 1 < len; ++i) require_shape(d, gammas[i], "skew_whittaker intermediate label");
  std::vector<double> lw(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t s) {
    Philox rng(seed.child(2, s));
    MatPair prev = mu;
    double w = 0.0;
    for (std::size_t i = 0; i + 1 < len; ++i) {
      // κ^i_ℓ ~ Wis⁻¹(γ_i) ⋆ κ^{i-1}_ℓ absorbs both solid edges of the factor.
      MatPair next;
      double lq = 0.0;
      for (int l = 0; l < 2; ++l) {
        ProposalSpec q(ProposalSpec::Kind::InverseWishart, gammas[i], prev[static_cast<std::size_t>(l)]);
        next[static_cast<std::size_t>(l)] = q.sample(rng);
        lq += q.log_density(next[static_cast<std::size_t>(l)]);
      }
      w += psi_factor(gammas[i], next, prev) - lq;
      prev = std::move(next);
    }
    lw[s] = w + psi_factor(gammas.back(), lambda, prev);
  });
  return estimate_from_log_weights(lw);
}

namespace {

Mat second_layer(const GigParams& g, const Mat* start2, int mh_steps, Philox& rng) {
  const Mat current = start2 ? *start2 : g.default_proposal().sample(rng);
  return sample_matrix_gig(g, current, mh_steps, rng);
}

}  // namespace

MatPair kernel_bulk_sample(const KernelParams& p, const MatPair& lambda, const MatPair& mu,
                           const Seed& seed, int mh_steps, const Mat* start2) {
  const int d = static_cast<int>(lambda[0].rows());
  const double s = p.alpha + p.beta;
  require_shape(d, s, "kernel_bulk_sample alpha+beta");
  Philox rng(seed);
  MatPair out;
  out[0] = star(sample_inv_wishart(d, s, rng), lambda[0] + mu[0]);
  const GigParams g(-s, spd_inverse(lambda[0]) + spd_inverse(mu[0]), lambda[1] + mu[1]);
  out[1] = second_layer(g, start2, mh_steps, rng);
  return out;
}

MatPair kernel_left_sample(const KernelParams& p, const MatPair& lambda, const Seed& seed, int mh_steps,
                           const Mat* start2) {
  const int d = static_cast<int>(lambda[0].rows());
  require_shape(d, p.alpha + p.u, "kernel_left_sample alpha+u");
  Philox rng(seed);
  MatPair out;
  out[0] = star(sample_inv_wishart(d, p.alpha + p.u, rng), lambda[0]);
  const GigParams g(-(p.alpha - p.u), spd_inverse(lambda[0]), lambda[1]);
  out[1] = second_layer(g, start2, mh_steps, rng);
  return out;
}

MatPair kernel_right_sample(const KernelParams& p, const MatPair& lambda, const Seed& seed, int mh_steps,
                            const Mat* start2) {
  const int d = static_cast<int>(lambda[0].rows());
  require_shape(d, p.alpha + p.v, "kernel_right_sample alpha+v");
  Philox rng(seed);
  MatPair out;
  out[0] = star(sample_inv_wishart(d, p.alpha + p.v, rng), lambda[0]);
  const GigParams g(-(p.alpha - p.v), spd_inverse(lambda[0]), lambda[1]);
  out[1] = second_layer(g, start2, mh_steps, rng);
  return out;
}

TwoLayerConfig push_block_update(const StripParams& params, const DownRightPath& path,
                                 const TwoLayerConfig& config, const DownRightPath& target,
                                 const Seed& seed, int mh_steps) {
  if (target.length() != path.length() || config.size() != path.length() + 1) {
    throw ParameterError("push_block_update: shape mismatch");
  }
  StripParams mc = params;
  mc.regime = StripRegime::MaximalCurrent;
  DownRightPath cur = path;
  TwoLayerConfig out = config;
  const auto goal = target.vertices();
  const std::size_t N = path.length();
  for (;;) {
    const auto pts = cur.vertices();
    bool done = true;
    std::size_t pick = N + 1;
    for (std::size_t i = 0; i <= N; ++i) {
      const long k = goal[i].n - pts[i].n;
      if (goal[i].m - pts[i].m != k || k < 0) throw ParameterError("push_block_update: target not above path");
      if (k == 0) continue;
      done = false;
      if (raise_kind(cur, i) != RaiseKind::None) {
        pick = i;
        break;
      }
    }
    if (done) return out;
    if (pick > N) throw ParameterError("push_block_update: no raisable vertex below the target");

    const RaiseKind kind = raise_kind(cur, pick);
    const Point q{pts[pick].n + 1, pts[pick].m + 1};
    DownRightPath raised = cur;
    if (kind == RaiseKind::Left) {
      raised.start = q;
      raised.word[0] = Step::Down;
    } else if (kind == RaiseKind::Right) {
      raised.word[N - 1] = Step::Right;
    } else {
      raised.word[pick - 1] = Step::Right;
      raised.word[pick] = Step::Down;
    }
    const auto labels = edge_labels(raised, mc);
    const Seed vs = seed.child(zigzag(q.n), zigzag(q.m));
    const Mat old2 = out.lambda2[pick];
    MatPair next;
    KernelParams kp;
    kp.u = params.u;
    kp.v = params.v;
    if (kind == RaiseKind::Bulk) {
      kp.alpha = labels[pick - 1];
      kp.beta = labels[pick];
      next = kernel_bulk_sample(kp, out.pair(pick - 1), out.pair(pick + 1), vs, mh_steps, &old2);
    } else if (kind == RaiseKind::Left) {
      kp.alpha = labels[0];
      next = kernel_left_sample(kp, out.pair(1), vs, mh_steps, &old2);
    } else {
      kp.alpha = labels[N - 1];
      next = kernel_right_sample(kp, out.pair(N - 1), vs, mh_steps, &old2);
    }
    out.lambda1[pick] = std::move(next[0]);
    out.lambda2[pick] = std::move(next[1]);
    cur = std::move(raised);
  }
}

McmcResult mcmc_two_layer(const StripParams& params, const DownRightPath& path, const Mat& pin,
                          const McmcOptions& opts, const Seed& seed) {
  StripParams mc = params;
  mc.regime = StripRegime::MaximalCurrent;
  mc.validate();
  require_spd(pin, "mcmc_two_layer pin");
  if (opts.sweeps < 1 || opts.burn_in < 0 || opts.thin < 1 || opts.chains < 1) {
    throw ParameterError("mcmc_two_layer: invalid sweep settings");
  }
  const TwoLayerGraph graph = TwoLayerGraph::for_strip(path, mc);
  const int N = static_cast<int>(path.length());
  std::vector<VertexRef> sites;
  for (int i = 0; i <= N; ++i) {
    if (i > 0) sites.push_back({0, i});
    sites.push_back({1, i});
  }

  std::vector<std::vector<TwoLayerConfig>> per_chain(static_cast<std::size_t>(opts.chains));
  std::vector<std::vector<double>> monitor(static_cast<std::size_t>(opts.chains));
  parallel_for(static_cast<std::size_t>(opts.chains), [&](std::size_t c) {
    Philox rng(seed.child(c));
    const double spread = (c % 2 == 0) ? 0.5 : 2.0;
    TwoLayerConfig x = TwoLayerConfig::constant(static_cast<std::size_t>(N + 1), pin * spread);
    x.lambda1[0] = pin;
    for (int s = 0; s < opts.burn_in + opts.sweeps; ++s) {
      for (const VertexRef& site : sites) {
        const GigParams g = site_conditional(graph, x, site);
        try {
          x.at(site) = sample_matrix_gig(g, x.at(site), opts.mh_steps, rng);
        } catch (const NumericalError& e) {
          std::ostringstream os;
          os << e.what() << " (chain " << c << ", sweep " << s << ", site " << site.layer + 1 << "/" << site.index << ")";
          throw NumericalError(os.str());
        }
      }
      if (s >= opts.burn_in && (s - opts.burn_in) % opts.thin == 0) {
        per_chain[c].push_back(x);
        monitor[c].push_back(logdet(x.lambda2[static_cast<std::size_t>(N)]));
      }
    }
  });

  McmcResult r;
  for (auto& chain : per_chain)
    for (auto& cfg : chain) r.samples.push_back(std::move(cfg));
  r.rhat = split_rhat(monitor);
  r.converged = r.rhat <= opts.rhat_threshold;
  r.monitor = std::move(monitor);
  return r;
}

double normalization_n1_log(int d, double theta, double u, double v) {
  return multigamma_ln(d, u + v) + multigamma_ln(d, theta + v) + multigamma_ln(d, theta + u);
}

IntegralEstimate normalization_estimate(const StripParams& params, const DownRightPath& path, long n,
                                        const Seed& seed, const Mat* pin) {
  const int d = params.d;
  const Mat p0 = pin ? *pin : identity(d);
  const int N = static_cast<int>(path.length());
  McmcOptions opts;
  opts.sweeps = 3000;
  opts.burn_in = 300;
  opts.mh_steps = 2;
  const McmcResult pilot = mcmc_two_layer(params, path, p0, opts, seed.child(0));

  // Free coordinates in the order λ₂⁰, λ₁¹, λ₂¹, ..., λ₁ᴺ, λ₂ᴺ.
  auto flatten = [&](const TwoLayerConfig& c) {
    std::vector<Mat> xs{c.lambda2[0]};
    for (int i = 1; i <= N; ++i) {
      xs.push_back(c.lambda1[static_cast<std::size_t>(i)]);
      xs.push_back(c.lambda2[static_cast<std::size_t>(i)]);
    }
    return xs;
  };
  std::vector<std::vector<Mat>> pts;
  for (const auto& c : pilot.samples) pts.push_back(flatten(c));
  const TProposal prop = TProposal::fit(pts);
  const TwoLayerGraph graph = TwoLayerGraph::for_strip(path, params);
  auto log_f = [&](const std::vector<Mat>& xs) {
    TwoLayerConfig c;
    c.lambda1.push_back(p0);
    c.lambda2.push_back(xs[0]);
    for (int i = 1; i <= N; ++i) {
      c.lambda1.push_back(xs[static_cast<std::size_t>(2 * i - 1)]);
      c.lambda2.push_back(xs[static_cast<std::size_t>(2 * i)]);
    }
    return log_weight(c, graph);
  };
  return integrate_t(log_f, prop, n, seed.child(1));
}

Mat one_layer_kernel(OneLayerKind kind, const KernelParams& p, const Mat& lambda, const Mat* mu,
                     const Seed& seed) {
  const int d = static_cast<int>(lambda.rows());
  if (kind == OneLayerKind::Bulk) {
    if (!mu) throw ParameterError("one_layer_kernel: bulk kernel needs both neighbours");
    require_shape(d, p.alpha, "one_layer_kernel alpha");
    require_shape(d, p.beta, "one_layer_kernel beta");
    return star(sample_inv_wishart(d, p.alpha + p.beta, seed), lambda + *mu);
  }
  require_shape(d, p.alpha, "one_layer_kernel boundary label");
  return star(sample_inv_wishart(d, p.alpha, seed), lambda);
}

IntegralEstimate one_layer_normalization(const DownRightPath& path, const std::vector<double>& gammas,
                                         const Mat& lambda0, long n, const Seed& seed) {
  const std::size_t N = path.length();
  if (N == 0) return {1.0, 0.0, 1};
  std::vector<std::vector<Mat>> pts(2000);
  parallel_for(pts.size(), [&](std::size_t r) {
    auto w = sample_walk({gammas, path.word, lambda0}, seed.child(0, r));
    pts[r].assign(w.begin() + 1, w.end());
  });
  const TProposal prop = TProposal::fit(pts);
  auto log_f = [&](const std::vector<Mat>& xs) {
    std::vector<Mat> vals{lambda0};
    vals.insert(vals.end(), xs.begin(), xs.end());
    return log_weight_one_layer(vals, path, gammas);
  };
  return integrate_t(log_f, prop, n, seed.child(1));
}

}  // namespace ivp
