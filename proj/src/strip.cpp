#include "ivpoly/polymer.hpp"

#include <cmath>
#include <sstream>

namespace ivp {

Mat strip_disorder(const StripParams& params, long n, long m, const Seed& seed) {
  if (params.identity_disorder) return identity(params.d);
  const long N = params.width();
  double shape;
  if (n == m) {
    shape = params.theta(m) + params.u;
  } else if (n == m + N) {
    shape = params.theta(m) + params.v;
  } else if (n > m && n < m + N) {
    shape = params.theta(n) + params.theta(m);
  } else {
    std::ostringstream os;
    os << "strip_disorder: vertex (" << n << "," << m << ") outside the strip";
    throw ParameterError(os.str());
  }
  return sample_inv_wishart(params.d, shape, seed.child(zigzag(n), zigzag(m)));
}

RaiseKind raise_kind(const DownRightPath& path, std::size_t i) {
  const std::size_t N = path.length();
  if (N == 0 || i > N) return RaiseKind::None;
  if (i == 0) return path.word[0] == Step::Right ? RaiseKind::Left : RaiseKind::None;
  if (i == N) return path.word[N - 1] == Step::Down ? RaiseKind::Right : RaiseKind::None;
  return path.word[i - 1] == Step::Down && path.word[i] == Step::Right ? RaiseKind::Bulk
                                                                        : RaiseKind::None;
}

void strip_raise(StripState& state, std::size_t i, const StripParams& params, const Seed& seed) {
  const RaiseKind kind = raise_kind(state.path, i);
  if (kind == RaiseKind::None) throw ParameterError("strip_raise: vertex is not raisable");
  const std::size_t N = state.path.length();
  const Point p = state.path.vertices()[i];
  const long n = p.n + 1, m = p.m + 1;
  const Mat w = strip_disorder(params, n, m, seed);
  Mat base;
  switch (kind) {
    case RaiseKind::Left:
      base = state.values[1];
      state.path.start = {n, m};
      state.path.word[0] = Step::Down;
      break;
    case RaiseKind::Right:
      base = state.values[N - 1];
      state.path.word[N - 1] = Step::Right;
      break;
    default:
      base = state.values[i - 1] + state.values[i + 1];
      state.path.word[i - 1] = Step::Right;
      state.path.word[i] = Step::Down;
      break;
  }
  try {
    state.values[i] = star(w, base);
  } catch (const NumericalError& e) {
    std::ostringstream os;
    os << e.what() << " at strip vertex (" << n << "," << m << ")";
    throw NumericalError(os.str());
  }
}

void strip_raise_to(StripState& state, const DownRightPath& target, const StripParams& params,
                    const Seed& seed, std::vector<StripState>* trace) {
  if (target.length() != state.path.length()) throw ParameterError("strip_raise_to: width mismatch");
  const auto goal = target.vertices();
  for (;;) {
    const auto cur = state.path.vertices();
    bool done = true, moved = false;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const long k = goal[i].n - cur[i].n;
      if (goal[i].m - cur[i].m != k || k < 0) {
        throw ParameterError("strip_raise_to: target is not reachable by raises");
      }
      if (k == 0) continue;
      done = false;
      if (raise_kind(state.path, i) != RaiseKind::None) {
        strip_raise(state, i, params, seed);
        moved = true;
        break;
      }
    }
    if (done) return;
    if (!moved) throw ParameterError("strip_raise_to: no raisable vertex below the target");
    if (trace) trace->push_back(state);
  }
}

std::vector<StripState> strip_evolve(const StripParams& params, const StripState& initial, int steps,
                                     const Seed& seed) {
  params.validate();
  if (steps < 0) throw ParameterError("strip_evolve: steps must be nonnegative");
  std::vector<StripState> out;
  StripState s = initial;
  for (int t = 0; t < steps; ++t) {
    DownRightPath target = s.path;
    target.start.n += 1;
    target.start.m += 1;
    strip_raise_to(s, target, params, seed);
    out.push_back(s);
  }
  return out;
}

StripState strip_equilibrium_initial(const StripParams& params, const DownRightPath& path,
                                     const Mat& S, const Seed& seed) {
  StripParams eq = params;
  eq.regime = StripRegime::Equilibrium;
  WalkSpec spec{edge_labels(path, eq), path.word, S};
  return {path, sample_walk(spec, seed)};
}

double strip_log_diag(const StripParams& params, long n, const Seed& seed) {
  params.validate();
  if (n < 1) throw ParameterError("strip_log_diag: n must be positive");
  const int d = params.d;
  DownRightPath flat{{0, 0}, std::vector<Step>(static_cast<std::size_t>(params.width()), Step::Right)};
  StripState s = strip_equilibrium_initial(params, flat, identity(d), seed.child(0));
  const Seed field = seed.child(1);
  // The disorder law is conjugation invariant, so congruence by a past-measurable
  // g maps the field to g·field·g in law; the accumulated log|g^{-2}| is exact.
  double log_gauge = 0.0;
  for (long t = 0; t < n; ++t) {
    DownRightPath target = s.path;
    target.start.n += 1;
    target.start.m += 1;
    strip_raise_to(s, target, params, field);
    const Mat ref = s.values[0];
    log_gauge += congruence_normalize(s.values, ref);
  }
  return logdet(s.values[0]) + log_gauge;
}

}  // namespace ivp
