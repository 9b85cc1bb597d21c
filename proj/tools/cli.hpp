#pragma once

#include "ivpoly/polymer.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace ivp::cli {

enum ExitCode { kOk = 0, kInvalidConfig = 1, kNumericalFailure = 2, kSuiteFailed = 3 };

struct RunConfig {
  std::string subcommand;  // sample-dist, quadrant, strip, gibbs-sample, verify, free-energy
  std::string suite;       // verify target

  int d = 1;
  double theta = 2.0;
  double u = 0.0;
  double v = 0.0;
  std::vector<double> thetas;
  std::vector<double> alphas;
  std::vector<double> betas;
  int N = 2;
  std::string regime = "equilibrium";
  std::string boundary = "delta";
  std::string model = "quadrant-delta";
  std::string dist = "wishart";
  std::vector<std::string> paths;

  int M = 2;
  long n = 3;
  long m = 3;
  int steps = 1;
  int k_max = 8;
  double a = 0.0;
  double p = 1.0;
  double q = 1.0;
  int mh_steps = 20;

  long replicates = 1000;
  long samples = 200000;
  long cases = 10000;
  int sweeps = 2000;
  int burn_in = 500;
  int chains = 2;
  double level = 0.01;

  std::string seed = "0";
  int threads = 1;
  std::string output = "-";
  std::string format = "csv";
  bool force_identity_disorder = false;
  std::string config;
};

// Invalid configuration; code is kOk for --help, whose text is the message.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& msg, int code = kInvalidConfig) : std::runtime_error(msg), code(code) {}
  int code;
};

// Flags take precedence over the JSON config file, which takes precedence over
// MPL_SEED and the defaults.
RunConfig parse_config(const std::vector<std::string>& args);

QuadrantParams quadrant_params(const RunConfig& cfg);
StripParams strip_params(const RunConfig& cfg);

// Runs the configured subcommand, writing the primary output to `out`.
int run(const RunConfig& cfg, std::ostream& out);

// Full entry point: parsing, output file handling and error mapping.
int main(int argc, char** argv);

}  // namespace ivp::cli
