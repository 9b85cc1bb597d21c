#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace ivp {

// A root seed plus a path of stream indices.  Streams with different paths
// are keyed independently, so each lattice vertex, walk step or replicate can
// own its randomness regardless of evaluation order.
struct Seed {
  std::uint64_t root = 0;
  std::vector<std::uint64_t> path;

  Seed() = default;
  explicit Seed(std::uint64_t r) : root(r) {}
  Seed(std::uint64_t r, std::vector<std::uint64_t> p) : root(r), path(std::move(p)) {}

  Seed child(std::uint64_t i) const;
  Seed child(std::uint64_t i, std::uint64_t j) const { return child(i).child(j); }
  std::uint64_t key() const;
  std::string str() const;

  bool operator==(const Seed& o) const { return root == o.root && path == o.path; }
};

// Maps signed lattice coordinates to stream indices.
inline std::uint64_t zigzag(long long v) {
  return v >= 0 ? static_cast<std::uint64_t>(v) * 2u : static_cast<std::uint64_t>(-(v + 1)) * 2u + 1u;
}

std::uint64_t splitmix64(std::uint64_t x);

// Philox4x32-10 counter-based generator.  Satisfies UniformRandomBitGenerator
// so the <random> distributions can draw from it.
class Philox {
 public:
  using result_type = std::uint64_t;

  explicit Philox(const Seed& s);
  explicit Philox(std::uint64_t key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform double in the open interval (0, 1).
  double uniform();
  double normal();
  double gamma(double shape);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 4> ctr_{};
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ivp
