#include "ivpoly/rng.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace ivp {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Seed Seed::child(std::uint64_t i) const {
  Seed s = *this;
  s.path.push_back(i);
  return s;
}

std::uint64_t Seed::key() const {
  std::uint64_t k = splitmix64(root ^ 0x5851F42D4C957F2Dull);
  for (std::uint64_t p : path) k = splitmix64(k ^ splitmix64(p + 0x632BE59BD9B4E019ull));
  return k;
}

std::string Seed::str() const {
  std::ostringstream os;
  os << root;
  for (std::size_t i = 0; i < path.size(); ++i) os << (i == 0 ? ':' : '.') << path[i];
  return os.str();
}

Philox::Philox(const Seed& s) : Philox(s.key()) {}

Philox::Philox(std::uint64_t key) {
  key_[0] = static_cast<std::uint32_t>(key);
  key_[1] = static_cast<std::uint32_t>(key >> 32);
}

void Philox::refill() {
  constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  std::array<std::uint32_t, 4> c = ctr_;
  std::uint32_t k0 = key_[0], k1 = key_[1];
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * c[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
    k0 += W0;
    k1 += W1;
  }
  buf_ = c;
  pos_ = 0;
  for (auto& w : ctr_) {
    if (++w != 0) break;
  }
}

Philox::result_type Philox::operator()() {
  if (pos_ > 2) refill();
  const std::uint64_t lo = buf_[pos_], hi = buf_[pos_ + 1];
  pos_ += 2;
  return (hi << 32) | lo;
}

double Philox::uniform() {
  // 53 random bits, shifted off zero.
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double Philox::normal() { return normal_(*this); }

double Philox::gamma(double shape) {
  std::gamma_distribution<double> g(shape, 1.0);
  return g(*this);
}

}  // namespace ivp
