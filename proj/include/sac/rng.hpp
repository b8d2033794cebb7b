#pragma once
// Seedable random source. One explicit 64-bit seed per run; substreams are
// derived deterministically so chains and subsystems never share state.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace sac {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : base_(seed) {
    // Spread the seed before feeding the engine so nearby seeds diverge.
    std::uint64_t s = seed;
    std::seed_seq seq{splitmix64(s), splitmix64(s), splitmix64(s), splitmix64(s)};
    eng_.seed(seq);
  }

  // Independent stream for a named purpose (chain index, subsystem, ...).
  Rng substream(std::uint64_t salt) const {
    std::uint64_t s = base_ ^ (salt * 0xd6e8feb86659fd93ULL + 0x2545f4914f6cdd1dULL);
    return Rng(splitmix64(s));
  }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng_); }

  double uniform(double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(eng_);
  }

  double normal(double mean = 0.0, double sd = 1.0) {
    return std::normal_distribution<double>(mean, sd)(eng_);
  }

  double gamma(double shape, double scale = 1.0) {
    return std::gamma_distribution<double>(shape, scale)(eng_);
  }

  double beta(double a, double b) {
    double x = gamma(a);
    double y = gamma(b);
    double s = x + y;
    if (s <= 0.0) return 0.5;  // both gammas underflowed
    return x / s;
  }

  int binomial(int n, double p) {
    if (n <= 0) return 0;
    return std::binomial_distribution<int>(n, p)(eng_);
  }

  // Support 1,2,... with P(k) = (1-lambda) lambda^(k-1).
  int geometric_count(double lambda) {
    double u = uniform();
    if (u <= 0.0) u = std::numeric_limits<double>::min();
    int k = 1 + static_cast<int>(std::floor(std::log(u) / std::log(lambda)));
    return k < 1 ? 1 : k;
  }

  std::vector<double> dirichlet(const std::vector<double>& conc) {
    std::vector<double> w(conc.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < conc.size(); ++i) {
      w[i] = gamma(conc[i]);
      sum += w[i];
    }
    if (sum <= 0.0) {
      // All gamma draws underflowed (tiny concentrations); fall back to uniform.
      for (auto& x : w) x = 1.0 / static_cast<double>(w.size());
      return w;
    }
    for (auto& x : w) {
      x /= sum;
      if (x < 1e-300) x = 1e-300;  // keep the simplex open
    }
    return w;
  }

  size_t categorical(const std::vector<double>& probs) {
    double u = uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return i;
    }
    return probs.size() - 1;
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  std::uint64_t base_;
};

}  // namespace sac
