#pragma once
// Generative hierarchy for pretest/posttest mark data.
//
// Per (method, school, test) group: a geometric number of mixture components
// K, Beta components (alpha_k, beta_k) under a proBeta prior, Dirichlet
// mixing weights with concentration mu/K, per-student component assignments,
// per-student accuracies p, and binomial marks n out of N.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "sac/common.hpp"
#include "sac/rng.hpp"

namespace sac::model {

struct Hyperparams {
  double kappa = 0.01;
  double a = 0.4525;
  double b = 0.4525;
  double lambda = 0.5;
  double mu = 1.0;
  void validate() const;
};

// (school, method) identifies a class; adding the test number identifies the
// group that owns one set of mixture latents.
struct GroupKey {
  int school = 0;
  int method = 0;
  auto operator<=>(const GroupKey&) const = default;
};

struct GroupId {
  int school = 0;
  int method = 0;
  int test = 0;  // 1-based
  auto operator<=>(const GroupId&) const = default;
};

struct TestDesign {
  std::map<int, std::vector<int>> marks;  // school -> available marks per test

  int tests(int school) const;
  int marks_for(int school, int test) const;  // test is 1-based
  void validate() const;
};

struct Dataset {
  TestDesign design;
  // marks[u][t-1] for each student of a (school, method) class
  std::map<GroupKey, std::vector<std::vector<int>>> groups;

  int students(const GroupKey& key) const;
  void validate() const;  // ranges against the design, consistent test counts
};

struct MixtureComponent {
  double alpha = 1.0;
  double beta = 1.0;
};

struct GroupState {
  std::vector<MixtureComponent> components;
  std::vector<double> weights;   // open simplex, same length as components
  std::vector<int> assignments;  // 0-based component index per student
  int k() const { return static_cast<int>(components.size()); }
};

using LatentState = std::map<GroupId, GroupState>;

// --- log densities (all unnormalized only where stated) ---

// Log of the unnormalized proBeta density
//   kappa * [lnG(a+b') - lnG(a') - lnG(b') + (a'-1) ln a + (b'-1) ln b].
double log_probeta(double alpha, double beta, const Hyperparams& hyper);

// Normalized geometric prior on the component count: (1-lambda) lambda^(K-1).
double log_k_prior(int k, double lambda);

// Dirichlet density including the 1/sqrt(K) prefactor, which makes it
// unnormalized for fixed K. The sampler uses the normalized form below and
// treats this factor as a trans-dimensional pseudo-prior knob (see mcmc).
double log_dirichlet(std::span<const double> weights, std::span<const double> gamma);
double log_dirichlet_normalized(std::span<const double> weights,
                                std::span<const double> gamma);

// Binomial pmf; N = 0 forces n = 0 and contributes nothing.
double log_binomial(int n, int total, double p);

// Marginal of the binomial after integrating a Beta(alpha, beta) accuracy:
// C(N,n) B(alpha+n, beta+N-n) / B(alpha, beta).
double log_betabinomial(int n, int total, double alpha, double beta);

// --- sampling from the prior ---

// Tabulated inverse-CDF sampler for the proBeta prior in (u, ln tau)
// coordinates, u = alpha/(alpha+beta), tau = alpha+beta. The tau range is
// bounded where the prior tail drops ~45 nats below its peak; the truncated
// mass is negligible (same spirit as the K cap in the sampler).
class ProbetaSampler {
 public:
  explicit ProbetaSampler(const Hyperparams& hyper, int n_tau = 2048, int n_u = 1024);
  MixtureComponent sample(Rng& rng) const;
  double tau_max() const { return tau_hi_; }

 private:
  double tau_lo_ = 1e-4;
  double tau_hi_ = 0.0;
  double x_lo_ = 0.0, dx_ = 0.0;
  double du_ = 0.0;
  int n_tau_ = 0, n_u_ = 0;
  std::vector<double> x_cdf_;              // cumulative over tau bins
  std::vector<std::vector<double>> u_cdf_;  // per tau bin, cumulative over u
};

// Shared, lazily built sampler per hyperparameter setting.
std::shared_ptr<const ProbetaSampler> probeta_sampler_for(const Hyperparams& hyper);

struct SimulateOverrides {
  std::optional<int> fixed_k;
  std::optional<MixtureComponent> fixed_component;
};

struct GroupTruth {
  GroupState state;
  std::vector<double> accuracies;  // p per student
};

struct SimulationResult {
  Dataset data;
  std::map<GroupId, GroupTruth> truth;
};

// Top-down draw from the hierarchy; deterministic given (inputs, seed).
SimulationResult forward_simulate(const Hyperparams& hyper, const TestDesign& design,
                                  const std::map<GroupKey, int>& group_sizes,
                                  std::uint64_t seed,
                                  const SimulateOverrides& overrides = {});

}  // namespace sac::model
