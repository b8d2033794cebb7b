#include "sac/model.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <string>

namespace sac::model {

void Hyperparams::validate() const {
  require(kappa > 0.0, "kappa must be positive");
  require(a > 0.0 && b > 0.0, "a and b must be positive");
  require(a + b < 1.0, "a + b must be below 1");
  require(lambda > 0.0 && lambda < 1.0, "lambda must lie in (0,1)");
  require(mu > 0.0, "mu must be positive");
}

int TestDesign::tests(int school) const {
  auto it = marks.find(school);
  require(it != marks.end(), "unknown school " + std::to_string(school));
  return static_cast<int>(it->second.size());
}

int TestDesign::marks_for(int school, int test) const {
  auto it = marks.find(school);
  require(it != marks.end(), "unknown school " + std::to_string(school));
  require(test >= 1 && test <= static_cast<int>(it->second.size()),
          "test " + std::to_string(test) + " out of range for school " +
              std::to_string(school));
  return it->second[static_cast<std::size_t>(test - 1)];
}

void TestDesign::validate() const {
  for (const auto& [school, ns] : marks) {
    require(!ns.empty(), "school " + std::to_string(school) + " has no tests");
    for (int n : ns)
      require(n >= 0, "school " + std::to_string(school) + " has negative marks");
  }
}

int Dataset::students(const GroupKey& key) const {
  auto it = groups.find(key);
  return it == groups.end() ? 0 : static_cast<int>(it->second.size());
}

void Dataset::validate() const {
  design.validate();
  for (const auto& [key, rows] : groups) {
    require(key.method == 1 || key.method == 2, "method must be 1 or 2");
    const int t_count = design.tests(key.school);
    for (std::size_t u = 0; u < rows.size(); ++u) {
      require(static_cast<int>(rows[u].size()) == t_count,
              "student " + std::to_string(u + 1) + " in school " +
                  std::to_string(key.school) + " method " + std::to_string(key.method) +
                  " is missing tests");
      for (int t = 1; t <= t_count; ++t) {
        int n = rows[u][static_cast<std::size_t>(t - 1)];
        int cap = design.marks_for(key.school, t);
        require(n >= 0 && n <= cap,
                "score " + std::to_string(n) + " outside [0," + std::to_string(cap) +
                    "] for school " + std::to_string(key.school) + " test " +
                    std::to_string(t));
      }
    }
  }
}

double log_probeta(double alpha, double beta, const Hyperparams& hyper) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw ValidationError("proBeta parameters must be positive");
  return hyper.kappa * (log_gamma(alpha + beta) - log_gamma(alpha) - log_gamma(beta) +
                        (alpha - 1.0) * std::log(hyper.a) +
                        (beta - 1.0) * std::log(hyper.b));
}

double log_k_prior(int k, double lambda) {
  require(k >= 1, "component count must be at least 1");
  return std::log1p(-lambda) + (k - 1) * std::log(lambda);
}

double log_dirichlet_normalized(std::span<const double> weights,
                                std::span<const double> gamma) {
  require(weights.size() == gamma.size(), "weights/gamma length mismatch");
  require(!weights.empty(), "empty weight vector");
  double sum = 0.0;
  for (double w : weights) {
    require(w > 0.0, "weights must be strictly positive");
    sum += w;
  }
  require(std::abs(sum - 1.0) <= 1e-9, "weights must sum to 1");
  double gsum = 0.0;
  double value = 0.0;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    require(gamma[i] > 0.0, "gamma entries must be positive");
    gsum += gamma[i];
    value += (gamma[i] - 1.0) * std::log(weights[i]) - log_gamma(gamma[i]);
  }
  return value + log_gamma(gsum);
}

double log_dirichlet(std::span<const double> weights, std::span<const double> gamma) {
  return log_dirichlet_normalized(weights, gamma) -
         0.5 * std::log(static_cast<double>(weights.size()));
}

double log_binomial(int n, int total, double p) {
  require(total >= 0, "total marks must be nonnegative");
  require(n >= 0 && n <= total, "marks out of range");
  if (total == 0) return 0.0;
  require(p > 0.0 && p < 1.0, "binomial accuracy must lie in (0,1)");
  return log_choose(total, n) + n * std::log(p) + (total - n) * std::log1p(-p);
}

double log_betabinomial(int n, int total, double alpha, double beta) {
  require(total >= 0, "total marks must be nonnegative");
  require(n >= 0 && n <= total, "marks out of range");
  require(alpha > 0.0 && beta > 0.0, "Beta parameters must be positive");
  if (total == 0) return 0.0;
  return log_choose(total, n) + log_beta(alpha + n, beta + total - n) -
         log_beta(alpha, beta);
}

ProbetaSampler::ProbetaSampler(const Hyperparams& hyper, int n_tau, int n_u)
    : n_tau_(n_tau), n_u_(n_u) {
  hyper.validate();
  // The total tau = alpha + beta decays at rate at least kappa |ln(a+b)| along
  // every direction, so 45 nats of decay bounds the usable range.
  tau_hi_ = 100.0 + 45.0 / (hyper.kappa * -std::log(hyper.a + hyper.b));
  x_lo_ = std::log(tau_lo_);
  dx_ = (std::log(tau_hi_) - x_lo_) / n_tau_;
  du_ = 1.0 / n_u_;

  std::vector<double> row_log(static_cast<std::size_t>(n_u_));
  std::vector<double> x_log_mass(static_cast<std::size_t>(n_tau_));
  u_cdf_.resize(static_cast<std::size_t>(n_tau_));

  for (int i = 0; i < n_tau_; ++i) {
    const double tau = std::exp(x_lo_ + (i + 0.5) * dx_);
    for (int j = 0; j < n_u_; ++j) {
      const double u = (j + 0.5) * du_;
      // Jacobian of (alpha, beta) -> (u, x = ln tau) is tau^2.
      row_log[static_cast<std::size_t>(j)] =
          log_probeta(u * tau, (1.0 - u) * tau, hyper) + 2.0 * std::log(tau);
    }
    const double m = log_sum_exp(row_log);
    x_log_mass[static_cast<std::size_t>(i)] = m;
    auto& cdf = u_cdf_[static_cast<std::size_t>(i)];
    cdf.resize(static_cast<std::size_t>(n_u_));
    double acc = 0.0;
    for (int j = 0; j < n_u_; ++j) {
      acc += std::exp(row_log[static_cast<std::size_t>(j)] - m);
      cdf[static_cast<std::size_t>(j)] = acc;
    }
    for (auto& c : cdf) c /= acc;
  }

  const double total = log_sum_exp(x_log_mass);
  x_cdf_.resize(static_cast<std::size_t>(n_tau_));
  double acc = 0.0;
  for (int i = 0; i < n_tau_; ++i) {
    acc += std::exp(x_log_mass[static_cast<std::size_t>(i)] - total);
    x_cdf_[static_cast<std::size_t>(i)] = acc;
  }
  for (auto& c : x_cdf_) c /= acc;
}

MixtureComponent ProbetaSampler::sample(Rng& rng) const {
  const double ux = rng.uniform();
  const auto xi = std::lower_bound(x_cdf_.begin(), x_cdf_.end(), ux) - x_cdf_.begin();
  const auto i = std::min<std::ptrdiff_t>(xi, n_tau_ - 1);
  const double x = x_lo_ + (static_cast<double>(i) + rng.uniform()) * dx_;

  const auto& cdf = u_cdf_[static_cast<std::size_t>(i)];
  const double uu = rng.uniform();
  const auto ji = std::lower_bound(cdf.begin(), cdf.end(), uu) - cdf.begin();
  const auto j = std::min<std::ptrdiff_t>(ji, n_u_ - 1);
  const double u = (static_cast<double>(j) + rng.uniform()) * du_;

  const double tau = std::exp(x);
  MixtureComponent c;
  c.alpha = std::max(u * tau, 1e-10);
  c.beta = std::max((1.0 - u) * tau, 1e-10);
  return c;
}

std::shared_ptr<const ProbetaSampler> probeta_sampler_for(const Hyperparams& hyper) {
  struct Key {
    double kappa, a, b;
    auto operator<=>(const Key&) const = default;
  };
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const ProbetaSampler>> cache;
  const Key key{hyper.kappa, hyper.a, hyper.b};
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto sampler = std::make_shared<const ProbetaSampler>(hyper);
  cache.emplace(key, sampler);
  return sampler;
}

SimulationResult forward_simulate(const Hyperparams& hyper, const TestDesign& design,
                                  const std::map<GroupKey, int>& group_sizes,
                                  std::uint64_t seed,
                                  const SimulateOverrides& overrides) {
  hyper.validate();
  design.validate();
  auto probeta = overrides.fixed_component ? nullptr : probeta_sampler_for(hyper);

  Rng rng(seed);
  SimulationResult out;
  out.data.design = design;

  for (const auto& [key, count] : group_sizes) {
    require(count >= 0, "group size must be nonnegative");
    const int t_count = design.tests(key.school);
    auto& rows = out.data.groups[key];
    rows.assign(static_cast<std::size_t>(count),
                std::vector<int>(static_cast<std::size_t>(t_count), 0));

    for (int t = 1; t <= t_count; ++t) {
      const int total = design.marks_for(key.school, t);
      GroupTruth truth;

      const int k = overrides.fixed_k.value_or(rng.geometric_count(hyper.lambda));
      truth.state.components.resize(static_cast<std::size_t>(k));
      for (auto& comp : truth.state.components)
        comp = overrides.fixed_component ? *overrides.fixed_component
                                         : probeta->sample(rng);
      truth.state.weights =
          rng.dirichlet(std::vector<double>(static_cast<std::size_t>(k), hyper.mu / k));

      truth.state.assignments.resize(static_cast<std::size_t>(count));
      truth.accuracies.resize(static_cast<std::size_t>(count));
      for (int u = 0; u < count; ++u) {
        const auto comp_idx = rng.categorical(truth.state.weights);
        const auto& comp = truth.state.components[comp_idx];
        double p = rng.beta(comp.alpha, comp.beta);
        p = std::clamp(p, 1e-12, 1.0 - 1e-12);
        truth.state.assignments[static_cast<std::size_t>(u)] = static_cast<int>(comp_idx);
        truth.accuracies[static_cast<std::size_t>(u)] = p;
        rows[static_cast<std::size_t>(u)][static_cast<std::size_t>(t - 1)] =
            rng.binomial(total, p);
      }
      out.truth.emplace(GroupId{key.school, key.method, t}, std::move(truth));
    }
  }
  out.data.validate();
  return out;
}

}  // namespace sac::model
