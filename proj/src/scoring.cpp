#include "sac/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sac::scoring {

namespace {

// Composite Simpson with an odd node count.
double simpson(const std::function<double(double)>& fn, double a, double b, int nodes) {
  if (a == b) return 0.0;
  int n = std::max(nodes, 3);
  if (n % 2 == 0) ++n;
  const double h = (b - a) / (n - 1);
  double sum = fn(a) + fn(b);
  for (int i = 1; i < n - 1; ++i) sum += fn(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

constexpr double kEdge = 1e-12;  // endpoint truncation for singular integrands

// Integral from 1/2 to q of m(t)/t dt, computed in v = ln t so the 1/t
// singularity disappears: integrand becomes m(e^v).
double symmetric_integral(const std::function<double(double)>& m, double q, int nodes) {
  q = std::clamp(q, 0.0, 1.0);
  if (q == 0.5) return 0.0;
  double lo = std::max(std::min(q, 0.5), kEdge);
  double hi = std::max(q, 0.5);
  auto g = [&m](double v) {
    double t = std::clamp(std::exp(v), kEdge, 1.0 - kEdge);
    return m(t);
  };
  double val = simpson(g, std::log(lo), std::log(hi), nodes);
  return q >= 0.5 ? val : -val;
}

// Integral from 1/2 to q of f'(t) dt (bounded integrand, plain t-space).
double plain_integral(const std::function<double(double)>& fd, double q, int nodes) {
  q = std::clamp(q, 0.0, 1.0);
  if (q == 0.5) return 0.0;
  double lo = std::min(q, 0.5);
  double hi = std::max(q, 0.5);
  auto g = [&fd](double t) { return fd(std::clamp(t, kEdge, 1.0 - kEdge)); };
  double val = simpson(g, lo, hi, nodes);
  return q >= 0.5 ? val : -val;
}

// Integral from 1/2 to q of t/(1-t) f'(t) dt, computed in w = ln(1-t):
// t/(1-t) f'(t) dt = -t f'(t) dw, so the t -> 1 singularity disappears.
double ratio_integral(const std::function<double(double)>& fd, double q, int nodes) {
  q = std::clamp(q, 0.0, 1.0);
  if (q == 0.5) return 0.0;
  double w_q = std::log(std::max(1.0 - q, kEdge));
  double w_half = std::log(0.5);
  auto g = [&fd](double w) {
    double t = std::clamp(1.0 - std::exp(w), kEdge, 1.0 - kEdge);
    return t * fd(t);
  };
  double lo = std::min(w_q, w_half);
  double hi = std::max(w_q, w_half);
  double val = simpson(g, lo, hi, nodes);
  // For q > 1/2 the w-interval is [w_q, w_half] and the substitution flips
  // orientation twice, leaving the plain Simpson value.
  return q >= 0.5 ? val : -val;
}

std::vector<double> interior_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  const double step = (hi - lo) / (n + 1);
  for (int i = 0; i < n; ++i) g[i] = lo + (i + 1) * step;
  return g;
}

std::string format_failures(const std::vector<double>& xs) {
  std::ostringstream os;
  os.precision(6);
  for (std::size_t i = 0; i < xs.size() && i < 8; ++i) {
    if (i) os << ", ";
    os << xs[i];
  }
  if (xs.size() > 8) os << ", ... (" << xs.size() << " total)";
  return os.str();
}

}  // namespace

double foster_score(double q, bool correct) {
  require(std::isfinite(q) && q >= 0.0 && q <= 1.0, "confidence must lie in [0,1]");
  return correct ? q : -q;
}

ScoringRule foster_rule() {
  return {"foster",
          [](double q) { return q; },
          [](double q) { return -q; },
          "linear +-q; expected score maximised at q in {0,1}, not at q = p",
          false};
}

ScoringRule log_rule() {
  return {"log",
          [](double q) { return q <= 0.0 ? kNegInf : std::log2(2.0 * q); },
          [](double q) { return q >= 1.0 ? kNegInf : std::log2(2.0 * (1.0 - q)); },
          "log2(2q) / log2(2(1-q)); diverges to -inf at q=0 (right) and q=1 (wrong)",
          true};
}

ScoringRule quadratic_rule() {
  return {"quadratic",
          [](double q) { return 2.0 * q - q * q; },
          [](double q) { return 1.0 - q * q; },
          "2q-q^2 / 1-q^2; finite everywhere",
          true};
}

ScoringRule asymmetric_rule() {
  return {"asymmetric",
          [](double q) { return 2.0 * q - q * q; },
          [](double q) { return -q * q; },
          "2q-q^2 / -q^2; h(p,q) = 2pq - q^2",
          false};
}

ScoringRule scaled_asymmetric_rule() {
  return {"scaled-asymmetric",
          [](double q) { return 2.0 * (2.0 * q - q * q) - 1.0; },
          [](double q) { return -2.0 * q * q - 1.0; },
          "2(2q-q^2)-1 / -2q^2-1; wrong-answer score reaches -3 at q=1",
          false};
}

ScoringRule combined_rule() {
  return {"combined",
          [](double q) { return q <= 0.0 ? kNegInf : 1.0 + std::log2(2.0 * q); },
          [](double q) { return q >= 1.0 ? kNegInf : -1.0 + std::log2(2.0 * (1.0 - q)); },
          "+-1 for correctness plus the log rule; -inf at q=0 (right) and q=1 (wrong)",
          false};
}

ScoringRule rule_by_name(const std::string& name) {
  if (name == "foster") return foster_rule();
  if (name == "log") return log_rule();
  if (name == "quadratic") return quadratic_rule();
  if (name == "asymmetric") return asymmetric_rule();
  if (name == "scaled-asymmetric") return scaled_asymmetric_rule();
  if (name == "combined") return combined_rule();
  throw ValidationError("unknown rule '" + name + "'");
}

std::vector<std::string> rule_names() {
  return {"foster", "log", "quadratic", "asymmetric", "scaled-asymmetric", "combined"};
}

double expected_score(const ScoringRule& rule, double p, double q) {
  require(std::isfinite(p) && p >= 0.0 && p <= 1.0, "accuracy must lie in [0,1]");
  require(std::isfinite(q) && q >= 0.0 && q <= 1.0, "confidence must lie in [0,1]");
  double total = 0.0;
  if (p > 0.0) {
    double f = rule.correct_score(q);
    if (is_neg_inf(f)) return kNegInf;
    total += p * f;
  }
  if (p < 1.0) {
    double g = rule.wrong_score(q);
    if (is_neg_inf(g)) return kNegInf;
    total += (1.0 - p) * g;
  }
  return total;
}

double optimal_report(const ScoringRule& rule, double p, int grid_size) {
  require(grid_size >= 3, "grid_size must be at least 3");
  const double step = 1.0 / (grid_size - 1);
  double best_q = 0.0;
  double best = kNegInf;
  for (int i = 0; i < grid_size; ++i) {
    double q = (i == grid_size - 1) ? 1.0 : i * step;
    double h = expected_score(rule, p, q);
    if (h > best) {
      best = h;
      best_q = q;
    }
  }
  return best_q;
}

ScoringRule build_symmetric_family(const SymmetricWeight& m, int quad_points) {
  require(quad_points >= 3, "quad_points must be at least 3");
  require(static_cast<bool>(m.weight), "weight function required");

  const auto grid = interior_grid(0.0, 1.0, 513);
  std::vector<double> bad;
  for (double x : grid) {
    double v = m.weight(x);
    double v_mirror = m.weight(1.0 - x);
    if (!(v > 0.0) || std::abs(v - v_mirror) > 1e-9 * std::max(1.0, std::abs(v)))
      bad.push_back(x);
  }
  if (!bad.empty())
    throw ValidationError("weight is not symmetric-positive at: " + format_failures(bad));

  auto w = m.weight;
  int qp = quad_points;
  ScoringRule rule;
  rule.name = m.description.empty() ? "symmetric-family" : "symmetric[" + m.description + "]";
  rule.correct_score = [w, qp](double q) { return symmetric_integral(w, q, qp); };
  rule.wrong_score = [w, qp](double q) { return symmetric_integral(w, 1.0 - q, qp); };
  rule.domain_note = "integral of m(t)/t anchored at f(1/2) = 0";
  rule.symmetric = true;

  CheckReport c1 = check_c1(rule, 101);
  if (!c1.pass)
    throw std::logic_error("constructed symmetric rule failed C1: " + c1.detail);
  CheckReport c2 = check_c2(rule, 0.5, 101);
  if (!c2.pass)
    throw std::logic_error("constructed symmetric rule failed C2 on (1/2,1): " + c2.detail);
  return rule;
}

ScoringRule build_asymmetric_family(const std::function<double(double)>& f_deriv,
                                    double offset, int quad_points) {
  require(quad_points >= 3, "quad_points must be at least 3");
  require(static_cast<bool>(f_deriv), "derivative function required");

  const auto grid = interior_grid(0.0, 1.0, 513);
  std::vector<double> bad;
  for (double x : grid)
    if (!(f_deriv(x) > 0.0)) bad.push_back(x);
  if (!bad.empty())
    throw ValidationError("f_deriv is not positive at: " + format_failures(bad));

  auto fd = f_deriv;
  int qp = quad_points;
  ScoringRule rule;
  rule.name = "asymmetric-family";
  rule.correct_score = [fd, qp, offset](double q) {
    return offset + plain_integral(fd, q, qp);
  };
  rule.wrong_score = [fd, qp](double q) { return -ratio_integral(fd, q, qp); };
  rule.domain_note = "f' > 0 with g' = -t/(1-t) f'; both anchored at 1/2";
  rule.symmetric = false;

  // The truthful payoff increases iff correct > wrong; their difference is
  // increasing in p, so a violation list always starts at the low end.
  std::vector<double> violations;
  for (double x : grid) {
    if (rule.correct_score(x) <= rule.wrong_score(x)) violations.push_back(x);
  }
  if (!violations.empty())
    throw ValidationError("correct score does not dominate wrong score (offset too small) at: " +
                          format_failures(violations));
  return rule;
}

CheckReport check_c1(const ScoringRule& rule, int grid_size, double tolerance) {
  require(grid_size >= 101, "check_c1 needs grid_size >= 101");
  const auto grid = interior_grid(0.0, 1.0, grid_size);
  const double step = 1.0 / (grid_size + 1);

  std::vector<double> f(grid_size), g(grid_size);
  for (int i = 0; i < grid_size; ++i) {
    f[i] = rule.correct_score(grid[i]);
    g[i] = rule.wrong_score(grid[i]);
  }

  CheckReport report;
  std::vector<double> h(grid_size);
  for (int ip = 0; ip < grid_size; ++ip) {
    const double p = grid[ip];
    int argmax = 0;
    for (int iq = 0; iq < grid_size; ++iq) {
      h[iq] = p * f[iq] + (1.0 - p) * g[iq];
      if (h[iq] > h[argmax]) argmax = iq;
    }
    bool ok = std::abs(grid[argmax] - p) <= step * (1.0 + 1e-9) + tolerance;
    if (ok) {
      int maxima = 0;
      for (int iq = 0; iq < grid_size; ++iq) {
        bool left = (iq == 0) || h[iq] > h[iq - 1];
        bool right = (iq == grid_size - 1) || h[iq] > h[iq + 1];
        if (left && right) ++maxima;
      }
      ok = (maxima == 1);
    }
    if (!ok) {
      report.pass = false;
      report.failing.push_back(p);
    }
  }
  if (!report.pass)
    report.detail = "argmax or unimodality broke at p = " + format_failures(report.failing);
  return report;
}

CheckReport check_c2(const ScoringRule& rule, double j_lower, int grid_size) {
  require(j_lower >= 0.0 && j_lower < 1.0, "j_lower must lie in [0,1)");
  require(grid_size >= 3, "check_c2 needs grid_size >= 3");
  const auto grid = interior_grid(j_lower, 1.0, grid_size);

  CheckReport report;
  double prev = expected_score(rule, grid[0], grid[0]);
  for (int i = 1; i < grid_size; ++i) {
    double cur = expected_score(rule, grid[i], grid[i]);
    if (!(cur > prev)) {
      report.pass = false;
      report.failing.push_back(grid[i]);
    }
    prev = cur;
  }
  if (!report.pass)
    report.detail = "truthful payoff not strictly increasing at p = " +
                    format_failures(report.failing);
  return report;
}

double multichoice_log_score(std::span<const double> probs, int correct_index,
                             double sum_tolerance) {
  require(!probs.empty(), "probability vector is empty");
  require(correct_index >= 0 && correct_index < static_cast<int>(probs.size()),
          "correct_index out of range");
  double sum = 0.0;
  for (double p : probs) {
    require(std::isfinite(p) && p >= 0.0, "probabilities must be nonnegative");
    sum += p;
  }
  require(std::abs(sum - 1.0) <= sum_tolerance, "probabilities must sum to 1");
  double p = probs[correct_index];
  return p <= 0.0 ? kNegInf : std::log(p);
}

SabotageReport sabotage_threshold(int grid_size) {
  require(grid_size >= 1001, "sabotage_threshold needs grid_size >= 1001");
  const ScoringRule rule = combined_rule();
  SabotageReport report;
  report.sabotage_payoff = rule.wrong_score(0.0);

  const double step = 1.0 / (grid_size - 1);
  double threshold = 0.0;
  double best_gain = kNegInf;
  for (int i = grid_size - 2; i >= 1; --i) {  // interior grid, largest p first
    double p = i * step;
    double gain = report.sabotage_payoff - expected_score(rule, p, p);
    if (gain > 0.0 && threshold == 0.0) threshold = p;
    if (gain > best_gain) {
      best_gain = gain;
      report.max_advantage_p = p;
    }
  }
  report.computed_threshold = threshold;
  report.discrepancy = std::abs(threshold - report.quoted_threshold);
  return report;
}

ExpectedScoreSurface make_surface(const ScoringRule& rule, int resolution) {
  require(resolution >= 2, "surface resolution must be at least 2");
  ExpectedScoreSurface s;
  s.rule_name = rule.name;
  s.resolution = resolution;
  s.accuracy.resize(resolution);
  s.confidence.resize(resolution);
  const double step = 1.0 / (resolution - 1);
  for (int i = 0; i < resolution; ++i) {
    s.accuracy[i] = (i == resolution - 1) ? 1.0 : i * step;
    s.confidence[i] = s.accuracy[i];
  }
  s.h.resize(static_cast<std::size_t>(resolution) * resolution);
  for (int ip = 0; ip < resolution; ++ip)
    for (int iq = 0; iq < resolution; ++iq)
      s.h[static_cast<std::size_t>(ip) * resolution + iq] =
          expected_score(rule, s.accuracy[ip], s.confidence[iq]);
  return s;
}

}  // namespace sac::scoring
