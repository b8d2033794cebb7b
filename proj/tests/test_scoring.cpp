#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sac/rng.hpp"
#include "sac/scoring.hpp"

using namespace sac;
using namespace sac::scoring;

namespace {

// Piecewise-linear function on fixed knots, clamped outside.
struct PiecewiseLinear {
  std::vector<double> xs, ys;
  double operator()(double x) const {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return ys[i] + t * (ys[i + 1] - ys[i]);
  }
};

// Random symmetric positive weight: random values on [0.05, 0.5], mirrored.
PiecewiseLinear random_symmetric_weight(Rng& rng) {
  std::vector<double> xs, ys;
  for (int i = 0; i <= 9; ++i) {
    xs.push_back(0.05 + 0.05 * i);
    ys.push_back(rng.uniform(0.2, 2.0));
  }
  for (int i = 8; i >= 0; --i) {  // mirror about 1/2
    xs.push_back(1.0 - (0.05 + 0.05 * i));
    ys.push_back(ys[static_cast<std::size_t>(i)]);
  }
  return {xs, ys};
}

PiecewiseLinear random_positive_deriv(Rng& rng) {
  std::vector<double> xs, ys;
  for (int i = 0; i <= 10; ++i) {
    xs.push_back(0.1 * i);
    ys.push_back(rng.uniform(0.2, 2.0));
  }
  return {xs, ys};
}

}  // namespace

TEST_CASE("foster score") {
  CHECK(foster_score(1.0, true) == doctest::Approx(1.0));
  CHECK(foster_score(0.7, false) == doctest::Approx(-0.7));
  CHECK(foster_score(0.0, false) == doctest::Approx(0.0));
  CHECK_THROWS_AS(foster_score(1.2, true), ValidationError);
}

TEST_CASE("closed-form rules hit their fixed points") {
  auto lg = log_rule();
  CHECK(lg.correct_score(0.5) == doctest::Approx(0.0));
  CHECK(lg.correct_score(1.0) == doctest::Approx(1.0));
  CHECK(is_neg_inf(lg.wrong_score(1.0)));
  CHECK(is_neg_inf(lg.correct_score(0.0)));

  auto quad = quadratic_rule();
  CHECK(quad.correct_score(1.0) == doctest::Approx(1.0));
  CHECK(quad.wrong_score(0.0) == doctest::Approx(1.0));
  CHECK(expected_score(quad, 0.5, 0.5) == doctest::Approx(0.75));

  auto asym = asymmetric_rule();
  CHECK(expected_score(asym, 0.6, 0.6) == doctest::Approx(0.36));
  CHECK(asym.wrong_score(1.0) == doctest::Approx(-1.0));
  CHECK(asym.correct_score(0.0) == doctest::Approx(0.0));

  auto scaled = scaled_asymmetric_rule();
  CHECK(scaled.correct_score(1.0) == doctest::Approx(1.0));
  CHECK(scaled.wrong_score(1.0) == doctest::Approx(-3.0));
  CHECK(scaled.wrong_score(0.0) == doctest::Approx(-1.0));

  auto comb = combined_rule();
  CHECK(comb.correct_score(0.5) == doctest::Approx(1.0));
  CHECK(comb.wrong_score(0.0) == doctest::Approx(0.0));
  CHECK(is_neg_inf(comb.wrong_score(1.0)));
}

TEST_CASE("expected score basics") {
  CHECK(expected_score(log_rule(), 0.5, 0.5) == doctest::Approx(0.0));
  // foster expectation expands to (2p-1) q
  CHECK(expected_score(foster_rule(), 0.7, 0.4) == doctest::Approx(0.16));
  CHECK(expected_score(asymmetric_rule(), 0.9, 0.9) == doctest::Approx(0.81));
}

TEST_CASE("negative infinity propagates iff the divergent branch has weight") {
  auto lg = log_rule();
  CHECK(is_neg_inf(expected_score(lg, 0.5, 0.0)));   // correct branch diverges
  CHECK(is_neg_inf(expected_score(lg, 0.5, 1.0)));   // wrong branch diverges
  CHECK(expected_score(lg, 1.0, 1.0) == doctest::Approx(1.0));  // weight 0 on wrong
  CHECK(expected_score(lg, 0.0, 0.0) == doctest::Approx(1.0));  // weight 0 on correct
  CHECK(is_neg_inf(expected_score(lg, 0.0, 1.0)));
}

TEST_CASE("optimal report: foster pushes to the extremes, proper rules stay put") {
  CHECK(optimal_report(foster_rule(), 0.7, 1001) == doctest::Approx(1.0));
  CHECK(optimal_report(foster_rule(), 0.3, 1001) == doctest::Approx(0.0));
  const double step = 1.0 / 1000.0;
  CHECK(std::abs(optimal_report(log_rule(), 0.3, 1001) - 0.3) <= step + 1e-12);
}

TEST_CASE("foster expected score is linear in q") {
  auto rule = foster_rule();
  for (int i = 1; i < 100; ++i) {
    double p = i / 100.0;
    double h0 = expected_score(rule, p, 0.0);
    double h1 = expected_score(rule, p, 1.0);
    double hm = expected_score(rule, p, 0.5);
    CHECK(std::abs(hm - 0.5 * (h0 + h1)) < 1e-12);
    CHECK(h1 - h0 == doctest::Approx(2.0 * p - 1.0));
  }
}

TEST_CASE("log rule reproduces the closed-form expectation") {
  auto lg = log_rule();
  Rng rng(20240915);
  const double ln2 = std::log(2.0);
  for (int i = 0; i < 10000; ++i) {
    double p = rng.uniform(1e-6, 1.0 - 1e-6);
    double q = rng.uniform(1e-6, 1.0 - 1e-6);
    double want = (p * std::log(q) + (1.0 - p) * std::log(1.0 - q) + ln2) / ln2;
    CHECK(std::abs(expected_score(lg, p, q) - want) < 1e-12);
  }
}

TEST_CASE("asymmetric truthful payoff is p^2") {
  auto asym = asymmetric_rule();
  for (int i = 1; i < 500; ++i) {
    double p = i / 500.0;
    CHECK(std::abs(expected_score(asym, p, p) - p * p) < 1e-12);
  }
}

TEST_CASE("symmetric rules satisfy wrong(q) == correct(1-q)") {
  for (auto rule : {log_rule(), quadratic_rule()}) {
    for (int i = 1; i < 200; ++i) {
      double q = i / 200.0;
      CHECK(std::abs(rule.wrong_score(q) - rule.correct_score(1.0 - q)) < 1e-10);
    }
  }
}

TEST_CASE("check_c1 verdicts") {
  CHECK(check_c1(log_rule(), 201).pass);
  CHECK(check_c1(quadratic_rule(), 201).pass);
  auto foster = check_c1(foster_rule(), 201);
  CHECK_FALSE(foster.pass);
  CHECK_FALSE(foster.failing.empty());
}

TEST_CASE("check_c2 verdicts") {
  CHECK(check_c2(log_rule(), 0.5, 201).pass);
  CHECK_FALSE(check_c2(log_rule(), 0.0, 201).pass);
  CHECK(check_c2(asymmetric_rule(), 0.0, 201).pass);
}

TEST_CASE("symmetric family: constant weight recovers the natural-log rule") {
  SymmetricWeight m{[](double) { return 1.0; }, "constant"};
  auto rule = build_symmetric_family(m, 2049);
  CHECK(std::abs(rule.correct_score(0.25) - std::log(0.5)) < 1e-9);
  CHECK(std::abs(rule.correct_score(0.8) - std::log(1.6)) < 1e-9);
  CHECK(rule.correct_score(0.5) == doctest::Approx(0.0));
}

TEST_CASE("symmetric family: m = 2t(1-t) matches the quadratic rule up to a constant") {
  SymmetricWeight m{[](double t) { return 2.0 * t * (1.0 - t); }, "parabolic"};
  auto rule = build_symmetric_family(m, 2049);
  auto quad = quadratic_rule();
  // f(q) = 2q - q^2 - 3/4, so the gap to the closed form is constant.
  double gap = rule.correct_score(0.3) - quad.correct_score(0.3);
  CHECK(gap == doctest::Approx(-0.75).epsilon(1e-8));
  for (double q : {0.1, 0.42, 0.5, 0.77, 0.9}) {
    CHECK(std::abs(rule.correct_score(q) - quad.correct_score(q) - gap) < 1e-9);
  }
}

TEST_CASE("symmetric family rejects asymmetric or nonpositive weights") {
  SymmetricWeight skew{[](double t) { return 0.5 + t; }, "skew"};
  CHECK_THROWS_AS(build_symmetric_family(skew), ValidationError);
  SymmetricWeight neg{[](double t) { return t - 0.5; }, "signed"};
  CHECK_THROWS_AS(build_symmetric_family(neg), ValidationError);
}

TEST_CASE("asymmetric family: f' = 2(1-t) recovers the quadratic pair up to a shared constant") {
  auto fd = [](double t) { return 2.0 * (1.0 - t); };
  auto rule = build_asymmetric_family(fd, 1.0, 2049);
  auto asym = asymmetric_rule();
  // offset 1 places both branches exactly 1/4 above the closed-form pair
  for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    CHECK(std::abs(rule.correct_score(q) - asym.correct_score(q) - 0.25) < 1e-9);
    CHECK(std::abs(rule.wrong_score(q) - asym.wrong_score(q) - 0.25) < 1e-9);
  }
}

TEST_CASE("asymmetric family: f' = 1/t recovers the log-family wrong-answer branch") {
  auto fd = [](double t) { return 1.0 / t; };
  auto rule = build_asymmetric_family(fd, 7.0, 4097);
  for (double q : {0.1, 0.5, 0.9, 0.99}) {
    CHECK(std::abs(rule.wrong_score(q) - std::log(2.0 * (1.0 - q))) < 1e-8);
  }
}

TEST_CASE("asymmetric family rejects offsets that break dominance") {
  auto fd = [](double t) { return 2.0 * (1.0 - t); };
  // Anchoring the correct-score at f(0) = 0 gives offset 3/4, which leaves
  // correct <= wrong below p = 1/8 and must be rejected.
  CHECK_THROWS_AS(build_asymmetric_family(fd, 0.75, 1025), ValidationError);
  CHECK_THROWS_AS(build_asymmetric_family(fd, 0.0, 1025), ValidationError);
  auto neg = [](double) { return -1.0; };
  CHECK_THROWS_AS(build_asymmetric_family(neg, 5.0, 1025), ValidationError);
}

TEST_CASE("randomized family members are proper (C1 on a 501 grid)") {
  Rng rng(7151);
  for (int rep = 0; rep < 20; ++rep) {
    auto m = random_symmetric_weight(rng);
    auto rule = build_symmetric_family({m, "random"}, 1025);
    auto report = check_c1(rule, 501);
    CAPTURE(rep);
    CHECK(report.pass);
    for (int i = 1; i < 40; ++i) {
      double q = i / 40.0;
      CHECK(std::abs(rule.wrong_score(q) - rule.correct_score(1.0 - q)) < 1e-10);
    }
  }
  for (int rep = 0; rep < 20; ++rep) {
    auto fd = random_positive_deriv(rng);
    auto rule = build_asymmetric_family(fd, 2.5 + rng.uniform(), 1025);
    auto report = check_c1(rule, 501);
    CAPTURE(rep);
    CHECK(report.pass);
  }
}

TEST_CASE("multichoice log score") {
  std::vector<double> uniform{0.25, 0.25, 0.25, 0.25};
  CHECK(multichoice_log_score(uniform, 2) == doctest::Approx(std::log(0.25)));
  std::vector<double> point{1.0, 0.0, 0.0};
  CHECK(multichoice_log_score(point, 0) == doctest::Approx(0.0));
  CHECK(is_neg_inf(multichoice_log_score(point, 1)));
  std::vector<double> bad{0.5, 0.4};
  CHECK_THROWS_AS(multichoice_log_score(bad, 0), ValidationError);
  std::vector<double> negative{1.2, -0.2, 0.0};
  CHECK_THROWS_AS(multichoice_log_score(negative, 0), ValidationError);
}

TEST_CASE("multichoice expected score is maximised at the truth on a simplex lattice") {
  // Brute-force oracle: evaluate sum_k p_k log q_k over the step-0.05 lattice.
  auto lattice_argmax = [](const std::vector<double>& p) {
    std::vector<double> best_q;
    double best = kNegInf;
    for (int i = 0; i <= 20; ++i)
      for (int j = 0; j + i <= 20; ++j) {
        int k = 20 - i - j;
        std::vector<double> q{i / 20.0, j / 20.0, k / 20.0};
        double v = 0.0;
        for (int d = 0; d < 3; ++d)
          v += q[d] > 0.0 ? p[d] * std::log(q[d]) : (p[d] > 0.0 ? kNegInf : 0.0);
        if (v > best) {
          best = v;
          best_q = q;
        }
      }
    return best_q;
  };
  // Truth on the lattice: the maximiser is the truth itself.
  std::vector<double> p1{0.30, 0.45, 0.25};
  auto q1 = lattice_argmax(p1);
  CHECK(q1[0] == doctest::Approx(0.30));
  CHECK(q1[1] == doctest::Approx(0.45));
  CHECK(q1[2] == doctest::Approx(0.25));
  // Truth off the lattice: the maximiser is the nearest lattice point.
  std::vector<double> p2{0.32, 0.44, 0.24};
  auto q2 = lattice_argmax(p2);
  CHECK(q2[0] == doctest::Approx(0.30));
  CHECK(q2[1] == doctest::Approx(0.45));
  CHECK(q2[2] == doctest::Approx(0.25));
}

TEST_CASE("sabotage threshold comes from the payoff comparison, not a constant") {
  auto report = sabotage_threshold(100001);
  CHECK(report.sabotage_payoff == doctest::Approx(0.0));
  CHECK(expected_score(combined_rule(), 0.5, 0.5) == doctest::Approx(0.0).epsilon(1e-12));

  // Independent coarse oracle on a 1001 grid.
  auto rule = combined_rule();
  double oracle = 0.0;
  for (int i = 999; i >= 1; --i) {
    double p = i / 1000.0;
    double truthful = p * rule.correct_score(p) + (1.0 - p) * rule.wrong_score(p);
    if (0.0 > truthful) {
      oracle = p;
      break;
    }
  }
  CHECK(std::abs(report.computed_threshold - oracle) <= 1e-3 + 1e-12);
  // The computed crossover sits just below 1/2; the quoted 0.2 is elsewhere.
  CHECK(report.computed_threshold > 0.45);
  CHECK(report.discrepancy > 0.25);
}

TEST_CASE("surface stores raw values including divergences") {
  auto s = make_surface(log_rule(), 11);
  CHECK(s.resolution == 11);
  CHECK(s.h.size() == 121);
  CHECK(is_neg_inf(s.h[5 * 11 + 0]));                 // p=0.5, q=0
  CHECK(s.h[5 * 11 + 5] == doctest::Approx(0.0));     // p=q=0.5
  CHECK(s.h[10 * 11 + 10] == doctest::Approx(1.0));   // p=q=1
}
