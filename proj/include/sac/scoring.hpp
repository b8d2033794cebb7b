#pragma once
// Confidence self-assessment scoring rules.
//
// A rule is a pair of score functions over the reported confidence q in [0,1]:
// one applied when the answer is correct, one when it is wrong. Expected score
// under true accuracy p is h(p,q) = p*correct(q) + (1-p)*wrong(q). A rule is
// "proper" when h(p,.) peaks exactly at q = p (condition C1 below); the
// truthful payoff p -> h(p,p) being strictly increasing is condition C2.

#include <functional>
#include <string>
#include <vector>

#include "sac/common.hpp"

namespace sac::scoring {

struct ScoringRule {
  std::string name;
  std::function<double(double)> correct_score;  // score for a right answer
  std::function<double(double)> wrong_score;    // score for a wrong answer
  std::string domain_note;
  bool symmetric = false;  // wrong_score(q) == correct_score(1-q)
};

// Symmetric weight m: must satisfy m(x) = m(1-x) > 0 on (0,1).
struct SymmetricWeight {
  std::function<double(double)> weight;
  std::string description;
};

struct CheckReport {
  bool pass = true;
  std::vector<double> failing;  // grid points where the condition broke
  std::string detail;
};

struct SabotageReport {
  double computed_threshold = 0.0;  // largest grid p where sabotage pays
  double quoted_threshold = 0.2;    // commonly quoted crossover for this rule
  double sabotage_payoff = 0.0;     // deliberate wrong answer, report q = 0
  double discrepancy = 0.0;
  double max_advantage_p = 0.0;     // grid p where sabotage gains the most
};

// h(p,q) over a resolution x resolution lattice on [0,1]^2, stored unclipped.
struct ExpectedScoreSurface {
  std::string rule_name;
  int resolution = 0;
  std::vector<double> accuracy;    // lattice p values
  std::vector<double> confidence;  // lattice q values
  std::vector<double> h;           // row-major: h[ip * resolution + iq]
};

// The original +-q rule: q for a right answer, -q for a wrong one.
double foster_score(double q, bool correct);

ScoringRule foster_rule();
ScoringRule log_rule();
ScoringRule quadratic_rule();
ScoringRule asymmetric_rule();
ScoringRule scaled_asymmetric_rule();
ScoringRule combined_rule();

ScoringRule rule_by_name(const std::string& name);
std::vector<std::string> rule_names();

// p*correct(q) + (1-p)*wrong(q). A divergent branch with weight zero
// contributes nothing; with positive weight it forces -inf.
double expected_score(const ScoringRule& rule, double p, double q);

// Grid argmax of q -> h(p,q) over grid_size equally spaced points in [0,1].
// Divergent endpoints lose automatically; ties break toward the smallest q.
double optimal_report(const ScoringRule& rule, double p, int grid_size);

// Family of symmetric rules: correct(q) = integral from 1/2 to q of m(t)/t dt,
// wrong(q) = correct(1-q). Validates symmetry/positivity of m and self-checks
// C1 on (0,1) and C2 on (1/2,1).
ScoringRule build_symmetric_family(const SymmetricWeight& m, int quad_points = 4097);

// Family of asymmetric pairs: correct(q) = offset + integral of f_deriv from
// 1/2, wrong(q) = -integral of t/(1-t)*f_deriv(t). Rejects nonpositive
// f_deriv and any grid point where correct <= wrong.
ScoringRule build_asymmetric_family(const std::function<double(double)>& f_deriv,
                                    double offset, int quad_points = 4097);

// C1: for every p on an interior grid, h(p,.) restricted to the grid has a
// single strict local maximum, located within one grid step of q = p.
CheckReport check_c1(const ScoringRule& rule, int grid_size, double tolerance = 1e-9);

// C2: p -> h(p,p) strictly increasing across an interior grid over (j_lower, 1).
CheckReport check_c2(const ScoringRule& rule, double j_lower, int grid_size);

// Natural-log score for a full probability vector over finitely many choices.
double multichoice_log_score(std::span<const double> probs, int correct_index,
                             double sum_tolerance = 1e-9);

// Brute-force crossover where deliberately answering wrong (and reporting
// q = 0) beats the truthful payoff h(p,p) under the combined rule.
SabotageReport sabotage_threshold(int grid_size = 100001);

ExpectedScoreSurface make_surface(const ScoringRule& rule, int resolution);

}  // namespace sac::scoring
