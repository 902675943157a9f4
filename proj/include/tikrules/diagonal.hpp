#pragma once

#include "tikrules/core.hpp"
#include "tikrules/solve.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace tikrules {

struct AlphaGrid;  // rules.hpp

// Polynomially decaying synthetic instance: lambda_i = c_A / i^beta,
// x_dagger_i = c_x s_i / i^nu, noise direction s'_i / i^kappa.
struct DiagonalModel {
  int n = 20;
  double beta = 4.0;
  double nu = 2.0;
  double kappa = 1.0;
  double c_A = 1.0;
  double c_x = 1.0;
  std::vector<int> s;        // +-1, defaults to all +1
  std::vector<int> s_prime;  // +-1, defaults to all +1
  double q = 1.5;

  Vector eigenvalues() const;
  Vector x_dagger() const;
  Vector y_exact() const;
  Vector noise(double delta) const;  // delta * s'_i / i^kappa, unnormalized

  static std::vector<int> random_signs(int n, std::uint64_t seed);
};

// Componentwise closed-form Tikhonov solution for a diagonal operator with
// the (1/q)||.||_q^q penalty: x_i = h^{-1}_{q, alpha/lambda_i^2}(y_i/lambda_i).
Solution diag_solve(const Vector& lambda, const Vector& y, double q, double alpha);

// Second Bregman iterate in closed form: shift the data by the first
// residual componentwise.
Solution diag_second(const Vector& lambda, const Vector& y, double q, double alpha);

// Residual via the eta-scaled conjugate-exponent identity
// p = lambda eta h^{-1}_{q*}(y/(lambda eta)), eta = (alpha/lambda^2)^{1/(2-q)}.
// Cross-check path only; undefined at q = 2.
double diag_residual_scaled(double lambda, double eta, double q_star, double y);

// Extremes of k(z) = (1 - |z|^{q*-1} sgn z)/(1 - z) on [-1, 1] for the
// conjugate exponent q* = q/(q-1); removable singularity at z = 1 takes the
// limit q* - 1. d_up = min k, d_lo = max k.
struct LemmaConstants {
  double q_star = 2.0;
  double d_lo = 1.0;
  double d_up = 1.0;
};
LemmaConstants lemma_constants(double q);

enum class ConditionKind {
  AutoregHD,
  AutoregHR,
  AutoregSQO,
  AutoregRQO,
  MuckHD,
  MuckHR,
  MuckSQO,
  RateHD,
  RateHR,
  RateSQO,
};

const char* condition_name(ConditionKind c);

struct ConditionEntry {
  double alpha = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

// Numerical evaluation of one inequality family over an alpha grid. The
// evaluator never decides pass/fail: it reports the per-alpha sides, the
// smallest constant making lhs <= C rhs everywhere (infinite when some rhs
// vanishes under a positive lhs), and, for the rate conditions, the infimum
// of the reported quantity.
struct ConditionReport {
  ConditionKind condition = ConditionKind::AutoregHD;
  std::vector<ConditionEntry> per_alpha;
  double min_feasible_C = 0.0;
  double inf_lhs = 0.0;
  int negativity_flags = 0;  // entries where a theoretically nonnegative side dipped below -1e-10

  bool holds_with(double C) const;
};

// One Muckenhoupt-type inequality sample: weighted noise energy above the
// spectral cut against plain (HD/HR) or reweighted (SQO) energy below it.
ConditionEntry muckenhoupt_check(const DiagonalModel& m, double alpha, double delta,
                                 double C1, ConditionKind variant,
                                 std::optional<double> C3 = std::nullopt);

ConditionReport muckenhoupt_report(const DiagonalModel& m, const AlphaGrid& grid,
                                   double delta, double C1, ConditionKind variant,
                                   std::optional<double> C3 = std::nullopt);

// Auto-regularisation condition: data-propagation Bregman distance against
// the rule-specific residual expression, evaluated per alpha. Needs exact
// data (synthetic problems) and a power_lq penalty.
ConditionReport autoreg_check(const Problem& prob, const AlphaGrid& grid,
                              ConditionKind variant);

struct NonnegativityReport {
  double min_hr = 0.0;    // min of (delta p^II)(delta p)
  double min_sqo = 0.0;   // min of (delta p - delta p^II)(delta p^II)
  long violations_hr = 0;
  long violations_sqo = 0;
  int samples = 0;
};

// Random scalar sweep of the two product lemmas; violations are expected to
// be absent for q >= 3/2 and are merely recorded below.
NonnegativityReport nonnegativity_probe(double q, int samples, std::uint64_t seed);

// psi_HD/alpha, <p^II,p>/alpha^2 and <p - p^II, p^II>/alpha^2 per alpha, with
// the grid infimum of each (the rate-condition constants, when positive).
std::array<ConditionReport, 3> rate_condition_probe(const Problem& prob,
                                                    const AlphaGrid& grid);

enum class RegimeStatus { Satisfied, Violated, NotCovered };
enum class Rule { HD, HR, SQO, RQO };

struct RegimeReport {
  RegimeStatus status = RegimeStatus::Satisfied;
  double kappa_threshold = 0.0;
  bool decay_condition_ok = true;  // beta q + kappa (2-q) > 0, binding for q > 2
  bool assumptions_met = true;     // nu > beta
  std::string message;
};

// Polynomial-decay regime thresholds: kappa <= beta + 1/q for q < 2;
// kappa <= (q/2) beta + ((2-q)/q) nu + 1/2 together with
// beta q + kappa (2-q) > 0 for q > 2 (both formulas coincide at q = 2).
// The analysis covers HR/SQO only for q >= 3/2.
RegimeReport regime_classify(double beta, double nu, double kappa, double q,
                             Rule rule = Rule::HD);

// Dispatch used by the sweep drivers: closed form on diagonal + power_lq,
// FISTA otherwise.
Solution solve_tikhonov_auto(const LinearOperator& A, const Vector& y_used, double alpha,
                             const RegularizerSpec& reg, const SolveOptions& opts = {});
Solution solve_second_auto(const LinearOperator& A, const Vector& y_delta, double alpha,
                           const RegularizerSpec& reg, const Solution& first,
                           const SolveOptions& opts = {});

}  // namespace tikrules
