#pragma once

#include "tikrules/core.hpp"
#include "tikrules/diagonal.hpp"
#include "tikrules/solve.hpp"

#include <array>
#include <vector>

namespace tikrules {

// Log-equispaced inclusive grid of regularization parameters.
struct AlphaGrid {
  std::vector<double> alphas;
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  int points_per_decade = 20;

  std::size_t size() const { return alphas.size(); }
  // multiplicative spacing between adjacent grid points
  double step_ratio() const;
};

// Defaults: alpha_max = ||A||^2, alpha_min = smallest eigenvalue of A*A.
AlphaGrid build_grid(const LinearOperator& A, int points_per_decade = 20,
                     std::optional<double> alpha_min_override = std::nullopt,
                     std::optional<double> alpha_max_override = std::nullopt);

constexpr std::array<Rule, 4> kAllRules{Rule::HD, Rule::HR, Rule::SQO, Rule::RQO};
const char* rule_name(Rule r);
Rule rule_from_name(const std::string& name);

// ||p||^2 / alpha
double psi_hd(double alpha, const Vector& p);
// <p_II, p> / alpha
double psi_hr(double alpha, const Vector& p, const Vector& p_II);
// <p - p_II, p_II> / alpha
double psi_sqo(double alpha, const Vector& p, const Vector& p_II);
// R(x_II) - R(x) + <p, p_II - p>/alpha
double psi_rqo(double alpha, const RegularizerSpec& reg, const Vector& x,
               const Vector& x_II, const Vector& p, const Vector& p_II);

// R(x1) - R(x2) - <xi2, x1 - x2>; xi2 is validated against the analytic
// subgradient for power penalties.
double bregman_distance(const RegularizerSpec& reg, const Vector& x1, const Vector& x2,
                        const Vector& xi2);
// <xi1 - xi2, x1 - x2>
double sym_bregman_distance(const Vector& x1, const Vector& x2, const Vector& xi1,
                            const Vector& xi2);

// Interior global minimum: both grid endpoints excluded, ties broken toward
// the smaller alpha, non-finite values skipped.
double select_alpha(const std::vector<double>& psi, const AlphaGrid& grid);

enum class SweepMode { WarmStart, ColdStart };

struct RuleCurve {
  AlphaGrid grid;
  std::array<std::vector<double>, 4> psi;  // indexed by static_cast<int>(Rule)
  std::array<double, 4> alpha_star{};
  std::vector<Solution> primal;
  std::vector<Solution> second;

  const std::vector<double>& psi_of(Rule r) const { return psi[static_cast<int>(r)]; }
  double alpha_star_of(Rule r) const { return alpha_star[static_cast<int>(r)]; }
};

// Full sweep: per alpha one Tikhonov solve and one Bregman solve, all four
// functionals from the stored residuals, then the per-rule minimizers.
// WarmStart chains iterative solves along the grid; ColdStart is independent
// per point and runs grid points concurrently.
RuleCurve rule_curve(const Problem& prob, const AlphaGrid& grid,
                     const SolveOptions& opts = {}, SweepMode mode = SweepMode::WarmStart);

}  // namespace tikrules
