#pragma once

#include "tikrules/core.hpp"

#include <optional>

namespace tikrules {

struct SolveOptions {
  int max_iters = 5000;
  double tol = 1e-10;                // relative iterate change
  std::optional<double> step;        // defaults to 1/||A||^2
  std::optional<Vector> x0;          // warm start
};

// One regularized solution. p is the residual against the data this solution
// is reported for (y_used for a plain solve, y_delta for a Bregman iterate);
// xi is always derived from the residual of the inner solve, so it is a valid
// subgradient even for l1/TV.
struct Solution {
  Vector x;
  Vector p;
  std::optional<Vector> xi;
  double alpha = 0.0;
  double objective = 0.0;
  int iters = 0;
  bool converged = true;
};

// argmin 1/2||Ax - y_used||^2 + alpha R(x) by proximal gradient with FISTA
// momentum and gradient-based adaptive restart, fixed step 1/||A||^2.
Solution fista_tikhonov(const LinearOperator& A, const Vector& y_used, double alpha,
                        const RegularizerSpec& reg, const SolveOptions& opts = {});

// Second Bregman iterate, realized as a Tikhonov solve with data shifted by
// the first residual: argmin 1/2||Ax - (y_delta + first.p)||^2 + alpha R(x).
// The returned residual is y_delta - A x (not the shifted one); xi is the
// subgradient A*(y_delta + first.p - A x)/alpha.
Solution bregman_second(const LinearOperator& A, const Vector& y_delta, double alpha,
                        const RegularizerSpec& reg, const Solution& first,
                        const SolveOptions& opts = {});

// A*p / alpha
Vector subgradient_from_residual(const LinearOperator& A, const Vector& p, double alpha);

double tikhonov_objective(const LinearOperator& A, const Vector& y_used, double alpha,
                          const RegularizerSpec& reg, const Vector& x);

}  // namespace tikrules
