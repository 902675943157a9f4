#include "tikrules/solve.hpp"

#include "tikrules/prox.hpp"

#include <cmath>

namespace tikrules {

namespace {

Vector apply_prox(const RegularizerSpec& reg, double gamma, const Vector& v) {
  switch (reg.kind) {
    case RegKind::PowerLq: return lq_prox(reg.q, gamma, v);
    case RegKind::L1: return soft_threshold(gamma, v);
    case RegKind::Tv1d: return tv1d_prox(gamma, v);
  }
  return v;
}

}  // namespace

double tikhonov_objective(const LinearOperator& A, const Vector& y_used, double alpha,
                          const RegularizerSpec& reg, const Vector& x) {
  return 0.5 * (A.apply(x) - y_used).squaredNorm() + alpha * reg_value(reg, x);
}

Solution fista_tikhonov(const LinearOperator& A, const Vector& y_used, double alpha,
                        const RegularizerSpec& reg, const SolveOptions& opts) {
  if (!(alpha > 0.0)) throw std::invalid_argument("fista_tikhonov: alpha must be positive");
  if (y_used.size() != A.rows())
    throw std::invalid_argument("fista_tikhonov: data dimension mismatch");
  if (!y_used.allFinite()) throw NumericalError("fista_tikhonov: non-finite data");

  const double nrm = A.norm();
  const double step = opts.step.value_or(nrm > 0.0 ? 1.0 / (nrm * nrm) : 1.0);
  const double gamma = alpha * step;

  Vector x = opts.x0.value_or(Vector::Zero(A.cols()));
  if (x.size() != A.cols())
    throw std::invalid_argument("fista_tikhonov: warm start dimension mismatch");
  Vector z = x;
  double t = 1.0;

  Solution sol;
  sol.alpha = alpha;
  sol.converged = false;
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    const Vector grad = A.adjoint_apply(A.apply(z) - y_used);
    const Vector x_next = apply_prox(reg, gamma, z - step * grad);
    if (!x_next.allFinite()) throw NumericalError("fista_tikhonov: iterates diverged");
    const Vector diff = x_next - x;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    // adaptive restart when the momentum direction opposes progress
    if ((z - x_next).dot(diff) > 0.0) {
      z = x_next;
      t = 1.0;
    } else {
      z = x_next + ((t - 1.0) / t_next) * diff;
      t = t_next;
    }
    const double change = diff.norm() / (1.0 + x.norm());
    x = x_next;
    if (change <= opts.tol) {
      sol.converged = true;
      ++it;
      break;
    }
  }
  sol.iters = it;
  sol.x = x;
  sol.p = y_used - A.apply(x);
  sol.xi = A.adjoint_apply(sol.p) / alpha;
  sol.objective = tikhonov_objective(A, y_used, alpha, reg, x);
  return sol;
}

Solution bregman_second(const LinearOperator& A, const Vector& y_delta, double alpha,
                        const RegularizerSpec& reg, const Solution& first,
                        const SolveOptions& opts) {
  if (first.p.size() != y_delta.size())
    throw std::invalid_argument("bregman_second: first solution does not match data");
  const Vector y_shift = y_delta + first.p;
  SolveOptions o = opts;
  if (!o.x0) o.x0 = first.x;
  Solution inner = fista_tikhonov(A, y_shift, alpha, reg, o);
  Solution out = inner;
  out.p = y_delta - A.apply(inner.x);           // residual against the unshifted data
  out.xi = A.adjoint_apply(inner.p) / alpha;    // subgradient from the shifted solve
  return out;
}

Vector subgradient_from_residual(const LinearOperator& A, const Vector& p, double alpha) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("subgradient_from_residual: alpha must be positive");
  return A.adjoint_apply(p) / alpha;
}

}  // namespace tikrules
