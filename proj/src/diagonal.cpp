#include "tikrules/diagonal.hpp"

#include "tikrules/prox.hpp"
#include "tikrules/rules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace tikrules {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Vector DiagonalModel::eigenvalues() const {
  Vector l(n);
  for (int i = 0; i < n; ++i) l[i] = c_A / std::pow(double(i + 1), beta);
  return l;
}

Vector DiagonalModel::x_dagger() const {
  Vector x(n);
  for (int i = 0; i < n; ++i) {
    const double si = s.empty() ? 1.0 : double(s[i]);
    x[i] = c_x * si / std::pow(double(i + 1), nu);
  }
  return x;
}

Vector DiagonalModel::y_exact() const { return eigenvalues().cwiseProduct(x_dagger()); }

Vector DiagonalModel::noise(double delta) const {
  Vector e(n);
  for (int i = 0; i < n; ++i) {
    const double si = s_prime.empty() ? 1.0 : double(s_prime[i]);
    e[i] = delta * si / std::pow(double(i + 1), kappa);
  }
  return e;
}

std::vector<int> DiagonalModel::random_signs(int n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::vector<int> s(n);
  for (int i = 0; i < n; ++i) s[i] = (eng() & 1ull) ? 1 : -1;
  return s;
}

Solution diag_solve(const Vector& lambda, const Vector& y, double q, double alpha) {
  if (lambda.size() != y.size())
    throw std::invalid_argument("diag_solve: dimension mismatch");
  if (!(alpha > 0.0)) throw std::invalid_argument("diag_solve: alpha must be positive");
  const Eigen::Index n = lambda.size();
  Solution sol;
  sol.alpha = alpha;
  sol.x.resize(n);
  sol.p.resize(n);
  Vector xi(n);
  double fit = 0.0, reg = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double li = lambda[i];
    const double gamma = alpha / (li * li);
    const double xv = h_q_invert(q, gamma, y[i] / li);
    const double sub = std::pow(std::abs(xv), q - 1.0) * sgn(xv);
    sol.x[i] = xv;
    // residual via the optimality identity y - lambda x = lambda gamma |x|^{q-1} sgn x;
    // the subtraction form cancels catastrophically for tiny gamma
    sol.p[i] = li * gamma * sub;
    xi[i] = sub;
    fit += sol.p[i] * sol.p[i];
    reg += std::pow(std::abs(xv), q);
  }
  sol.xi = std::move(xi);
  sol.objective = 0.5 * fit + alpha * reg / q;
  sol.iters = 0;
  sol.converged = true;
  return sol;
}

Solution diag_second(const Vector& lambda, const Vector& y, double q, double alpha) {
  Solution first = diag_solve(lambda, y, q, alpha);
  const Eigen::Index n = lambda.size();
  Solution sol;
  sol.alpha = alpha;
  sol.x.resize(n);
  sol.p.resize(n);
  Vector xi(n);
  double fit = 0.0, reg = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double li = lambda[i];
    const double gamma = alpha / (li * li);
    const double xv = h_q_invert(q, gamma, (y[i] + first.p[i]) / li);
    const double sub = std::pow(std::abs(xv), q - 1.0) * sgn(xv);
    const double p_shift = li * gamma * sub;  // (y + p) - lambda x_II
    sol.x[i] = xv;
    sol.p[i] = p_shift - first.p[i];
    xi[i] = sub;
    fit += p_shift * p_shift;
    reg += std::pow(std::abs(xv), q);
  }
  sol.xi = std::move(xi);
  sol.objective = 0.5 * fit + alpha * reg / q;
  sol.iters = 0;
  sol.converged = true;
  return sol;
}

double diag_residual_scaled(double lambda, double eta, double q_star, double y) {
  if (q_star == 2.0)
    throw std::invalid_argument("diag_residual_scaled: q = 2 has no eta scaling; use unscaled path");
  const double le = lambda * eta;
  return le * h_q_invert(q_star, 1.0, y / le);
}

namespace {

double lemma_k(double e, double z) {
  if (z >= 1.0) return e;  // removable singularity, limit q* - 1
  return (1.0 - std::pow(std::abs(z), e) * sgn(z)) / (1.0 - z);
}

// golden-section refinement of an extremum bracketed on [a, b]
template <typename F>
double golden(F f, double a, double b, bool maximize) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  for (int it = 0; it < 200 && (b - a) > 1e-14; ++it) {
    const double fc = maximize ? -f(c) : f(c);
    const double fd = maximize ? -f(d) : f(d);
    if (fc < fd) b = d; else a = c;
    c = b - gr * (b - a);
    d = a + gr * (b - a);
  }
  return f(0.5 * (a + b));
}

}  // namespace

LemmaConstants lemma_constants(double q) {
  if (!(q > 1.0)) throw std::invalid_argument("lemma_constants requires q > 1");
  const double q_star = q / (q - 1.0);
  if (q == 2.0) return {q_star, 1.0, 1.0};  // k is identically 1
  const double e = q_star - 1.0;
  auto k = [e](double z) { return lemma_k(e, z); };

  const double h = 1e-5;
  const int m = int(2.0 / h);
  double best_min = kInf, best_max = -kInf;
  double zmin = -1.0, zmax = -1.0;
  for (int i = 0; i <= m; ++i) {
    const double z = -1.0 + 2.0 * double(i) / double(m);
    const double v = k(z);
    if (v < best_min) { best_min = v; zmin = z; }
    if (v > best_max) { best_max = v; zmax = z; }
  }
  const double d_up = std::min(best_min, golden(k, std::max(-1.0, zmin - h), std::min(1.0, zmin + h), false));
  const double d_lo = std::max(best_max, golden(k, std::max(-1.0, zmax - h), std::min(1.0, zmax + h), true));
  return {q_star, d_lo, d_up};
}

bool ConditionReport::holds_with(double C) const {
  for (const auto& e : per_alpha)
    if (e.lhs > C * e.rhs + 1e-12) return false;
  return true;
}

const char* condition_name(ConditionKind c) {
  switch (c) {
    case ConditionKind::AutoregHD: return "AUTOREG_HD";
    case ConditionKind::AutoregHR: return "AUTOREG_HR";
    case ConditionKind::AutoregSQO: return "AUTOREG_SQO";
    case ConditionKind::AutoregRQO: return "AUTOREG_RQO";
    case ConditionKind::MuckHD: return "MUCK_HD";
    case ConditionKind::MuckHR: return "MUCK_HR";
    case ConditionKind::MuckSQO: return "MUCK_SQO";
    case ConditionKind::RateHD: return "RATE_HD";
    case ConditionKind::RateHR: return "RATE_HR";
    case ConditionKind::RateSQO: return "RATE_SQO";
  }
  return "?";
}

namespace {

void finish_report(ConditionReport& rep) {
  double maxratio = 0.0;
  double inf_lhs = kInf;
  for (const auto& e : rep.per_alpha) {
    inf_lhs = std::min(inf_lhs, e.lhs);
    if (e.lhs < -1e-10 || e.rhs < -1e-10) ++rep.negativity_flags;
    if (e.lhs <= 0.0) continue;
    if (e.rhs <= 0.0) { maxratio = kInf; continue; }
    maxratio = std::max(maxratio, e.lhs / e.rhs);
  }
  rep.min_feasible_C = rep.per_alpha.empty() ? 0.0 : maxratio;
  rep.inf_lhs = rep.per_alpha.empty() ? 0.0 : inf_lhs;
}

}  // namespace

ConditionEntry muckenhoupt_check(const DiagonalModel& m, double alpha, double delta,
                                 double C1, ConditionKind variant,
                                 std::optional<double> C3) {
  if (!(C1 > 0.0)) throw std::invalid_argument("muckenhoupt_check: C1 must be positive");
  if (variant != ConditionKind::MuckHD && variant != ConditionKind::MuckHR &&
      variant != ConditionKind::MuckSQO)
    throw std::invalid_argument("muckenhoupt_check: not a Muckenhoupt variant");
  const bool sqo = variant == ConditionKind::MuckSQO;
  if (sqo && !C3) throw std::invalid_argument("muckenhoupt_check: SQO needs C3");

  const Vector lambda = m.eigenvalues();
  const Vector y = m.y_exact();
  const Vector dy = m.noise(delta);
  const double q = m.q;

  double lhs = 0.0, rhs = 0.0;
  for (int i = 0; i < m.n; ++i) {
    const double mx = std::max(std::abs(y[i]), std::abs(y[i] + dy[i]));
    const double lam_q = std::pow(lambda[i], q);
    const double w = lam_q * std::pow(mx, 2.0 - q) / alpha;  // spectral weight
    const double dy2 = dy[i] * dy[i];

    bool in_I2 = true;
    if (sqo) {
      const double gamma = alpha / (lambda[i] * lambda[i]);
      const double pd = (y[i] + dy[i]) - lambda[i] * h_q_invert(q, gamma, (y[i] + dy[i]) / lambda[i]);
      const double pe = y[i] - lambda[i] * h_q_invert(q, gamma, y[i] / lambda[i]);
      const double pd2 = (y[i] + dy[i]) - lambda[i] * h_q_invert(q, gamma, (y[i] + dy[i] + pd) / lambda[i]);
      const double pe2 = y[i] - lambda[i] * h_q_invert(q, gamma, (y[i] + pe) / lambda[i]);
      const double dp = pd - pe;
      const double dpII = pd2 - pe2;
      in_I2 = std::abs(dp - dy[i]) <= *C3 * std::abs(dp - dpII);
    }

    if (w >= C1) {
      lhs += dy2 * std::pow(mx, q - 2.0) * alpha / lam_q;
    }
    if (sqo && w <= C1 && !in_I2) {
      lhs += dy2;
    }
    if (w < C1) {
      if (sqo) {
        if (in_I2) rhs += std::pow(w, 1.0 / (q - 1.0)) * dy2;
      } else {
        rhs += dy2;
      }
    }
  }
  return {alpha, lhs, rhs};
}

ConditionReport muckenhoupt_report(const DiagonalModel& m, const AlphaGrid& grid,
                                   double delta, double C1, ConditionKind variant,
                                   std::optional<double> C3) {
  ConditionReport rep;
  rep.condition = variant;
  rep.per_alpha.reserve(grid.size());
  for (double a : grid.alphas)
    rep.per_alpha.push_back(muckenhoupt_check(m, a, delta, C1, variant, C3));
  finish_report(rep);
  return rep;
}

ConditionReport autoreg_check(const Problem& prob, const AlphaGrid& grid,
                              ConditionKind variant) {
  if (variant != ConditionKind::AutoregHD && variant != ConditionKind::AutoregHR &&
      variant != ConditionKind::AutoregSQO && variant != ConditionKind::AutoregRQO)
    throw std::invalid_argument("autoreg_check: not an auto-regularisation variant");
  if (prob.reg.kind != RegKind::PowerLq)
    throw std::invalid_argument("autoreg_check requires power_lq");

  ConditionReport rep;
  rep.condition = variant;
  rep.per_alpha.reserve(grid.size());
  SolveOptions opts;
  opts.tol = 1e-12;
  opts.max_iters = 20000;
  for (double a : grid.alphas) {
    const Solution se = solve_tikhonov_auto(prob.A, prob.y, a, prob.reg, opts);
    const Solution sd = solve_tikhonov_auto(prob.A, prob.y_delta, a, prob.reg, opts);
    const Solution se2 = solve_second_auto(prob.A, prob.y, a, prob.reg, se, opts);
    const Solution sd2 = solve_second_auto(prob.A, prob.y_delta, a, prob.reg, sd, opts);

    const double lhs = bregman_distance(prob.reg, sd.x, se.x, *se.xi);
    const Vector dp = sd.p - se.p;
    const Vector dpII = sd2.p - se2.p;
    double rhs = 0.0;
    switch (variant) {
      case ConditionKind::AutoregHD: rhs = dp.squaredNorm() / a; break;
      case ConditionKind::AutoregHR: rhs = dpII.dot(dp) / a; break;
      case ConditionKind::AutoregSQO: rhs = (dp - dpII).dot(dpII) / a; break;
      case ConditionKind::AutoregRQO:
        rhs = psi_rqo(a, prob.reg, sd.x, sd2.x, sd.p, sd2.p) + a;
        break;
      default: break;
    }
    rep.per_alpha.push_back({a, lhs, rhs});
  }
  finish_report(rep);
  return rep;
}

NonnegativityReport nonnegativity_probe(double q, int samples, std::uint64_t seed) {
  if (!(q > 1.0)) throw std::invalid_argument("nonnegativity_probe requires q > 1");
  std::mt19937_64 eng(seed);
  auto unif = [&eng](double a, double b) {
    return a + (b - a) * (double(eng() >> 11) * 0x1.0p-53);
  };
  NonnegativityReport rep;
  rep.samples = samples;
  rep.min_hr = kInf;
  rep.min_sqo = kInf;
  for (int it = 0; it < samples; ++it) {
    const double lam = std::exp(unif(std::log(1e-2), std::log(1e1)));
    const double alpha = std::exp(unif(std::log(1e-6), std::log(1e2)));
    const double ye = unif(-10.0, 10.0);
    const double yd = unif(-10.0, 10.0);
    const double gamma = alpha / (lam * lam);

    const double pe = ye - lam * h_q_invert(q, gamma, ye / lam);
    const double pd = yd - lam * h_q_invert(q, gamma, yd / lam);
    const double pe2 = ye - lam * h_q_invert(q, gamma, (ye + pe) / lam);
    const double pd2 = yd - lam * h_q_invert(q, gamma, (yd + pd) / lam);

    const double dp = pd - pe;
    const double dpII = pd2 - pe2;
    const double prod_hr = dpII * dp;
    const double prod_sqo = (dp - dpII) * dpII;
    rep.min_hr = std::min(rep.min_hr, prod_hr);
    rep.min_sqo = std::min(rep.min_sqo, prod_sqo);
    if (prod_hr < -1e-12) ++rep.violations_hr;
    if (prod_sqo < -1e-12) ++rep.violations_sqo;
  }
  return rep;
}

std::array<ConditionReport, 3> rate_condition_probe(const Problem& prob,
                                                    const AlphaGrid& grid) {
  if (prob.y_delta.norm() <= 0.0)
    throw std::invalid_argument("rate_condition_probe: zero data");
  std::array<ConditionReport, 3> reps;
  reps[0].condition = ConditionKind::RateHD;
  reps[1].condition = ConditionKind::RateHR;
  reps[2].condition = ConditionKind::RateSQO;
  SolveOptions opts;
  opts.tol = 1e-12;
  opts.max_iters = 20000;
  for (double a : grid.alphas) {
    const Solution s = solve_tikhonov_auto(prob.A, prob.y_delta, a, prob.reg, opts);
    const Solution s2 = solve_second_auto(prob.A, prob.y_delta, a, prob.reg, s, opts);
    const double a2 = a * a;
    reps[0].per_alpha.push_back({a, s.p.squaredNorm() / a2, 1.0});
    reps[1].per_alpha.push_back({a, s2.p.dot(s.p) / a2, 1.0});
    reps[2].per_alpha.push_back({a, (s.p - s2.p).dot(s2.p) / a2, 1.0});
  }
  for (auto& r : reps) finish_report(r);
  return reps;
}

RegimeReport regime_classify(double beta, double nu, double kappa, double q, Rule rule) {
  if (!(beta > 0.0) || !(kappa > 0.0) || !(q > 1.0))
    throw std::invalid_argument("regime_classify requires beta > 0, kappa > 0, q > 1");
  RegimeReport rep;
  rep.assumptions_met = nu > beta;
  if (!rep.assumptions_met)
    rep.message = "case-study assumptions not met (nu <= beta); thresholds evaluated anyway";

  if (q < 2.0) {
    rep.kappa_threshold = beta + 1.0 / q;
    rep.status = kappa <= rep.kappa_threshold ? RegimeStatus::Satisfied : RegimeStatus::Violated;
  } else {
    // at q = 2 this equals beta + 1/2, matching the q < 2 formula
    rep.kappa_threshold = 0.5 * q * beta + (2.0 - q) / q * nu + 0.5;
    rep.decay_condition_ok = beta * q + kappa * (2.0 - q) > 0.0;
    rep.status = (kappa <= rep.kappa_threshold && rep.decay_condition_ok)
                     ? RegimeStatus::Satisfied
                     : RegimeStatus::Violated;
  }
  if ((rule == Rule::HR || rule == Rule::SQO) && q < 1.5) {
    rep.status = RegimeStatus::NotCovered;
    rep.message = "analysis covers only the heuristic discrepancy rule for q < 3/2";
  }
  return rep;
}

Solution solve_tikhonov_auto(const LinearOperator& A, const Vector& y_used, double alpha,
                             const RegularizerSpec& reg, const SolveOptions& opts) {
  if (A.is_diagonal() && reg.kind == RegKind::PowerLq)
    return diag_solve(A.eigenvalues(), y_used, reg.q, alpha);
  return fista_tikhonov(A, y_used, alpha, reg, opts);
}

Solution solve_second_auto(const LinearOperator& A, const Vector& y_delta, double alpha,
                           const RegularizerSpec& reg, const Solution& first,
                           const SolveOptions& opts) {
  if (A.is_diagonal() && reg.kind == RegKind::PowerLq)
    return diag_second(A.eigenvalues(), y_delta, reg.q, alpha);
  return bregman_second(A, y_delta, alpha, reg, first, opts);
}

}  // namespace tikrules
