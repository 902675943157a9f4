#include "tikrules/rules.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace tikrules {

double AlphaGrid::step_ratio() const {
  if (alphas.size() < 2) return 1.0;
  return std::pow(alpha_max / alpha_min, 1.0 / double(alphas.size() - 1));
}

AlphaGrid build_grid(const LinearOperator& A, int points_per_decade,
                     std::optional<double> alpha_min_override,
                     std::optional<double> alpha_max_override) {
  if (points_per_decade < 1)
    throw std::invalid_argument("build_grid: points_per_decade must be >= 1");
  if ((alpha_min_override && *alpha_min_override <= 0.0) ||
      (alpha_max_override && *alpha_max_override <= 0.0))
    throw std::invalid_argument("build_grid: overrides must be positive");
  const double amax = alpha_max_override.value_or(A.norm() * A.norm());
  const double amin = alpha_min_override.value_or(A.sigma_min());
  if (!(amin > 0.0))
    throw std::invalid_argument("build_grid: alpha_min is not positive; supply an override");
  if (amin >= amax) throw std::invalid_argument("build_grid: alpha_min >= alpha_max");

  const double decades = std::log10(amax / amin);
  const std::size_t npts = std::max<std::size_t>(
      2, std::size_t(std::llround(std::ceil(decades * points_per_decade))) + 1);
  AlphaGrid g;
  g.alpha_min = amin;
  g.alpha_max = amax;
  g.points_per_decade = points_per_decade;
  g.alphas.resize(npts);
  for (std::size_t i = 0; i < npts; ++i)
    g.alphas[i] = amin * std::pow(amax / amin, double(i) / double(npts - 1));
  g.alphas.front() = amin;  // endpoints exact
  g.alphas.back() = amax;
  return g;
}

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::HD: return "HD";
    case Rule::HR: return "HR";
    case Rule::SQO: return "SQO";
    case Rule::RQO: return "RQO";
  }
  return "?";
}

Rule rule_from_name(const std::string& name) {
  if (name == "HD") return Rule::HD;
  if (name == "HR") return Rule::HR;
  if (name == "SQO") return Rule::SQO;
  if (name == "RQO") return Rule::RQO;
  throw ConfigError("unknown rule: " + name);
}

double psi_hd(double alpha, const Vector& p) {
  if (!(alpha > 0.0)) throw std::invalid_argument("psi_hd: alpha must be positive");
  return p.squaredNorm() / alpha;
}

double psi_hr(double alpha, const Vector& p, const Vector& p_II) {
  if (!(alpha > 0.0)) throw std::invalid_argument("psi_hr: alpha must be positive");
  if (p.size() != p_II.size()) throw std::invalid_argument("psi_hr: dimension mismatch");
  return p_II.dot(p) / alpha;
}

double psi_sqo(double alpha, const Vector& p, const Vector& p_II) {
  if (!(alpha > 0.0)) throw std::invalid_argument("psi_sqo: alpha must be positive");
  if (p.size() != p_II.size()) throw std::invalid_argument("psi_sqo: dimension mismatch");
  return (p - p_II).dot(p_II) / alpha;
}

double psi_rqo(double alpha, const RegularizerSpec& reg, const Vector& x,
               const Vector& x_II, const Vector& p, const Vector& p_II) {
  if (!(alpha > 0.0)) throw std::invalid_argument("psi_rqo: alpha must be positive");
  return reg_value(reg, x_II) - reg_value(reg, x) + p.dot(p_II - p) / alpha;
}

double bregman_distance(const RegularizerSpec& reg, const Vector& x1, const Vector& x2,
                        const Vector& xi2) {
  if (x1.size() != x2.size() || xi2.size() != x2.size())
    throw std::invalid_argument("bregman_distance: dimension mismatch");
  if (reg.kind == RegKind::PowerLq) {
    const Vector expect = reg_subgradient(reg, x2);
    for (Eigen::Index i = 0; i < x2.size(); ++i)
      if (std::abs(xi2[i] - expect[i]) > 1e-6 * (1.0 + std::abs(expect[i])))
        throw std::invalid_argument("bregman_distance: xi2 is not a subgradient at x2");
  }
  return reg_value(reg, x1) - reg_value(reg, x2) - xi2.dot(x1 - x2);
}

double sym_bregman_distance(const Vector& x1, const Vector& x2, const Vector& xi1,
                            const Vector& xi2) {
  if (x1.size() != x2.size() || xi1.size() != x1.size() || xi2.size() != x2.size())
    throw std::invalid_argument("sym_bregman_distance: dimension mismatch");
  return (xi1 - xi2).dot(x1 - x2);
}

double select_alpha(const std::vector<double>& psi, const AlphaGrid& grid) {
  if (psi.size() != grid.size())
    throw std::invalid_argument("select_alpha: curve/grid length mismatch");
  if (grid.size() < 3)
    throw std::invalid_argument("select_alpha: need at least 3 grid points");
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  bool found = false;
  for (std::size_t i = 1; i + 1 < psi.size(); ++i) {
    if (!std::isfinite(psi[i])) continue;
    if (!found || psi[i] < best) {  // strict: ties keep the smaller alpha
      best = psi[i];
      best_i = i;
      found = true;
    }
  }
  if (!found) throw NumericalError("select_alpha: no interior minimum");
  return grid.alphas[best_i];
}

namespace {

void compute_point(const Problem& prob, double a, const SolveOptions& opts,
                   Solution& primal, Solution& second) {
  primal = solve_tikhonov_auto(prob.A, prob.y_delta, a, prob.reg, opts);
  second = solve_second_auto(prob.A, prob.y_delta, a, prob.reg, primal, opts);
}

}  // namespace

RuleCurve rule_curve(const Problem& prob, const AlphaGrid& grid, const SolveOptions& opts,
                     SweepMode mode) {
  RuleCurve rc;
  rc.grid = grid;
  const std::size_t m = grid.size();
  rc.primal.resize(m);
  rc.second.resize(m);

  if (mode == SweepMode::WarmStart) {
    SolveOptions o = opts;
    // sweep from the largest alpha down: solutions deform continuously
    for (std::size_t j = m; j-- > 0;) {
      compute_point(prob, grid.alphas[j], o, rc.primal[j], rc.second[j]);
      o.x0 = rc.primal[j].x;
    }
  } else {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (std::size_t j = next.fetch_add(1); j < m; j = next.fetch_add(1))
        compute_point(prob, grid.alphas[j], opts, rc.primal[j], rc.second[j]);
    };
    for (unsigned t = 0; t + 1 < hw; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
  }

  for (auto& v : rc.psi) v.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double a = grid.alphas[j];
    const Solution& s = rc.primal[j];
    const Solution& s2 = rc.second[j];
    rc.psi[int(Rule::HD)][j] = psi_hd(a, s.p);
    rc.psi[int(Rule::HR)][j] = psi_hr(a, s.p, s2.p);
    rc.psi[int(Rule::SQO)][j] = psi_sqo(a, s.p, s2.p);
    rc.psi[int(Rule::RQO)][j] = psi_rqo(a, prob.reg, s.x, s2.x, s.p, s2.p);
  }
  for (Rule r : kAllRules)
    rc.alpha_star[int(r)] = select_alpha(rc.psi[int(r)], grid);
  return rc;
}

}  // namespace tikrules
