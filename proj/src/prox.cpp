#include "tikrules/prox.hpp"

#include <cmath>
#include <deque>
#include <vector>

namespace tikrules {

double h_q_eval(double q, double gamma, double x) {
  return x + gamma * std::pow(std::abs(x), q - 1.0) * sgn(x);
}

namespace {

// root of x + gamma x^{q-1} = t on [0, t], t >= 0
double invert_pos(double q, double gamma, double t) {
  if (t == 0.0) return 0.0;
  double lo = 0.0, hi = t;        // h(0) = 0 <= t and h(t) >= t
  double x = t / (1.0 + gamma * std::pow(t, q - 2.0));  // cheap initial guess
  if (!(x > lo && x < hi) || !std::isfinite(x)) x = 0.5 * t;
  const double tol = 1e-12 * (1.0 + t);
  for (int it = 0; it < 200; ++it) {
    const double g = x + gamma * std::pow(x, q - 1.0) - t;
    if (std::abs(g) <= tol) return x;
    if (g > 0.0) hi = x; else lo = x;
    const double dg = 1.0 + gamma * (q - 1.0) * std::pow(x, q - 2.0);
    double next = x - g / dg;
    if (!(next > lo && next < hi) || !std::isfinite(next))
      next = 0.5 * (lo + hi);    // Newton left the bracket
    x = next;
  }
  return x;
}

}  // namespace

double h_q_invert(double q, double gamma, double y) {
  if (!(q > 1.0)) throw std::invalid_argument("h_q_invert requires q > 1");
  if (!(gamma >= 0.0)) throw std::invalid_argument("h_q_invert requires gamma >= 0");
  if (y == 0.0) return 0.0;
  if (q == 2.0) return y / (1.0 + gamma);
  return sgn(y) * invert_pos(q, gamma, std::abs(y));
}

Vector lq_prox(double q, double gamma, const Vector& v) {
  Vector x(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) x[i] = h_q_invert(q, gamma, v[i]);
  return x;
}

Vector soft_threshold(double gamma, const Vector& v) {
  Vector x(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    x[i] = sgn(v[i]) * std::max(std::abs(v[i]) - gamma, 0.0);
  return x;
}

namespace {

// Jump of the message derivative at a knot. Later samples add the same
// quadratic on both sides of a knot, so a jump is written once and never
// touched again.
struct Knot {
  double x;
  double a;
  double b;
};

}  // namespace

Vector tv1d_prox(double gamma, const Vector& v) {
  const Eigen::Index n = v.size();
  if (n < 1) throw std::invalid_argument("tv1d_prox: empty input");
  if (gamma < 0.0 || !std::isfinite(gamma))
    throw std::invalid_argument("tv1d_prox: bad gamma");
  if (n == 1 || gamma == 0.0) return v;

  // Forward sweep. phi_k, the derivative of the Bellman message after
  // absorbing sample k, is piecewise linear and increasing; clipping it to
  // [-gamma, gamma] realizes the min-convolution with gamma|.|. For k >= 1
  // the left tail of phi_k is t - v[k] - gamma and the right tail is
  // t - v[k] + gamma; interior pieces are the left tail plus the jumps of
  // all knots passed. tm/tp record where each clip happened.
  std::vector<double> tm(n - 1), tp(n - 1);
  std::deque<Knot> knots;

  tm[0] = v[0] - gamma;
  tp[0] = v[0] + gamma;
  knots.push_back({tm[0], 1.0, -v[0] + gamma});
  knots.push_back({tp[0], -1.0, v[0] + gamma});

  for (Eigen::Index k = 1; k + 1 < n; ++k) {
    // left clip point: first root of phi_k = -gamma
    double alo = 1.0, blo = -v[k] - gamma;
    double lo;
    while (true) {
      lo = (-gamma - blo) / alo;
      if (knots.empty() || lo <= knots.front().x) break;
      alo += knots.front().a;
      blo += knots.front().b;
      knots.pop_front();
    }
    // right clip point: last root of phi_k = +gamma
    double ahi = 1.0, bhi = -v[k] + gamma;
    double hi;
    while (true) {
      hi = (gamma - bhi) / ahi;
      if (knots.empty() || hi >= knots.back().x) break;
      ahi -= knots.back().a;
      bhi -= knots.back().b;
      knots.pop_back();
    }
    if (hi < lo) hi = lo;

    tm[k] = lo;
    tp[k] = hi;
    knots.push_front({lo, alo, blo + gamma});
    knots.push_back({hi, -ahi, gamma - bhi});
  }

  // Last sample: minimize, no clip.
  double az = 1.0, bz = -v[n - 1] - gamma;
  double root;
  while (true) {
    root = -bz / az;
    if (knots.empty() || root <= knots.front().x) break;
    az += knots.front().a;
    bz += knots.front().b;
    knots.pop_front();
  }

  Vector x(n);
  x[n - 1] = root;
  for (Eigen::Index k = n - 2; k >= 0; --k)
    x[k] = std::min(std::max(x[k + 1], tm[k]), tp[k]);
  return x;
}

}  // namespace tikrules
