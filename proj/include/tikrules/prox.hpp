#pragma once

#include "tikrules/core.hpp"

namespace tikrules {

// h_{q,gamma}(x) = x + gamma |x|^{q-1} sgn(x); odd and strictly increasing.
double h_q_eval(double q, double gamma, double x);

// Unique root of h_{q,gamma}(x) = y, i.e. the scalar prox of
// gamma * (1/q)|.|^q. Sign-split, bisection-safeguarded Newton on [0, |y|];
// residual tolerance 1e-12 * (1 + |y|).
double h_q_invert(double q, double gamma, double y);

// Componentwise h_q_invert: x_i + gamma |x_i|^{q-1} sgn(x_i) = v_i.
Vector lq_prox(double q, double gamma, const Vector& v);

// sgn(v_i) max(|v_i| - gamma, 0): prox of gamma ||.||_1.
Vector soft_threshold(double gamma, const Vector& v);

// argmin_x 1/2||x - v||^2 + gamma * sum |x_{i+1} - x_i|, computed exactly by
// the string/dynamic-programming method (clipped piecewise-linear derivative
// messages, forward sweep + backward clamp).
Vector tv1d_prox(double gamma, const Vector& v);

}  // namespace tikrules
