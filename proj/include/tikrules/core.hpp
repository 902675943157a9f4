#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>

namespace tikrules {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Bad user input: malformed files, inconsistent flags, invalid config keys.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical breakdown: non-finite data, solver divergence.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

bool all_finite(const Vector& v);

// Forward operator, either diagonal (strictly positive, nonincreasing
// eigenvalues) or a dense matrix. The 2-norm and the smallest eigenvalue of
// A*A are computed at construction and never mutated, so instances can be
// shared freely between threads.
class LinearOperator {
 public:
  static LinearOperator diagonal(Vector eigenvalues);
  static LinearOperator dense(Matrix m);

  bool is_diagonal() const { return diagonal_; }
  const Vector& eigenvalues() const;
  const Matrix& matrix() const;

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }

  Vector apply(const Vector& x) const;
  Vector adjoint_apply(const Vector& p) const;

  double norm() const { return norm_; }
  // Smallest eigenvalue of A*A. Throws for dense operators wider/taller than
  // the SVD cutoff (2000 columns): callers must supply alpha_min themselves.
  double sigma_min() const;

 private:
  LinearOperator() = default;

  bool diagonal_ = true;
  Vector eigs_;
  Matrix mat_;
  Eigen::Index rows_ = 0, cols_ = 0;
  double norm_ = 0.0;
  std::optional<double> sigma_min_;
};

Vector apply(const LinearOperator& A, const Vector& x);
Vector adjoint_apply(const LinearOperator& A, const Vector& p);
double operator_norm(const LinearOperator& A);
double sigma_min(const LinearOperator& A);

enum class RegKind { PowerLq, L1, Tv1d };

// Convex penalty: (1/q)||x||_q^q with q > 1, ||x||_1, or the 1-D total
// variation sum |x_{i+1} - x_i|. Only the power case carries a single-valued
// subgradient.
struct RegularizerSpec {
  RegKind kind = RegKind::PowerLq;
  double q = 2.0;

  static RegularizerSpec power_lq(double q);
  static RegularizerSpec l1() { return {RegKind::L1, 0.0}; }
  static RegularizerSpec tv1d() { return {RegKind::Tv1d, 0.0}; }

  bool subgradient_available() const { return kind == RegKind::PowerLq; }
  std::string name() const;
};

double reg_value(const RegularizerSpec& reg, const Vector& x);
Vector reg_subgradient(const RegularizerSpec& reg, const Vector& x);

// One synthetic or file-backed instance. y is always recomputed as A x_dagger
// so the consistency invariant holds by construction; the noise bound
// ||y_delta - y|| <= delta is validated.
struct Problem {
  LinearOperator A;
  Vector x_dagger;
  Vector y;
  Vector y_delta;
  double delta = 0.0;
  RegularizerSpec reg;

  Problem(LinearOperator A_, Vector x_dagger_, Vector y_delta_, double delta_,
          RegularizerSpec reg_);
};

Problem normalize_problem(const Problem& p);

// Source element w with A*w in the subdifferential of R at x_dagger.
struct SourceInfo {
  Vector w;
  double w_norm = 0.0;
};

// Exact for diagonal operators with a power penalty; least-squares solve with
// a 1e-8 residual check for dense ones.
SourceInfo make_source_info(const Problem& p);

}  // namespace tikrules
