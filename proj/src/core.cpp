#include "tikrules/core.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace tikrules {

namespace {

constexpr Eigen::Index kSvdCutoff = 2000;
constexpr double kPowerIterTol = 1e-10;
constexpr int kPowerIterCap = 10000;

// Dominant eigenvalue of A*A by power iteration, deterministic start.
double dense_norm(const Matrix& m) {
  const Eigen::Index n = m.cols();
  Vector v = Vector::Constant(n, 1.0 / std::sqrt(double(n)));
  double mu = 0.0;
  for (int it = 0; it < kPowerIterCap; ++it) {
    Vector w = m.transpose() * (m * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    const double mu_next = v.dot(m.transpose() * (m * v));
    if (std::abs(mu_next - mu) <= kPowerIterTol * std::abs(mu_next)) {
      mu = mu_next;
      break;
    }
    mu = mu_next;
  }
  return std::sqrt(std::max(mu, 0.0));
}

}  // namespace

bool all_finite(const Vector& v) { return v.allFinite(); }

LinearOperator LinearOperator::diagonal(Vector eigenvalues) {
  if (eigenvalues.size() < 1)
    throw std::invalid_argument("diagonal operator needs at least one eigenvalue");
  if (!eigenvalues.allFinite())
    throw std::invalid_argument("diagonal operator has non-finite eigenvalues");
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    if (eigenvalues[i] <= 0.0)
      throw std::invalid_argument("diagonal eigenvalues must be strictly positive");
    if (i > 0 && eigenvalues[i] > eigenvalues[i - 1])
      throw std::invalid_argument("diagonal eigenvalues must be nonincreasing");
  }
  LinearOperator op;
  op.diagonal_ = true;
  op.rows_ = op.cols_ = eigenvalues.size();
  op.norm_ = eigenvalues[0];
  const double lmin = eigenvalues[eigenvalues.size() - 1];
  op.sigma_min_ = lmin * lmin;
  op.eigs_ = std::move(eigenvalues);
  return op;
}

LinearOperator LinearOperator::dense(Matrix m) {
  if (m.rows() < 1 || m.cols() < 1)
    throw std::invalid_argument("dense operator must be nonempty");
  if (!m.allFinite())
    throw std::invalid_argument("dense operator has non-finite entries");
  LinearOperator op;
  op.diagonal_ = false;
  op.rows_ = m.rows();
  op.cols_ = m.cols();
  op.norm_ = dense_norm(m);
  if (m.cols() <= kSvdCutoff) {
    if (m.cols() > m.rows()) {
      op.sigma_min_ = 0.0;  // A*A is rank deficient
    } else {
      Eigen::BDCSVD<Matrix> svd(m);
      const double smin = svd.singularValues().minCoeff();
      op.sigma_min_ = smin * smin;
    }
  }
  op.mat_ = std::move(m);
  return op;
}

const Vector& LinearOperator::eigenvalues() const {
  if (!diagonal_) throw std::logic_error("not a diagonal operator");
  return eigs_;
}

const Matrix& LinearOperator::matrix() const {
  if (diagonal_) throw std::logic_error("not a dense operator");
  return mat_;
}

Vector LinearOperator::apply(const Vector& x) const {
  if (x.size() != cols_)
    throw std::invalid_argument("apply: dimension mismatch");
  if (diagonal_) return eigs_.cwiseProduct(x);
  return mat_ * x;
}

Vector LinearOperator::adjoint_apply(const Vector& p) const {
  if (p.size() != rows_)
    throw std::invalid_argument("adjoint_apply: dimension mismatch");
  if (diagonal_) return eigs_.cwiseProduct(p);
  return mat_.transpose() * p;
}

double LinearOperator::sigma_min() const {
  if (!sigma_min_)
    throw std::invalid_argument(
        "sigma_min unavailable for dense operators this large; supply alpha_min explicitly");
  return *sigma_min_;
}

Vector apply(const LinearOperator& A, const Vector& x) { return A.apply(x); }
Vector adjoint_apply(const LinearOperator& A, const Vector& p) { return A.adjoint_apply(p); }
double operator_norm(const LinearOperator& A) { return A.norm(); }
double sigma_min(const LinearOperator& A) { return A.sigma_min(); }

RegularizerSpec RegularizerSpec::power_lq(double q) {
  if (!(q > 1.0) || !std::isfinite(q))
    throw std::invalid_argument("power_lq requires 1 < q < inf");
  return {RegKind::PowerLq, q};
}

std::string RegularizerSpec::name() const {
  switch (kind) {
    case RegKind::PowerLq: return "lq(q=" + std::to_string(q) + ")";
    case RegKind::L1: return "l1";
    case RegKind::Tv1d: return "tv1d";
  }
  return "?";
}

double reg_value(const RegularizerSpec& reg, const Vector& x) {
  switch (reg.kind) {
    case RegKind::PowerLq: {
      double s = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i)
        s += std::pow(std::abs(x[i]), reg.q);
      return s / reg.q;
    }
    case RegKind::L1:
      return x.lpNorm<1>();
    case RegKind::Tv1d: {
      double s = 0.0;
      for (Eigen::Index i = 0; i + 1 < x.size(); ++i)
        s += std::abs(x[i + 1] - x[i]);
      return s;
    }
  }
  return 0.0;
}

Vector reg_subgradient(const RegularizerSpec& reg, const Vector& x) {
  if (reg.kind != RegKind::PowerLq)
    throw std::invalid_argument("subgradient selection undefined for " + reg.name());
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    g[i] = std::pow(std::abs(x[i]), reg.q - 1.0) * sgn(x[i]);
  return g;
}

Problem::Problem(LinearOperator A_, Vector x_dagger_, Vector y_delta_, double delta_,
                 RegularizerSpec reg_)
    : A(std::move(A_)),
      x_dagger(std::move(x_dagger_)),
      y_delta(std::move(y_delta_)),
      delta(delta_),
      reg(std::move(reg_)) {
  if (x_dagger.size() != A.cols())
    throw std::invalid_argument("problem: x_dagger dimension mismatch");
  if (y_delta.size() != A.rows())
    throw std::invalid_argument("problem: y_delta dimension mismatch");
  if (!x_dagger.allFinite() || !y_delta.allFinite() || !std::isfinite(delta) || delta < 0.0)
    throw std::invalid_argument("problem: non-finite data");
  y = A.apply(x_dagger);
  const double mis = (y_delta - y).norm();
  if (mis > delta * (1.0 + 1e-12))
    throw std::invalid_argument("problem: ||y_delta - y|| exceeds the stated noise level");
}

Problem normalize_problem(const Problem& p) {
  const double na = p.A.norm();
  const double nx = p.x_dagger.norm();
  if (na <= 0.0) throw std::invalid_argument("normalize_problem: zero operator");
  if (nx <= 0.0) throw std::invalid_argument("normalize_problem: zero exact solution");
  LinearOperator A2 = p.A.is_diagonal()
                          ? LinearOperator::diagonal(p.A.eigenvalues() / na)
                          : LinearOperator::dense(p.A.matrix() / na);
  const double s = 1.0 / (na * nx);
  Vector x2 = p.x_dagger / nx;
  // rescale the noise against the recomputed exact data: rescaling y_delta
  // directly would break y = A x_dagger (and the delta bound) by rounding
  const Vector y2 = A2.apply(x2);
  Vector yd2 = y2 + (p.y_delta - p.y) * s;
  const double d2 = std::max(p.delta * s, (yd2 - y2).norm());
  return Problem(std::move(A2), std::move(x2), std::move(yd2), d2, p.reg);
}

SourceInfo make_source_info(const Problem& p) {
  if (!p.reg.subgradient_available())
    throw std::invalid_argument("source element requires a power_lq regularizer");
  const Vector xi = reg_subgradient(p.reg, p.x_dagger);
  Vector w;
  if (p.A.is_diagonal()) {
    w = xi.cwiseQuotient(p.A.eigenvalues());
  } else {
    // A* w = xi in the least-squares sense; reject if the source condition
    // is not actually met.
    w = p.A.matrix().transpose().colPivHouseholderQr().solve(xi);
    const double res = (p.A.adjoint_apply(w) - xi).norm();
    if (res > 1e-8 * (1.0 + xi.norm()))
      throw NumericalError("source condition violated: A*w does not reach the subgradient");
  }
  return SourceInfo{w, w.norm()};
}

}  // namespace tikrules
