#include "tikrules/io.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

namespace tikrules {

namespace {

std::vector<std::vector<double>> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        row.push_back(v);
      } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": not a number: " + tok);
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError(path + ": empty file");
  return rows;
}

}  // namespace

Matrix read_matrix_file(const std::string& path) {
  const auto rows = read_rows(path);
  const std::size_t m = rows.size(), n = rows[0].size();
  for (std::size_t i = 0; i < m; ++i)
    if (rows[i].size() != n)
      throw ConfigError(path + ": ragged matrix (row " + std::to_string(i + 1) + ")");
  Matrix a(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = rows[i][j];
  return a;
}

Vector read_vector_file(const std::string& path) {
  const auto rows = read_rows(path);
  Vector v(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 1)
      throw ConfigError(path + ": expected one value per line");
    v[i] = rows[i][0];
  }
  return v;
}

namespace {

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << body;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_matrix_file(const std::string& path, const Matrix& m) {
  std::ostringstream os;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << fmt17(m(i, j));
    }
    os << '\n';
  }
  write_text(path, os.str());
}

void write_vector_file(const std::string& path, const Vector& v) {
  std::ostringstream os;
  for (Eigen::Index i = 0; i < v.size(); ++i) os << fmt17(v[i]) << '\n';
  write_text(path, os.str());
}

double NormalSampler::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 53-bit uniforms; u1 shifted away from 0 so log stays finite
  const double u1 = (double(eng_() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = double(eng_() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

Vector NormalSampler::draw(Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = next();
  return v;
}

Matrix gen_ill_conditioned_matrix(int rows, int cols, double cond, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw ConfigError("gen-matrix: empty shape");
  if (!(cond >= 1.0)) throw ConfigError("gen-matrix: cond must be >= 1");
  NormalSampler ns(seed);
  const int k = std::min(rows, cols);
  auto ortho = [&ns](int n, int k) {
    Matrix g(n, k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < k; ++j) g(i, j) = ns.next();
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(n, k);
    // fix the sign convention so the factorization is unique
    const Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    for (int j = 0; j < k; ++j)
      if (r(j, j) < 0) q.col(j) *= -1.0;
    return q;
  };
  const Matrix u = ortho(rows, k);
  const Matrix v = ortho(cols, k);
  Vector sv(k);
  for (int i = 0; i < k; ++i)
    sv[i] = k == 1 ? 1.0 : std::pow(cond, -double(i) / double(k - 1));
  return u * sv.asDiagonal() * v.transpose();
}

}  // namespace tikrules
