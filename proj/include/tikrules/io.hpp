#pragma once

#include "tikrules/core.hpp"

#include <cstdint>
#include <random>
#include <string>

namespace tikrules {

// Plain-text formats: matrices one whitespace-separated row per line,
// vectors one decimal per line. UTF-8, LF or CRLF.
Matrix read_matrix_file(const std::string& path);
Vector read_vector_file(const std::string& path);
void write_matrix_file(const std::string& path, const Matrix& m);
void write_vector_file(const std::string& path, const Vector& v);

// Random dense matrix with geometrically spaced singular values from 1 down
// to 1/cond; stand-in for ill-posed forward operators. Deterministic per seed.
Matrix gen_ill_conditioned_matrix(int rows, int cols, double cond, std::uint64_t seed);

// Standard normal draws via Box-Muller over mt19937_64: bit-reproducible for
// a given seed, unlike std::normal_distribution.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : eng_(seed) {}
  double next();
  Vector draw(Eigen::Index n);

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace tikrules
