#pragma once

#include "tikrules/core.hpp"
#include "tikrules/rules.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tikrules {

// Minimal TOML reader covering what the experiment config needs: [section]
// headers, bare keys, strings, numbers, booleans, flat arrays, # comments.
struct TomlValue {
  enum class Kind { Str, Num, Bool, Arr };
  Kind kind = Kind::Num;
  std::string str;
  double num = 0.0;
  bool boolean = false;
  std::vector<TomlValue> arr;
};

using TomlSection = std::map<std::string, TomlValue>;
using TomlTable = std::map<std::string, TomlSection>;

TomlTable parse_toml(const std::string& text, const std::string& whence);

struct DiagonalProblemSpec {
  int n = 20;
  double beta = 4.0;
  double nu = 2.0;
  std::optional<std::uint64_t> sign_seed;  // random +-1 signs for x_dagger
  double scale_A = 1.0;
  double scale_x = 1.0;
};

struct DenseProblemSpec {
  std::string matrix_path;
  std::string x_dagger_path;
};

struct ExperimentConfig {
  std::variant<DiagonalProblemSpec, DenseProblemSpec> problem;
  RegularizerSpec reg = RegularizerSpec::power_lq(2.0);

  double delta_min = 1e-4;
  double delta_max = 1e-1;
  int levels = 10;
  std::optional<double> noise_kappa;
  std::optional<std::uint64_t> seed;  // fresh entropy when absent
  bool absolute = false;              // deltas relative to ||y|| by default
  int repeats = 1;                    // >1: median over draws, marked in JSON

  int points_per_decade = 20;
  std::optional<double> alpha_min;
  std::optional<double> alpha_max;
  int solve_max_iters = 5000;
  double solve_tol = 1e-10;

  std::vector<Rule> rules{Rule::HD, Rule::HR, Rule::SQO, Rule::RQO};
  std::string output_dir = "out";
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_toml(const TomlTable& t, const std::string& whence);

}  // namespace tikrules
