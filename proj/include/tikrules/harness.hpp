#pragma once

#include "tikrules/config.hpp"
#include "tikrules/core.hpp"
#include "tikrules/diagonal.hpp"
#include "tikrules/rules.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tikrules {

using ordered_json = nlohmann::ordered_json;

// Seeded Gaussian noise with optional polynomial decay i^{-kappa}, rescaled
// so that ||e|| = delta_rel * ||y|| exactly.
Vector gen_noise(const Vector& y, double delta_rel, std::optional<double> kappa,
                 std::uint64_t seed);
// Same draw scaled to a prescribed absolute norm.
Vector gen_noise_abs(Eigen::Index dim, double delta_abs, std::optional<double> kappa,
                     std::uint64_t seed);

double err_l1(const Vector& x, const Vector& x_dagger);
// Bregman distance to x_dagger with the exact subgradient xi_dagger there.
double err_lq_bregman(const RegularizerSpec& reg, const Vector& x, const Vector& x_dagger,
                      const Vector& xi_dagger);
// |R(x) - R(x_dagger)| + ||Ax - y_delta||^2 / alpha
double err_tv(const RegularizerSpec& reg, const Vector& x, const Vector& x_dagger,
              const LinearOperator& A, const Vector& y_delta, double alpha);

struct ExperimentRow {
  int level_index = 0;
  double delta = 0.0;
  Rule rule = Rule::HD;
  double alpha_star = 0.0;
  double error = 0.0;
  double alpha_opt = 0.0;
  double error_opt = 0.0;
  double efficiency = 1.0;
};

struct LevelInfo {
  int level_index = 0;
  double delta_target = 0.0;  // requested (relative unless config says absolute)
  double delta_abs = 0.0;     // realized ||e||
  std::uint64_t seed = 0;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
  std::vector<LevelInfo> levels;
  int nonconverged_solves = 0;
  ordered_json conditions;  // per-level summaries, diagonal + power_lq only
  ordered_json config_echo;
};

ExperimentReport run_experiment(const ExperimentConfig& cfg);

std::string report_csv(const ExperimentReport& rep);
ordered_json report_json(const ExperimentReport& rep);
// writes report.csv and report.json into cfg.output_dir
void write_report(const ExperimentReport& rep, const std::string& output_dir);

}  // namespace tikrules
