#include "tikrules/harness.hpp"

#include "tikrules/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

namespace tikrules {

namespace {

Vector noise_direction(Eigen::Index dim, std::optional<double> kappa, std::uint64_t seed) {
  NormalSampler ns(seed);
  Vector e = ns.draw(dim);
  if (kappa)
    for (Eigen::Index i = 0; i < dim; ++i) e[i] *= std::pow(double(i + 1), -*kappa);
  const double nrm = e.norm();
  if (nrm == 0.0) throw NumericalError("gen_noise: degenerate draw");
  return e / nrm;
}

}  // namespace

Vector gen_noise(const Vector& y, double delta_rel, std::optional<double> kappa,
                 std::uint64_t seed) {
  if (!(delta_rel > 0.0)) throw std::invalid_argument("gen_noise: delta must be positive");
  const double ny = y.norm();
  if (ny == 0.0)
    throw std::invalid_argument("gen_noise: relative scaling needs nonzero exact data");
  return noise_direction(y.size(), kappa, seed) * (delta_rel * ny);
}

Vector gen_noise_abs(Eigen::Index dim, double delta_abs, std::optional<double> kappa,
                     std::uint64_t seed) {
  if (!(delta_abs > 0.0)) throw std::invalid_argument("gen_noise: delta must be positive");
  return noise_direction(dim, kappa, seed) * delta_abs;
}

double err_l1(const Vector& x, const Vector& x_dagger) {
  return (x - x_dagger).lpNorm<1>();
}

double err_lq_bregman(const RegularizerSpec& reg, const Vector& x, const Vector& x_dagger,
                      const Vector& xi_dagger) {
  if (reg.kind != RegKind::PowerLq)
    throw std::invalid_argument("err_lq_bregman requires power_lq");
  return bregman_distance(reg, x, x_dagger, xi_dagger);
}

double err_tv(const RegularizerSpec& reg, const Vector& x, const Vector& x_dagger,
              const LinearOperator& A, const Vector& y_delta, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("err_tv: alpha must be positive");
  return std::abs(reg_value(reg, x) - reg_value(reg, x_dagger)) +
         (A.apply(x) - y_delta).squaredNorm() / alpha;
}

namespace {

Problem build_problem(const ExperimentConfig& cfg) {
  if (std::holds_alternative<DiagonalProblemSpec>(cfg.problem)) {
    const auto& d = std::get<DiagonalProblemSpec>(cfg.problem);
    DiagonalModel m;
    m.n = d.n;
    m.beta = d.beta;
    m.nu = d.nu;
    m.c_A = d.scale_A;
    m.c_x = d.scale_x;
    if (d.sign_seed) m.s = DiagonalModel::random_signs(d.n, *d.sign_seed);
    LinearOperator A = LinearOperator::diagonal(m.eigenvalues());
    Vector xd = m.x_dagger();
    Vector y = A.apply(xd);
    return Problem(std::move(A), std::move(xd), std::move(y), 0.0, cfg.reg);
  }
  const auto& d = std::get<DenseProblemSpec>(cfg.problem);
  LinearOperator A = LinearOperator::dense(read_matrix_file(d.matrix_path));
  Vector xd = read_vector_file(d.x_dagger_path);
  if (xd.size() != A.cols())
    throw ConfigError("x_dagger length does not match the matrix column count");
  Vector y = A.apply(xd);
  return Problem(std::move(A), std::move(xd), std::move(y), 0.0, cfg.reg);
}

double error_of(const ExperimentConfig& cfg, const Problem& prob, const Vector& xi_dagger,
                const Vector& x, double alpha) {
  switch (cfg.reg.kind) {
    case RegKind::PowerLq:
      return err_lq_bregman(cfg.reg, x, prob.x_dagger, xi_dagger);
    case RegKind::L1:
      return err_l1(x, prob.x_dagger);
    case RegKind::Tv1d:
      return err_tv(cfg.reg, x, prob.x_dagger, prob.A, prob.y_delta, alpha);
  }
  return 0.0;
}

std::size_t index_of_alpha(const AlphaGrid& grid, double alpha) {
  for (std::size_t j = 0; j < grid.size(); ++j)
    if (grid.alphas[j] == alpha) return j;
  throw std::logic_error("alpha not on grid");
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ordered_json config_echo_json(const ExperimentConfig& cfg) {
  ordered_json j;
  if (std::holds_alternative<DiagonalProblemSpec>(cfg.problem)) {
    const auto& d = std::get<DiagonalProblemSpec>(cfg.problem);
    ordered_json p{{"kind", "diagonal"}, {"n", d.n}, {"beta", d.beta}, {"nu", d.nu}};
    if (d.sign_seed) p["sign_seed"] = *d.sign_seed;
    if (d.scale_A != 1.0) p["scale_A"] = d.scale_A;
    if (d.scale_x != 1.0) p["scale_x"] = d.scale_x;
    j["problem"] = p;
  } else {
    const auto& d = std::get<DenseProblemSpec>(cfg.problem);
    j["problem"] = {{"kind", "dense"}, {"matrix", d.matrix_path}, {"x_dagger", d.x_dagger_path}};
  }
  ordered_json reg{{"kind", cfg.reg.kind == RegKind::PowerLq
                                ? "lq"
                                : (cfg.reg.kind == RegKind::L1 ? "l1" : "tv1d")}};
  if (cfg.reg.kind == RegKind::PowerLq) reg["q"] = cfg.reg.q;
  j["regularizer"] = reg;
  ordered_json noise{{"delta_min", cfg.delta_min},
                     {"delta_max", cfg.delta_max},
                     {"levels", cfg.levels},
                     {"absolute", cfg.absolute},
                     {"repeats", cfg.repeats}};
  if (cfg.noise_kappa) noise["kappa"] = *cfg.noise_kappa;
  if (cfg.seed) noise["seed"] = *cfg.seed;
  j["noise"] = noise;
  ordered_json grid{{"points_per_decade", cfg.points_per_decade},
                    {"solve_max_iters", cfg.solve_max_iters},
                    {"solve_tol", cfg.solve_tol}};
  if (cfg.alpha_min) grid["alpha_min"] = *cfg.alpha_min;
  if (cfg.alpha_max) grid["alpha_max"] = *cfg.alpha_max;
  j["grid"] = grid;
  ordered_json rules = ordered_json::array();
  for (Rule r : cfg.rules) rules.push_back(rule_name(r));
  j["rules"] = rules;
  j["output"] = {{"dir", cfg.output_dir}};
  return j;
}

ordered_json condition_summary(const DiagonalModel& model, const Problem& noisy,
                               const AlphaGrid& grid, double delta_abs) {
  ordered_json out;
  {
    ordered_json auto_sum = ordered_json::array();
    for (ConditionKind v : {ConditionKind::AutoregHD, ConditionKind::AutoregHR,
                            ConditionKind::AutoregSQO, ConditionKind::AutoregRQO}) {
      const ConditionReport rep = autoreg_check(noisy, grid, v);
      auto_sum.push_back({{"variant", condition_name(v)},
                          {"min_feasible_C", rep.min_feasible_C},
                          {"negativity_flags", rep.negativity_flags}});
    }
    out["autoreg"] = auto_sum;
  }
  {
    ordered_json muck = ordered_json::array();
    for (double C1 : {0.01, 0.1, 1.0}) {
      for (ConditionKind v :
           {ConditionKind::MuckHD, ConditionKind::MuckHR, ConditionKind::MuckSQO}) {
        const std::optional<double> C3 =
            v == ConditionKind::MuckSQO ? std::optional<double>(10.0) : std::nullopt;
        const ConditionReport rep = muckenhoupt_report(model, grid, delta_abs, C1, v, C3);
        ordered_json entry{{"variant", condition_name(v)},
                           {"C1", C1},
                           {"min_feasible_C", rep.min_feasible_C}};
        if (C3) entry["C3"] = *C3;
        muck.push_back(entry);
      }
    }
    out["muckenhoupt"] = muck;
  }
  {
    const auto rates = rate_condition_probe(noisy, grid);
    out["rate"] = {{"inf_hd", rates[0].inf_lhs},
                   {"inf_hr", rates[1].inf_lhs},
                   {"inf_sqo", rates[2].inf_lhs}};
  }
  return out;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  const Problem base = normalize_problem(build_problem(cfg));
  const AlphaGrid grid =
      build_grid(base.A, cfg.points_per_decade, cfg.alpha_min, cfg.alpha_max);

  SolveOptions opts;
  opts.max_iters = cfg.solve_max_iters;
  opts.tol = cfg.solve_tol;

  std::uint64_t base_seed;
  if (cfg.seed) {
    base_seed = *cfg.seed;
  } else {
    std::random_device rd;
    base_seed = (std::uint64_t(rd()) << 32) ^ rd();
  }

  Vector xi_dagger;
  if (cfg.reg.kind == RegKind::PowerLq) xi_dagger = reg_subgradient(cfg.reg, base.x_dagger);

  const bool diagonal_lq = base.A.is_diagonal() && cfg.reg.kind == RegKind::PowerLq;
  std::optional<DiagonalModel> cond_model;
  if (diagonal_lq && std::holds_alternative<DiagonalProblemSpec>(cfg.problem)) {
    const auto& d = std::get<DiagonalProblemSpec>(cfg.problem);
    DiagonalModel m;
    m.n = d.n;
    m.beta = d.beta;
    m.nu = d.nu;
    m.kappa = cfg.noise_kappa.value_or(1.0);
    m.q = cfg.reg.q;
    // normalized scales: the base problem has ||A|| = ||x_dagger|| = 1
    m.c_A = base.A.eigenvalues()[0];
    m.c_x = std::abs(base.x_dagger[0]);
    if (d.sign_seed) m.s = DiagonalModel::random_signs(d.n, *d.sign_seed);
    cond_model = m;
  }

  ExperimentReport rep;
  rep.config_echo = config_echo_json(cfg);
  ordered_json conditions = ordered_json::array();

  for (int level = 0; level < cfg.levels; ++level) {
    const double frac = cfg.levels == 1 ? 0.0 : double(level) / double(cfg.levels - 1);
    const double delta_target =
        cfg.delta_min * std::pow(cfg.delta_max / cfg.delta_min, frac);

    struct Draw {
      std::array<double, 4> alpha_star, error;
      double alpha_opt, error_opt;
      std::array<double, 4> efficiency;
    };
    std::vector<Draw> draws;
    LevelInfo info;
    info.level_index = level;
    info.delta_target = delta_target;

    for (int r = 0; r < cfg.repeats; ++r) {
      const std::uint64_t seed = base_seed + 1000003ull * std::uint64_t(level) + r;
      const double target_abs =
          cfg.absolute ? delta_target : delta_target * base.y.norm();
      const Vector e = gen_noise_abs(base.y.size(), target_abs, cfg.noise_kappa, seed);
      const Vector y_delta = base.y + e;
      // realized noise level: the rounded sum, not ||e||, is what the
      // problem invariant sees
      const double delta_abs = (y_delta - base.y).norm();
      Problem noisy(base.A, base.x_dagger, y_delta, delta_abs, cfg.reg);
      if (r == 0) {
        info.seed = seed;
        info.delta_abs = delta_abs;
      }

      const RuleCurve curve = rule_curve(noisy, grid, opts);
      for (const auto& s : curve.primal) rep.nonconverged_solves += !s.converged;
      for (const auto& s : curve.second) rep.nonconverged_solves += !s.converged;

      std::vector<double> err(grid.size());
      for (std::size_t j = 0; j < grid.size(); ++j)
        err[j] = error_of(cfg, noisy, xi_dagger, curve.primal[j].x, grid.alphas[j]);
      std::size_t j_opt = 0;
      for (std::size_t j = 1; j < grid.size(); ++j)
        if (err[j] < err[j_opt]) j_opt = j;

      Draw d{};
      d.alpha_opt = grid.alphas[j_opt];
      d.error_opt = err[j_opt];
      for (Rule rule : cfg.rules) {
        const int k = int(rule);
        d.alpha_star[k] = curve.alpha_star_of(rule);
        d.error[k] = err[index_of_alpha(grid, d.alpha_star[k])];
        d.efficiency[k] = d.error_opt > 0.0
                              ? d.error[k] / d.error_opt
                              : (d.error[k] <= 0.0
                                     ? 1.0
                                     : std::numeric_limits<double>::infinity());
      }
      draws.push_back(d);

      if (r == 0 && cond_model)
        conditions.push_back({{"level_index", level},
                              {"delta_abs", delta_abs},
                              {"summary", condition_summary(*cond_model, noisy, grid,
                                                            delta_abs)}});
    }

    rep.levels.push_back(info);
    for (Rule rule : cfg.rules) {
      const int k = int(rule);
      auto collect = [&](auto proj) {
        std::vector<double> v;
        for (const auto& d : draws) v.push_back(proj(d));
        return median(std::move(v));
      };
      ExperimentRow row;
      row.level_index = level;
      row.delta = info.delta_abs;
      row.rule = rule;
      row.alpha_star = collect([&](const Draw& d) { return d.alpha_star[k]; });
      row.error = collect([&](const Draw& d) { return d.error[k]; });
      row.alpha_opt = collect([&](const Draw& d) { return d.alpha_opt; });
      row.error_opt = collect([&](const Draw& d) { return d.error_opt; });
      row.efficiency = collect([&](const Draw& d) { return d.efficiency[k]; });
      rep.rows.push_back(row);
    }
  }

  rep.conditions = std::move(conditions);
  return rep;
}

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string report_csv(const ExperimentReport& rep) {
  std::string out = "level_index,delta,rule,alpha_star,error,alpha_opt,error_opt,efficiency\n";
  for (const auto& r : rep.rows) {
    out += std::to_string(r.level_index);
    out += ',';
    out += fmt17(r.delta);
    out += ',';
    out += rule_name(r.rule);
    out += ',';
    out += fmt17(r.alpha_star);
    out += ',';
    out += fmt17(r.error);
    out += ',';
    out += fmt17(r.alpha_opt);
    out += ',';
    out += fmt17(r.error_opt);
    out += ',';
    out += fmt17(r.efficiency);
    out += '\n';
  }
  return out;
}

ordered_json report_json(const ExperimentReport& rep) {
  ordered_json j;
  j["config"] = rep.config_echo;
  ordered_json levels = ordered_json::array();
  for (const auto& l : rep.levels)
    levels.push_back({{"level_index", l.level_index},
                      {"delta_target", l.delta_target},
                      {"delta_abs", l.delta_abs},
                      {"seed", l.seed}});
  j["levels"] = levels;
  ordered_json rows = ordered_json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"level_index", r.level_index},
                    {"delta", r.delta},
                    {"rule", rule_name(r.rule)},
                    {"alpha_star", r.alpha_star},
                    {"error", r.error},
                    {"alpha_opt", r.alpha_opt},
                    {"error_opt", r.error_opt},
                    {"efficiency", r.efficiency}});
  j["rows"] = rows;
  j["nonconverged_solves"] = rep.nonconverged_solves;
  if (!rep.conditions.empty()) j["conditions"] = rep.conditions;
  return j;
}

void write_report(const ExperimentReport& rep, const std::string& output_dir) {
  std::filesystem::create_directories(output_dir);
  {
    std::ofstream csv(std::filesystem::path(output_dir) / "report.csv", std::ios::binary);
    if (!csv) throw ConfigError("cannot write report.csv in " + output_dir);
    csv << report_csv(rep);
  }
  {
    std::ofstream js(std::filesystem::path(output_dir) / "report.json", std::ios::binary);
    if (!js) throw ConfigError("cannot write report.json in " + output_dir);
    js << report_json(rep).dump(2) << '\n';
  }
}

}  // namespace tikrules
