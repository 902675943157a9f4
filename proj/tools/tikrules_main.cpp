#include "tikrules/config.hpp"
#include "tikrules/diagonal.hpp"
#include "tikrules/harness.hpp"
#include "tikrules/io.hpp"
#include "tikrules/prox.hpp"
#include "tikrules/rules.hpp"
#include "tikrules/solve.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>

namespace {

using namespace tikrules;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct ProblemFlags {
  std::string matrix_path;
  double diag_beta = 0.0;
  int diag_n = 20;
  double diag_scale = 1.0;
  double q = 0.0;
  bool use_l1 = false;
  bool use_tv = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--matrix", matrix_path, "dense operator file (rows of numbers)");
    cmd->add_option("--diag-beta", diag_beta, "diagonal operator decay: lambda_i = scale/i^beta");
    cmd->add_option("--diag-n", diag_n, "diagonal operator size")->default_val(20);
    cmd->add_option("--diag-scale", diag_scale, "diagonal operator scale")->default_val(1.0);
    cmd->add_option("--q", q, "power penalty exponent (1/q)||x||_q^q");
    cmd->add_flag("--l1", use_l1, "l1 penalty");
    cmd->add_flag("--tv", use_tv, "1-D total variation penalty");
  }

  LinearOperator op() const {
    if (!matrix_path.empty() && diag_beta > 0.0)
      throw ConfigError("give either --matrix or --diag-beta, not both");
    if (!matrix_path.empty()) return LinearOperator::dense(read_matrix_file(matrix_path));
    if (diag_beta > 0.0) {
      Vector l(diag_n);
      for (int i = 0; i < diag_n; ++i)
        l[i] = diag_scale / std::pow(double(i + 1), diag_beta);
      return LinearOperator::diagonal(l);
    }
    throw ConfigError("no operator given: use --matrix or --diag-beta");
  }

  RegularizerSpec reg() const {
    const int picks = (q > 0.0) + use_l1 + use_tv;
    if (picks != 1) throw ConfigError("pick exactly one of --q, --l1, --tv");
    if (use_l1) return RegularizerSpec::l1();
    if (use_tv) return RegularizerSpec::tv1d();
    return RegularizerSpec::power_lq(q);
  }
};

void emit_vector(const Vector& v, const std::string& out_path) {
  if (out_path.empty()) {
    for (Eigen::Index i = 0; i < v.size(); ++i) std::cout << fmt17(v[i]) << '\n';
  } else {
    write_vector_file(out_path, v);
  }
}

int run(int argc, char** argv) {
  CLI::App app{"heuristic parameter choice rules for convex Tikhonov regularization"};
  app.require_subcommand(1);

  // ---- solve ----
  auto* solve_cmd = app.add_subcommand("solve", "one Tikhonov solve");
  ProblemFlags solve_p;
  solve_p.attach(solve_cmd);
  double solve_alpha = 0.0;
  std::string solve_y, solve_out;
  int solve_iters = 5000;
  double solve_tol = 1e-10;
  solve_cmd->add_option("--alpha", solve_alpha, "regularization parameter")->required();
  solve_cmd->add_option("--y", solve_y, "data vector file")->required();
  solve_cmd->add_option("--out", solve_out, "write x here instead of stdout");
  solve_cmd->add_option("--max-iters", solve_iters, "solver iteration cap")->default_val(5000);
  solve_cmd->add_option("--tol", solve_tol, "solver tolerance")->default_val(1e-10);

  // ---- rules ----
  auto* rules_cmd = app.add_subcommand("rules", "psi curves for one noisy data vector");
  ProblemFlags rules_p;
  rules_p.attach(rules_cmd);
  std::string rules_y, rules_out;
  int rules_ppd = 20;
  double rules_amin = 0.0, rules_amax = 0.0;
  rules_cmd->add_option("--y", rules_y, "noisy data vector file")->required();
  rules_cmd->add_option("--out", rules_out, "write CSV here instead of stdout");
  rules_cmd->add_option("--points-per-decade", rules_ppd)->default_val(20);
  rules_cmd->add_option("--alpha-min", rules_amin, "grid lower end override");
  rules_cmd->add_option("--alpha-max", rules_amax, "grid upper end override");

  // ---- experiment ----
  auto* exp_cmd = app.add_subcommand("experiment", "run a configured noise sweep");
  std::string exp_config;
  exp_cmd->add_option("--config", exp_config, "TOML experiment config")->required();

  // ---- conditions ----
  auto* cond_cmd = app.add_subcommand("conditions", "auto-regularisation / Muckenhoupt / rate tables");
  std::string cond_variant = "autoreg-hd";
  int cond_n = 20;
  double cond_beta = 4.0, cond_nu = 2.0, cond_kappa = 1.0, cond_q = 1.5;
  double cond_delta = 1e-2, cond_C1 = 1.0, cond_C3 = 10.0;
  int cond_ppd = 20;
  std::uint64_t cond_sign_seed = 0, cond_noise_seed = 0;
  std::string cond_out;
  cond_cmd->add_option("--variant", cond_variant,
                       "autoreg-{hd,hr,sqo,rqo} | muck-{hd,hr,sqo} | rate")
      ->default_val("autoreg-hd");
  cond_cmd->add_option("--n", cond_n)->default_val(20);
  cond_cmd->add_option("--beta", cond_beta)->default_val(4.0);
  cond_cmd->add_option("--nu", cond_nu)->default_val(2.0);
  cond_cmd->add_option("--kappa", cond_kappa)->default_val(1.0);
  cond_cmd->add_option("--q", cond_q)->default_val(1.5);
  cond_cmd->add_option("--delta", cond_delta, "noise level")->default_val(1e-2);
  cond_cmd->add_option("--C1", cond_C1, "spectral cut constant")->default_val(1.0);
  cond_cmd->add_option("--C3", cond_C3, "SQO index-set constant")->default_val(10.0);
  cond_cmd->add_option("--points-per-decade", cond_ppd)->default_val(20);
  cond_cmd->add_option("--sign-seed", cond_sign_seed, "random signs for x_dagger (0 = all +1)");
  cond_cmd->add_option("--noise-sign-seed", cond_noise_seed, "random signs for the noise (0 = all +1)");
  cond_cmd->add_option("--out", cond_out, "write CSV here instead of stdout");

  // ---- classify ----
  auto* cls_cmd = app.add_subcommand("classify", "polynomial-decay noise regime");
  double cls_beta = 0.0, cls_nu = 0.0, cls_kappa = 0.0, cls_q = 0.0;
  std::string cls_rule = "HD";
  cls_cmd->add_option("--beta", cls_beta)->required();
  cls_cmd->add_option("--nu", cls_nu)->required();
  cls_cmd->add_option("--kappa", cls_kappa)->required();
  cls_cmd->add_option("--q", cls_q)->required();
  cls_cmd->add_option("--rule", cls_rule, "HD|HR|SQO|RQO")->default_val("HD");

  // ---- gen-matrix ----
  auto* gen_cmd = app.add_subcommand("gen-matrix", "seeded ill-conditioned dense matrix");
  int gen_rows = 0, gen_cols = 0;
  double gen_cond = 100.0;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen_cmd->add_option("--rows", gen_rows)->required();
  gen_cmd->add_option("--cols", gen_cols)->required();
  gen_cmd->add_option("--cond", gen_cond, "condition number")->default_val(100.0);
  gen_cmd->add_option("--seed", gen_seed)->default_val(1);
  gen_cmd->add_option("--out", gen_out, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);  // prints the message; 0 for --help/--version
    return rc == 0 ? kExitOk : kExitConfig;
  }

  if (solve_cmd->parsed()) {
    const LinearOperator A = solve_p.op();
    const Vector y = read_vector_file(solve_y);
    SolveOptions opts;
    opts.max_iters = solve_iters;
    opts.tol = solve_tol;
    const Solution sol = solve_tikhonov_auto(A, y, solve_alpha, solve_p.reg(), opts);
    emit_vector(sol.x, solve_out);
    std::cerr << "objective=" << fmt17(sol.objective) << " residual=" << fmt17(sol.p.norm())
              << " iters=" << sol.iters << (sol.converged ? "" : " (not converged)") << '\n';
    return sol.converged ? kExitOk : kExitNumerical;
  }

  if (rules_cmd->parsed()) {
    const LinearOperator A = rules_p.op();
    const Vector y_delta = read_vector_file(rules_y);
    // the exact solution is unknown here; the curve only needs A and y_delta,
    // so wrap the data as its own problem with an unconstrained noise bound
    Problem prob(A, Vector::Zero(A.cols()), y_delta, y_delta.norm() * (1.0 + 1e-9),
                 rules_p.reg());
    const AlphaGrid grid = build_grid(
        A, rules_ppd,
        rules_amin > 0.0 ? std::optional<double>(rules_amin) : std::nullopt,
        rules_amax > 0.0 ? std::optional<double>(rules_amax) : std::nullopt);
    const RuleCurve curve = rule_curve(prob, grid);
    std::string csv = "alpha,psi_hd,psi_hr,psi_sqo,psi_rqo\n";
    for (std::size_t j = 0; j < grid.size(); ++j) {
      csv += fmt17(grid.alphas[j]);
      for (Rule r : kAllRules) {
        csv += ',';
        csv += fmt17(curve.psi_of(r)[j]);
      }
      csv += '\n';
    }
    if (rules_out.empty()) {
      std::cout << csv;
    } else {
      std::ofstream out(rules_out, std::ios::binary);
      if (!out) throw ConfigError("cannot write " + rules_out);
      out << csv;
    }
    for (Rule r : kAllRules)
      std::cerr << "alpha_star[" << rule_name(r) << "]=" << fmt17(curve.alpha_star_of(r))
                << '\n';
    return kExitOk;
  }

  if (exp_cmd->parsed()) {
    const ExperimentConfig cfg = load_config(exp_config);
    const ExperimentReport rep = run_experiment(cfg);
    write_report(rep, cfg.output_dir);
    std::cerr << "wrote " << cfg.output_dir << "/report.csv and report.json\n";
    if (rep.nonconverged_solves > 0) {
      std::cerr << rep.nonconverged_solves << " solves hit the iteration cap\n";
      return kExitNumerical;
    }
    return kExitOk;
  }

  if (cond_cmd->parsed()) {
    DiagonalModel m;
    m.n = cond_n;
    m.beta = cond_beta;
    m.nu = cond_nu;
    m.kappa = cond_kappa;
    m.q = cond_q;
    if (cond_sign_seed) m.s = DiagonalModel::random_signs(cond_n, cond_sign_seed);
    if (cond_noise_seed) m.s_prime = DiagonalModel::random_signs(cond_n, cond_noise_seed);
    const LinearOperator A = LinearOperator::diagonal(m.eigenvalues());
    const AlphaGrid grid = build_grid(A, cond_ppd);

    std::string csv;
    if (cond_variant == "rate") {
      const Vector e = m.noise(cond_delta);
      Problem prob(A, m.x_dagger(), m.y_exact() + e, e.norm(),
                   RegularizerSpec::power_lq(cond_q));
      const auto reps = rate_condition_probe(prob, grid);
      csv = "alpha,rate_hd,rate_hr,rate_sqo\n";
      for (std::size_t j = 0; j < grid.size(); ++j) {
        csv += fmt17(grid.alphas[j]);
        for (const auto& r : reps) {
          csv += ',';
          csv += fmt17(r.per_alpha[j].lhs);
        }
        csv += '\n';
      }
      std::cerr << "inf_hd=" << fmt17(reps[0].inf_lhs) << " inf_hr=" << fmt17(reps[1].inf_lhs)
                << " inf_sqo=" << fmt17(reps[2].inf_lhs) << '\n';
    } else {
      ConditionReport rep;
      if (cond_variant.rfind("muck-", 0) == 0) {
        ConditionKind kind;
        if (cond_variant == "muck-hd") kind = ConditionKind::MuckHD;
        else if (cond_variant == "muck-hr") kind = ConditionKind::MuckHR;
        else if (cond_variant == "muck-sqo") kind = ConditionKind::MuckSQO;
        else throw ConfigError("unknown variant: " + cond_variant);
        const std::optional<double> C3 =
            kind == ConditionKind::MuckSQO ? std::optional<double>(cond_C3) : std::nullopt;
        rep = muckenhoupt_report(m, grid, cond_delta, cond_C1, kind, C3);
      } else {
        ConditionKind kind;
        if (cond_variant == "autoreg-hd") kind = ConditionKind::AutoregHD;
        else if (cond_variant == "autoreg-hr") kind = ConditionKind::AutoregHR;
        else if (cond_variant == "autoreg-sqo") kind = ConditionKind::AutoregSQO;
        else if (cond_variant == "autoreg-rqo") kind = ConditionKind::AutoregRQO;
        else throw ConfigError("unknown variant: " + cond_variant);
        const Vector e = m.noise(cond_delta);
        Problem prob(A, m.x_dagger(), m.y_exact() + e, e.norm(),
                     RegularizerSpec::power_lq(cond_q));
        rep = autoreg_check(prob, grid, kind);
      }
      csv = "alpha,lhs,rhs,ratio\n";
      for (const auto& entry : rep.per_alpha) {
        const double ratio =
            entry.lhs <= 0.0 ? 0.0
                             : (entry.rhs <= 0.0 ? std::numeric_limits<double>::infinity()
                                                 : entry.lhs / entry.rhs);
        csv += fmt17(entry.alpha);
        csv += ',';
        csv += fmt17(entry.lhs);
        csv += ',';
        csv += fmt17(entry.rhs);
        csv += ',';
        csv += fmt17(ratio);
        csv += '\n';
      }
      std::cerr << condition_name(rep.condition)
                << ": min_feasible_C=" << fmt17(rep.min_feasible_C)
                << " negativity_flags=" << rep.negativity_flags << '\n';
    }
    if (cond_out.empty()) {
      std::cout << csv;
    } else {
      std::ofstream out(cond_out, std::ios::binary);
      if (!out) throw ConfigError("cannot write " + cond_out);
      out << csv;
    }
    return kExitOk;
  }

  if (cls_cmd->parsed()) {
    const RegimeReport rep =
        regime_classify(cls_beta, cls_nu, cls_kappa, cls_q, rule_from_name(cls_rule));
    const char* status = rep.status == RegimeStatus::Satisfied
                             ? "satisfied"
                             : (rep.status == RegimeStatus::Violated ? "violated"
                                                                     : "not_covered");
    std::cout << "status=" << status << '\n'
              << "kappa_threshold=" << fmt17(rep.kappa_threshold) << '\n'
              << "decay_condition_ok=" << (rep.decay_condition_ok ? "true" : "false") << '\n'
              << "assumptions_met=" << (rep.assumptions_met ? "true" : "false") << '\n';
    if (!rep.message.empty()) std::cout << "note=" << rep.message << '\n';
    return kExitOk;
  }

  if (gen_cmd->parsed()) {
    const Matrix mat = gen_ill_conditioned_matrix(gen_rows, gen_cols, gen_cond, gen_seed);
    write_matrix_file(gen_out, mat);
    std::cerr << "wrote " << gen_out << " (" << gen_rows << "x" << gen_cols << ")\n";
    return kExitOk;
  }

  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const tikrules::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const tikrules::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}
