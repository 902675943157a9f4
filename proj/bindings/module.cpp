#include "tikrules/config.hpp"
#include "tikrules/diagonal.hpp"
#include "tikrules/harness.hpp"
#include "tikrules/io.hpp"
#include "tikrules/prox.hpp"
#include "tikrules/rules.hpp"
#include "tikrules/solve.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace tikrules;

PYBIND11_MODULE(_tikrules, m) {
  m.doc() = "heuristic parameter choice rules for convex Tikhonov regularization";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<NumericalError>(m, "NumericalError");

  // ---- core ----
  py::class_<LinearOperator>(m, "LinearOperator")
      .def_static("diagonal", &LinearOperator::diagonal, py::arg("eigenvalues"))
      .def_static("dense", &LinearOperator::dense, py::arg("matrix"))
      .def_property_readonly("is_diagonal", &LinearOperator::is_diagonal)
      .def_property_readonly("rows", &LinearOperator::rows)
      .def_property_readonly("cols", &LinearOperator::cols)
      .def("eigenvalues", &LinearOperator::eigenvalues,
           py::return_value_policy::reference_internal)
      .def("matrix", &LinearOperator::matrix, py::return_value_policy::reference_internal)
      .def("apply", &LinearOperator::apply, py::arg("x"))
      .def("adjoint_apply", &LinearOperator::adjoint_apply, py::arg("p"))
      .def("norm", &LinearOperator::norm)
      .def("sigma_min", &LinearOperator::sigma_min);

  py::enum_<RegKind>(m, "RegKind")
      .value("PowerLq", RegKind::PowerLq)
      .value("L1", RegKind::L1)
      .value("Tv1d", RegKind::Tv1d);

  py::class_<RegularizerSpec>(m, "RegularizerSpec")
      .def_static("power_lq", &RegularizerSpec::power_lq, py::arg("q"))
      .def_static("l1", &RegularizerSpec::l1)
      .def_static("tv1d", &RegularizerSpec::tv1d)
      .def_readonly("kind", &RegularizerSpec::kind)
      .def_readonly("q", &RegularizerSpec::q)
      .def_property_readonly("subgradient_available",
                             &RegularizerSpec::subgradient_available)
      .def("__repr__", [](const RegularizerSpec& r) { return "<" + r.name() + ">"; });

  m.def("reg_value", &reg_value, py::arg("reg"), py::arg("x"));
  m.def("reg_subgradient", &reg_subgradient, py::arg("reg"), py::arg("x"));

  py::class_<Problem>(m, "Problem")
      .def(py::init<LinearOperator, Vector, Vector, double, RegularizerSpec>(),
           py::arg("A"), py::arg("x_dagger"), py::arg("y_delta"), py::arg("delta"),
           py::arg("reg"))
      .def_readonly("x_dagger", &Problem::x_dagger)
      .def_readonly("y", &Problem::y)
      .def_readonly("y_delta", &Problem::y_delta)
      .def_readonly("delta", &Problem::delta)
      .def_readonly("reg", &Problem::reg)
      .def_property_readonly("A", [](const Problem& p) { return p.A; });

  m.def("normalize_problem", &normalize_problem, py::arg("problem"));

  py::class_<SourceInfo>(m, "SourceInfo")
      .def_readonly("w", &SourceInfo::w)
      .def_readonly("w_norm", &SourceInfo::w_norm);
  m.def("make_source_info", &make_source_info, py::arg("problem"));

  // ---- prox ----
  m.def("h_q_eval", &h_q_eval, py::arg("q"), py::arg("gamma"), py::arg("x"));
  m.def("h_q_invert", &h_q_invert, py::arg("q"), py::arg("gamma"), py::arg("y"));
  m.def("lq_prox", &lq_prox, py::arg("q"), py::arg("gamma"), py::arg("v"));
  m.def("soft_threshold", &soft_threshold, py::arg("gamma"), py::arg("v"));
  m.def("tv1d_prox", &tv1d_prox, py::arg("gamma"), py::arg("v"));

  // ---- solve ----
  py::class_<SolveOptions>(m, "SolveOptions")
      .def(py::init([](int max_iters, double tol, std::optional<double> step,
                       std::optional<Vector> x0) {
             SolveOptions o;
             o.max_iters = max_iters;
             o.tol = tol;
             o.step = step;
             o.x0 = std::move(x0);
             return o;
           }),
           py::arg("max_iters") = 5000, py::arg("tol") = 1e-10,
           py::arg("step") = std::nullopt, py::arg("x0") = std::nullopt)
      .def_readwrite("max_iters", &SolveOptions::max_iters)
      .def_readwrite("tol", &SolveOptions::tol);

  py::class_<Solution>(m, "Solution")
      .def_readonly("x", &Solution::x)
      .def_readonly("p", &Solution::p)
      .def_readonly("xi", &Solution::xi)
      .def_readonly("alpha", &Solution::alpha)
      .def_readonly("objective", &Solution::objective)
      .def_readonly("iters", &Solution::iters)
      .def_readonly("converged", &Solution::converged);

  m.def("fista_tikhonov", &fista_tikhonov, py::arg("A"), py::arg("y_used"),
        py::arg("alpha"), py::arg("reg"), py::arg("opts") = SolveOptions{});
  m.def("bregman_second", &bregman_second, py::arg("A"), py::arg("y_delta"),
        py::arg("alpha"), py::arg("reg"), py::arg("first"),
        py::arg("opts") = SolveOptions{});
  m.def("subgradient_from_residual", &subgradient_from_residual, py::arg("A"),
        py::arg("p"), py::arg("alpha"));
  m.def("solve_tikhonov", &solve_tikhonov_auto, py::arg("A"), py::arg("y_used"),
        py::arg("alpha"), py::arg("reg"), py::arg("opts") = SolveOptions{},
        "closed form on diagonal operators with a power penalty, FISTA otherwise");
  m.def("solve_second", &solve_second_auto, py::arg("A"), py::arg("y_delta"),
        py::arg("alpha"), py::arg("reg"), py::arg("first"),
        py::arg("opts") = SolveOptions{});
  m.def("diag_solve", &diag_solve, py::arg("eigenvalues"), py::arg("y"), py::arg("q"),
        py::arg("alpha"));
  m.def("diag_second", &diag_second, py::arg("eigenvalues"), py::arg("y"), py::arg("q"),
        py::arg("alpha"));
  m.def("diag_residual_scaled", &diag_residual_scaled, py::arg("lam"), py::arg("eta"),
        py::arg("q_star"), py::arg("y"));

  // ---- rules ----
  py::enum_<Rule>(m, "Rule")
      .value("HD", Rule::HD)
      .value("HR", Rule::HR)
      .value("SQO", Rule::SQO)
      .value("RQO", Rule::RQO);

  py::class_<AlphaGrid>(m, "AlphaGrid")
      .def_readonly("alphas", &AlphaGrid::alphas)
      .def_readonly("alpha_min", &AlphaGrid::alpha_min)
      .def_readonly("alpha_max", &AlphaGrid::alpha_max)
      .def_readonly("points_per_decade", &AlphaGrid::points_per_decade)
      .def("step_ratio", &AlphaGrid::step_ratio)
      .def("__len__", [](const AlphaGrid& g) { return g.size(); });

  m.def("build_grid", &build_grid, py::arg("A"), py::arg("points_per_decade") = 20,
        py::arg("alpha_min") = std::nullopt, py::arg("alpha_max") = std::nullopt);

  m.def("psi_hd", &psi_hd, py::arg("alpha"), py::arg("p"));
  m.def("psi_hr", &psi_hr, py::arg("alpha"), py::arg("p"), py::arg("p_II"));
  m.def("psi_sqo", &psi_sqo, py::arg("alpha"), py::arg("p"), py::arg("p_II"));
  m.def("psi_rqo", &psi_rqo, py::arg("alpha"), py::arg("reg"), py::arg("x"),
        py::arg("x_II"), py::arg("p"), py::arg("p_II"));
  m.def("bregman_distance", &bregman_distance, py::arg("reg"), py::arg("x1"),
        py::arg("x2"), py::arg("xi2"));
  m.def("sym_bregman_distance", &sym_bregman_distance, py::arg("x1"), py::arg("x2"),
        py::arg("xi1"), py::arg("xi2"));
  m.def("select_alpha", &select_alpha, py::arg("psi"), py::arg("grid"));

  py::enum_<SweepMode>(m, "SweepMode")
      .value("WarmStart", SweepMode::WarmStart)
      .value("ColdStart", SweepMode::ColdStart);

  py::class_<RuleCurve>(m, "RuleCurve")
      .def_readonly("grid", &RuleCurve::grid)
      .def_readonly("primal", &RuleCurve::primal)
      .def_readonly("second", &RuleCurve::second)
      .def("psi", [](const RuleCurve& rc, Rule r) { return rc.psi_of(r); },
           py::arg("rule"))
      .def("alpha_star", &RuleCurve::alpha_star_of, py::arg("rule"));

  m.def("rule_curve", &rule_curve, py::arg("problem"), py::arg("grid"),
        py::arg("opts") = SolveOptions{}, py::arg("mode") = SweepMode::WarmStart);

  // ---- diagonal theory ----
  py::class_<DiagonalModel>(m, "DiagonalModel")
      .def(py::init([](int n, double beta, double nu, double kappa, double q, double c_A,
                       double c_x, std::vector<int> s, std::vector<int> s_prime) {
             DiagonalModel md;
             md.n = n;
             md.beta = beta;
             md.nu = nu;
             md.kappa = kappa;
             md.q = q;
             md.c_A = c_A;
             md.c_x = c_x;
             md.s = std::move(s);
             md.s_prime = std::move(s_prime);
             return md;
           }),
           py::arg("n") = 20, py::arg("beta") = 4.0, py::arg("nu") = 2.0,
           py::arg("kappa") = 1.0, py::arg("q") = 1.5, py::arg("c_A") = 1.0,
           py::arg("c_x") = 1.0, py::arg("s") = std::vector<int>{},
           py::arg("s_prime") = std::vector<int>{})
      .def_readwrite("n", &DiagonalModel::n)
      .def_readwrite("beta", &DiagonalModel::beta)
      .def_readwrite("nu", &DiagonalModel::nu)
      .def_readwrite("kappa", &DiagonalModel::kappa)
      .def_readwrite("q", &DiagonalModel::q)
      .def("eigenvalues", &DiagonalModel::eigenvalues)
      .def("x_dagger", &DiagonalModel::x_dagger)
      .def("y_exact", &DiagonalModel::y_exact)
      .def("noise", &DiagonalModel::noise, py::arg("delta"))
      .def_static("random_signs", &DiagonalModel::random_signs, py::arg("n"),
                  py::arg("seed"));

  py::class_<LemmaConstants>(m, "LemmaConstants")
      .def_readonly("q_star", &LemmaConstants::q_star)
      .def_readonly("d_lo", &LemmaConstants::d_lo)
      .def_readonly("d_up", &LemmaConstants::d_up);
  m.def("lemma_constants", &lemma_constants, py::arg("q"));

  py::enum_<ConditionKind>(m, "ConditionKind")
      .value("AutoregHD", ConditionKind::AutoregHD)
      .value("AutoregHR", ConditionKind::AutoregHR)
      .value("AutoregSQO", ConditionKind::AutoregSQO)
      .value("AutoregRQO", ConditionKind::AutoregRQO)
      .value("MuckHD", ConditionKind::MuckHD)
      .value("MuckHR", ConditionKind::MuckHR)
      .value("MuckSQO", ConditionKind::MuckSQO)
      .value("RateHD", ConditionKind::RateHD)
      .value("RateHR", ConditionKind::RateHR)
      .value("RateSQO", ConditionKind::RateSQO);

  py::class_<ConditionEntry>(m, "ConditionEntry")
      .def_readonly("alpha", &ConditionEntry::alpha)
      .def_readonly("lhs", &ConditionEntry::lhs)
      .def_readonly("rhs", &ConditionEntry::rhs);

  py::class_<ConditionReport>(m, "ConditionReport")
      .def_readonly("condition", &ConditionReport::condition)
      .def_readonly("per_alpha", &ConditionReport::per_alpha)
      .def_readonly("min_feasible_C", &ConditionReport::min_feasible_C)
      .def_readonly("inf_lhs", &ConditionReport::inf_lhs)
      .def_readonly("negativity_flags", &ConditionReport::negativity_flags)
      .def("holds_with", &ConditionReport::holds_with, py::arg("C"));

  m.def("muckenhoupt_check", &muckenhoupt_check, py::arg("model"), py::arg("alpha"),
        py::arg("delta"), py::arg("C1"), py::arg("variant"),
        py::arg("C3") = std::nullopt);
  m.def("muckenhoupt_report", &muckenhoupt_report, py::arg("model"), py::arg("grid"),
        py::arg("delta"), py::arg("C1"), py::arg("variant"),
        py::arg("C3") = std::nullopt);
  m.def("autoreg_check", &autoreg_check, py::arg("problem"), py::arg("grid"),
        py::arg("variant"));

  py::class_<NonnegativityReport>(m, "NonnegativityReport")
      .def_readonly("min_hr", &NonnegativityReport::min_hr)
      .def_readonly("min_sqo", &NonnegativityReport::min_sqo)
      .def_readonly("violations_hr", &NonnegativityReport::violations_hr)
      .def_readonly("violations_sqo", &NonnegativityReport::violations_sqo)
      .def_readonly("samples", &NonnegativityReport::samples);
  m.def("nonnegativity_probe", &nonnegativity_probe, py::arg("q"), py::arg("samples"),
        py::arg("seed"));
  m.def("rate_condition_probe", &rate_condition_probe, py::arg("problem"),
        py::arg("grid"));

  py::enum_<RegimeStatus>(m, "RegimeStatus")
      .value("Satisfied", RegimeStatus::Satisfied)
      .value("Violated", RegimeStatus::Violated)
      .value("NotCovered", RegimeStatus::NotCovered);

  py::class_<RegimeReport>(m, "RegimeReport")
      .def_readonly("status", &RegimeReport::status)
      .def_readonly("kappa_threshold", &RegimeReport::kappa_threshold)
      .def_readonly("decay_condition_ok", &RegimeReport::decay_condition_ok)
      .def_readonly("assumptions_met", &RegimeReport::assumptions_met)
      .def_readonly("message", &RegimeReport::message);
  m.def("regime_classify", &regime_classify, py::arg("beta"), py::arg("nu"),
        py::arg("kappa"), py::arg("q"), py::arg("rule") = Rule::HD);

  // ---- harness ----
  m.def("gen_noise", &gen_noise, py::arg("y"), py::arg("delta_rel"), py::arg("kappa"),
        py::arg("seed"));
  m.def("err_l1", &err_l1, py::arg("x"), py::arg("x_dagger"));
  m.def("err_lq_bregman", &err_lq_bregman, py::arg("reg"), py::arg("x"),
        py::arg("x_dagger"), py::arg("xi_dagger"));
  m.def("err_tv", &err_tv, py::arg("reg"), py::arg("x"), py::arg("x_dagger"),
        py::arg("A"), py::arg("y_delta"), py::arg("alpha"));
  m.def("gen_ill_conditioned_matrix", &gen_ill_conditioned_matrix, py::arg("rows"),
        py::arg("cols"), py::arg("cond"), py::arg("seed"));
  m.def(
      "run_experiment_json",
      [](const std::string& config_path, const std::string& output_dir) {
        ExperimentConfig cfg = load_config(config_path);
        if (!output_dir.empty()) cfg.output_dir = output_dir;
        const ExperimentReport rep = run_experiment(cfg);
        if (!output_dir.empty()) write_report(rep, cfg.output_dir);
        return report_json(rep).dump();
      },
      py::arg("config_path"), py::arg("output_dir") = "",
      "run a configured experiment; returns the JSON report as a string and "
      "writes report.csv/report.json when output_dir is given");
}
