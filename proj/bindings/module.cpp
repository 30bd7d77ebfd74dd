#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "delfront/model_zoo.hpp"
#include "delfront/pde_sim.hpp"
#include "delfront/profile_solver.hpp"
#include "delfront/quasipoly.hpp"
#include "delfront/stability_domain.hpp"
#include "delfront/toy_model.hpp"
#include "delfront/version.hpp"
#include "delfront/wave_verify.hpp"

namespace py = pybind11;
using namespace delfront;

PYBIND11_MODULE(_core, m) {
    m.doc() = "bistable traveling wavefronts of delayed reaction-diffusion equations";
    m.attr("__version__") = DELFRONT_VERSION;

    py::class_<WaveProfile>(m, "WaveProfile")
        .def(py::init<>())
        .def_readwrite("t", &WaveProfile::t)
        .def_readwrite("phi", &WaveProfile::phi)
        .def_readwrite("c", &WaveProfile::c)
        .def_readwrite("tau", &WaveProfile::tau)
        .def_readwrite("h", &WaveProfile::h)
        .def_readwrite("residual_inf", &WaveProfile::residual_inf)
        .def_readwrite("model_id", &WaveProfile::model_id);

    // ------------------------------------------------------------ roots ----
    auto qp = m.def_submodule("quasipoly", "characteristic function chi(z)");
    py::class_<quasipoly::CharParams>(qp, "CharParams")
        .def(py::init<double, double, double, double>(), py::arg("a"), py::arg("b"),
             py::arg("c"), py::arg("h"))
        .def_readwrite("a", &quasipoly::CharParams::a)
        .def_readwrite("b", &quasipoly::CharParams::b)
        .def_readwrite("c", &quasipoly::CharParams::c)
        .def_readwrite("h", &quasipoly::CharParams::h);
    py::class_<quasipoly::RealRoot>(qp, "RealRoot")
        .def_readonly("value", &quasipoly::RealRoot::value)
        .def_readonly("multiplicity", &quasipoly::RealRoot::multiplicity);
    py::class_<quasipoly::Window>(qp, "Window")
        .def(py::init<double, double, double>(), py::arg("re_min"), py::arg("re_max"),
             py::arg("im_max"))
        .def_readwrite("re_min", &quasipoly::Window::re_min)
        .def_readwrite("re_max", &quasipoly::Window::re_max)
        .def_readwrite("im_max", &quasipoly::Window::im_max);
    py::class_<quasipoly::RootReport>(qp, "RootReport")
        .def_readonly("real_roots", &quasipoly::RootReport::real_roots)
        .def_readonly("complex_pairs_in_window",
                      &quasipoly::RootReport::complex_pairs_in_window)
        .def_readonly("window", &quasipoly::RootReport::window)
        .def_readonly("dominant_real", &quasipoly::RootReport::dominant_real);
    qp.def("eval_char",
           py::overload_cast<const quasipoly::CharParams&, double>(&quasipoly::eval_char),
           py::arg("p"), py::arg("z"));
    qp.def("dominant_positive_root", &quasipoly::dominant_positive_root, py::arg("p"));
    qp.def(
        "real_roots",
        [](const quasipoly::CharParams& p, double lo, double hi) {
            return quasipoly::real_roots(p, lo, hi);
        },
        py::arg("p"), py::arg("lo"), py::arg("hi"));
    qp.def(
        "analyze",
        [](const quasipoly::CharParams& p, std::optional<quasipoly::Window> w) {
            return quasipoly::analyze(p, w);
        },
        py::arg("p"), py::arg("window") = std::nullopt);

    // ----------------------------------------------------------- domain ----
    auto sd = m.def_submodule("stability_domain", "monotonicity domain in (tau, c)");
    py::class_<stability_domain::DomainParams>(sd, "DomainParams")
        .def_readonly("a_minus", &stability_domain::DomainParams::a_minus)
        .def_readonly("b_minus", &stability_domain::DomainParams::b_minus);
    py::class_<stability_domain::ThetaResult>(sd, "ThetaResult")
        .def_readonly("omega", &stability_domain::ThetaResult::omega)
        .def_readonly("theta", &stability_domain::ThetaResult::theta);
    py::class_<stability_domain::DomainCheck>(sd, "DomainCheck")
        .def_readonly("inside", &stability_domain::DomainCheck::inside)
        .def_readonly("clin_value", &stability_domain::DomainCheck::clin_value)
        .def_readonly("real_root_count", &stability_domain::DomainCheck::real_root_count)
        .def_readonly("count_checked", &stability_domain::DomainCheck::count_checked);
    py::class_<stability_domain::BoundaryPoint>(sd, "BoundaryPoint")
        .def_readonly("tau", &stability_domain::BoundaryPoint::tau)
        .def_readonly("clin_value", &stability_domain::BoundaryPoint::clin_value);
    py::class_<stability_domain::BoundaryCurve>(sd, "BoundaryCurve")
        .def_readonly("tau_sharp_value", &stability_domain::BoundaryCurve::tau_sharp_value)
        .def_readonly("points", &stability_domain::BoundaryCurve::points);
    sd.def("make_params", &stability_domain::make_params, py::arg("a_minus"),
           py::arg("b_minus"));
    sd.def("tau_sharp", &stability_domain::tau_sharp, py::arg("p"));
    sd.def("theta_point", &stability_domain::theta_point, py::arg("p"));
    sd.def("clin", &stability_domain::clin, py::arg("p"), py::arg("tau"));
    sd.def("in_domain", &stability_domain::in_domain, py::arg("p"), py::arg("tau"),
           py::arg("c"));
    sd.def("c_crit_of_h", &stability_domain::c_crit_of_h, py::arg("p"), py::arg("h"));
    sd.def("trace_boundary", &stability_domain::trace_boundary, py::arg("p"),
           py::arg("tau_max"), py::arg("n_points"), py::arg("jobs") = 1);

    // -------------------------------------------------------------- toy ----
    auto toy = m.def_submodule("toy_model", "closed-form two-slope family");
    py::class_<toy_model::ToyParams>(toy, "ToyParams")
        .def_readonly("kappa", &toy_model::ToyParams::kappa)
        .def_readonly("p", &toy_model::ToyParams::p)
        .def_readonly("q", &toy_model::ToyParams::q);
    py::class_<toy_model::SpeedResult>(toy, "SpeedResult")
        .def_readonly("c", &toy_model::SpeedResult::c)
        .def_readonly("positive_branch", &toy_model::SpeedResult::positive_branch)
        .def_readonly("mu1", &toy_model::SpeedResult::mu1)
        .def_readonly("lambda1", &toy_model::SpeedResult::lambda1)
        .def_readonly("K_value", &toy_model::SpeedResult::K_value);
    py::class_<toy_model::CurvePoint>(toy, "CurvePoint")
        .def_readonly("tau", &toy_model::CurvePoint::tau)
        .def_readonly("c", &toy_model::CurvePoint::c)
        .def_readonly("monotone", &toy_model::CurvePoint::monotone)
        .def_readonly("in_domain", &toy_model::CurvePoint::in_domain);
    py::class_<toy_model::SpeedCurve>(toy, "SpeedCurve")
        .def_readonly("points", &toy_model::SpeedCurve::points)
        .def_readonly("positive_branch", &toy_model::SpeedCurve::positive_branch)
        .def_readonly("domain_exit_tau", &toy_model::SpeedCurve::domain_exit_tau);
    toy.def("make_params", &toy_model::make_params, py::arg("kappa"), py::arg("p"),
            py::arg("q"));
    toy.def("k_star", &toy_model::k_star, py::arg("tp"));
    toy.def("balance_closed_form", &toy_model::balance_closed_form, py::arg("tp"));
    toy.def("balance_quadrature", &toy_model::balance_quadrature, py::arg("tp"));
    toy.def("mu1", &toy_model::mu1, py::arg("tp"), py::arg("c"), py::arg("tau"));
    toy.def("lambda1", &toy_model::lambda1, py::arg("tp"), py::arg("c"), py::arg("tau"));
    toy.def("K_of_c", &toy_model::K_of_c, py::arg("tp"), py::arg("c"), py::arg("tau"));
    toy.def("wave_speed", &toy_model::wave_speed, py::arg("tp"), py::arg("tau"));
    toy.def("exact_profile", &toy_model::exact_profile, py::arg("tp"), py::arg("tau"),
            py::arg("t_grid"));
    toy.def("default_profile_grid", &toy_model::default_profile_grid, py::arg("tp"),
            py::arg("tau"), py::arg("dt") = 0.01);
    toy.def("speed_curve", &toy_model::speed_curve, py::arg("tp"), py::arg("tau_grid"),
            py::arg("jobs") = 1);

    // -------------------------------------------------------------- zoo ----
    auto zoo = m.def_submodule("model_zoo", "kinetics catalog and checks");
    py::class_<model_zoo::ModelSpec>(zoo, "ModelSpec")
        .def_readonly("domain_lo", &model_zoo::ModelSpec::domain_lo)
        .def_readonly("domain_hi", &model_zoo::ModelSpec::domain_hi)
        .def_readonly("id", &model_zoo::ModelSpec::id)
        .def_readonly("nonsmooth_v_levels", &model_zoo::ModelSpec::nonsmooth_v_levels)
        .def("g", [](const model_zoo::ModelSpec& s, double u,
                     double v) { return s.g(u, v); })
        .def("g1", [](const model_zoo::ModelSpec& s, double u,
                      double v) { return s.g1(u, v); })
        .def("g2", [](const model_zoo::ModelSpec& s, double u,
                      double v) { return s.g2(u, v); });
    py::class_<model_zoo::SteadyStates>(zoo, "SteadyStates")
        .def_readonly("e1", &model_zoo::SteadyStates::e1)
        .def_readonly("e2", &model_zoo::SteadyStates::e2)
        .def_readonly("e3", &model_zoo::SteadyStates::e3);
    py::class_<model_zoo::HypothesisReport>(zoo, "HypothesisReport")
        .def_readonly("bistable_ok", &model_zoo::HypothesisReport::bistable_ok)
        .def_readonly("unimodal_low_ok", &model_zoo::HypothesisReport::unimodal_low_ok)
        .def_readonly("unimodal_high_ok", &model_zoo::HypothesisReport::unimodal_high_ok)
        .def_readonly("subtangency_ok", &model_zoo::HypothesisReport::subtangency_ok)
        .def_readonly("integral_ok", &model_zoo::HypothesisReport::integral_ok)
        .def_readonly("integral_value", &model_zoo::HypothesisReport::integral_value)
        .def_readonly("kappa", &model_zoo::HypothesisReport::kappa)
        .def_readonly("notes", &model_zoo::HypothesisReport::notes);
    zoo.def("make_mackey_glass", &model_zoo::make_mackey_glass, py::arg("A"),
            py::arg("r"));
    zoo.def("make_virus", &model_zoo::make_virus, py::arg("amp"), py::arg("width"),
            py::arg("v0"));
    zoo.def("make_toy_smooth", &model_zoo::make_toy_smooth, py::arg("kappa"),
            py::arg("p"), py::arg("q"), py::arg("eps"));
    zoo.def("make_toy_exact", &model_zoo::make_toy_exact, py::arg("kappa"), py::arg("p"),
            py::arg("q"));
    zoo.def("make_custom_birth", &model_zoo::make_custom_birth, py::arg("coeffs"),
            py::arg("lo"), py::arg("hi"));
    zoo.def("load_config", &model_zoo::load_config, py::arg("path"));
    zoo.def("find_steady_states", &model_zoo::find_steady_states, py::arg("m"));
    zoo.def("check_hypotheses", &model_zoo::check_hypotheses, py::arg("m"), py::arg("s"));
    zoo.def("integral_over_diagonal", &model_zoo::integral_over_diagonal, py::arg("m"),
            py::arg("s"));
    zoo.def("validate_partials", &model_zoo::validate_partials, py::arg("m"));

    // ----------------------------------------------------------- solver ----
    auto ps = m.def_submodule("profile_solver", "collocation and continuation");
    py::class_<profile_solver::SolverOptions>(ps, "SolverOptions")
        .def(py::init<>())
        .def_readwrite("L", &profile_solver::SolverOptions::L)
        .def_readwrite("N", &profile_solver::SolverOptions::N)
        .def_readwrite("tol", &profile_solver::SolverOptions::tol)
        .def_readwrite("max_newton", &profile_solver::SolverOptions::max_newton)
        .def_readwrite("boundary_tol_factor",
                       &profile_solver::SolverOptions::boundary_tol_factor)
        .def_readwrite("c_init", &profile_solver::SolverOptions::c_init);
    py::enum_<profile_solver::Termination>(ps, "Termination")
        .value("reached_tau_max", profile_solver::Termination::reached_tau_max)
        .value("newton_failure", profile_solver::Termination::newton_failure)
        .value("left_domain", profile_solver::Termination::left_domain)
        .value("speed_bound_hit", profile_solver::Termination::speed_bound_hit);
    py::class_<profile_solver::ContinuationPoint>(ps, "ContinuationPoint")
        .def_readonly("tau", &profile_solver::ContinuationPoint::tau)
        .def_readonly("c", &profile_solver::ContinuationPoint::c)
        .def_readonly("monotone", &profile_solver::ContinuationPoint::monotone)
        .def_readonly("in_domain", &profile_solver::ContinuationPoint::in_domain)
        .def_readonly("residual", &profile_solver::ContinuationPoint::residual)
        .def_property_readonly("profile",
                               [](const profile_solver::ContinuationPoint& p) {
                                   return *p.profile; // copy out of the shared state
                               });
    py::class_<profile_solver::ContinuationOptions>(ps, "ContinuationOptions")
        .def(py::init<>())
        .def_readwrite("tau_max", &profile_solver::ContinuationOptions::tau_max)
        .def_readwrite("dtau_init", &profile_solver::ContinuationOptions::dtau_init)
        .def_readwrite("dtau_min", &profile_solver::ContinuationOptions::dtau_min)
        .def_readwrite("dtau_max", &profile_solver::ContinuationOptions::dtau_max)
        .def_readwrite("speed_ceiling", &profile_solver::ContinuationOptions::speed_ceiling)
        .def_readwrite("speed_floor", &profile_solver::ContinuationOptions::speed_floor)
        .def_readwrite("domain_overshoot",
                       &profile_solver::ContinuationOptions::domain_overshoot)
        .def_readwrite("solver", &profile_solver::ContinuationOptions::solver);
    py::class_<profile_solver::ContinuationCurve>(ps, "ContinuationCurve")
        .def_readonly("points", &profile_solver::ContinuationCurve::points)
        .def_readonly("termination", &profile_solver::ContinuationCurve::termination)
        .def_readonly("domain_exit_tau",
                      &profile_solver::ContinuationCurve::domain_exit_tau);
    ps.def("solve_nondelayed", &profile_solver::solve_nondelayed, py::arg("m"),
           py::arg("s"), py::arg("opt") = profile_solver::SolverOptions{});
    ps.def("solve_delayed", &profile_solver::solve_delayed, py::arg("m"), py::arg("s"),
           py::arg("tau"), py::arg("seed"),
           py::arg("opt") = profile_solver::SolverOptions{});
    ps.def("continue_in_tau", &profile_solver::continue_in_tau, py::arg("m"),
           py::arg("s"), py::arg("start"), py::arg("opt"));
    ps.def("refine", &profile_solver::refine, py::arg("m"), py::arg("s"), py::arg("w"),
           py::arg("N_new"), py::arg("L_new"),
           py::arg("opt") = profile_solver::SolverOptions{});

    // ------------------------------------------------------------ audit ----
    auto wv = m.def_submodule("wave_verify", "a-posteriori profile checks");
    py::class_<wave_verify::ExponentFit>(wv, "ExponentFit")
        .def_readonly("rate", &wave_verify::ExponentFit::rate)
        .def_readonly("r_squared", &wave_verify::ExponentFit::r_squared)
        .def_readonly("points", &wave_verify::ExponentFit::points)
        .def_readonly("reliable", &wave_verify::ExponentFit::reliable)
        .def_readonly("note", &wave_verify::ExponentFit::note);
    py::class_<wave_verify::VerifyReport>(wv, "VerifyReport")
        .def_readonly("residual_inf", &wave_verify::VerifyReport::residual_inf)
        .def_readonly("residual_nodes_skipped",
                      &wave_verify::VerifyReport::residual_nodes_skipped)
        .def_readonly("monotone", &wave_verify::VerifyReport::monotone)
        .def_readonly("first_nonmonotone_t",
                      &wave_verify::VerifyReport::first_nonmonotone_t)
        .def_readonly("tail_sign_changes", &wave_verify::VerifyReport::tail_sign_changes)
        .def_readonly("left_fit", &wave_verify::VerifyReport::left_fit)
        .def_readonly("right_fit", &wave_verify::VerifyReport::right_fit)
        .def_readonly("predicted_left", &wave_verify::VerifyReport::predicted_left)
        .def_readonly("predicted_right", &wave_verify::VerifyReport::predicted_right)
        .def_readonly("right_multiplicity",
                      &wave_verify::VerifyReport::right_multiplicity);
    wv.def("verify", &wave_verify::verify, py::arg("w"), py::arg("m"), py::arg("s"));

    // -------------------------------------------------------------- sim ----
    auto sim = m.def_submodule("pde_sim", "method-of-lines initial value runs");
    py::class_<pde_sim::SimConfig> simcfg(sim, "SimConfig");
    py::enum_<pde_sim::SimConfig::Ic>(simcfg, "Ic")
        .value("step", pde_sim::SimConfig::Ic::step)
        .value("profile", pde_sim::SimConfig::Ic::profile);
    simcfg.def(py::init<>())
        .def_readwrite("x_max", &pde_sim::SimConfig::x_max)
        .def_readwrite("nx", &pde_sim::SimConfig::nx)
        .def_readwrite("dt", &pde_sim::SimConfig::dt)
        .def_readwrite("t_final", &pde_sim::SimConfig::t_final)
        .def_readwrite("tau", &pde_sim::SimConfig::tau)
        .def_readwrite("x0", &pde_sim::SimConfig::x0)
        .def_readwrite("output_every", &pde_sim::SimConfig::output_every)
        .def_readwrite("ic", &pde_sim::SimConfig::ic)
        .def_readwrite("seed_t", &pde_sim::SimConfig::seed_t)
        .def_readwrite("seed_phi", &pde_sim::SimConfig::seed_phi)
        .def_readwrite("snapshot_every", &pde_sim::SimConfig::snapshot_every);
    py::class_<pde_sim::Snapshot>(sim, "Snapshot")
        .def_readonly("time", &pde_sim::Snapshot::time)
        .def_readonly("u", &pde_sim::Snapshot::u);
    py::class_<pde_sim::SimResult>(sim, "SimResult")
        .def_readonly("x", &pde_sim::SimResult::x)
        .def_readonly("front_time", &pde_sim::SimResult::front_time)
        .def_readonly("front_position", &pde_sim::SimResult::front_position)
        .def_readonly("measured_speed", &pde_sim::SimResult::measured_speed)
        .def_readonly("fit_r2", &pde_sim::SimResult::fit_r2)
        .def_readonly("oscillation_flag", &pde_sim::SimResult::oscillation_flag)
        .def_readonly("snapshots", &pde_sim::SimResult::snapshots);
    sim.def("simulate", &pde_sim::simulate, py::arg("m"), py::arg("s"), py::arg("cfg"));
}
