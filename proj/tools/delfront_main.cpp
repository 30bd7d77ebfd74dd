#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "delfront/errors.hpp"
#include "delfront/io.hpp"
#include "delfront/model_zoo.hpp"
#include "delfront/pde_sim.hpp"
#include "delfront/profile_solver.hpp"
#include "delfront/quasipoly.hpp"
#include "delfront/stability_domain.hpp"
#include "delfront/toy_model.hpp"
#include "delfront/version.hpp"
#include "delfront/wave_verify.hpp"

namespace {

using delfront::ArgumentError;
using delfront::IoError;
using delfront::ModelError;
using delfront::SolverError;
using delfront::io::fmt17;

struct Ctx {
    std::string out_dir = ".";
    int jobs = 1;
    delfront::io::RunManifest manifest;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    std::string path(const std::string& name) const {
        const std::filesystem::path p(name);
        if (p.is_absolute()) return name;
        return (std::filesystem::path(out_dir) / p).string();
    }

    std::ofstream open_out(const std::string& name) {
        const std::string full = path(name);
        std::ofstream os(full);
        if (!os) throw IoError("cannot write output file: " + full);
        manifest.outputs.push_back(full);
        return os;
    }

    void param(const std::string& k, const std::string& v) { manifest.parameters[k] = v; }
    void param(const std::string& k, double v) { manifest.parameters[k] = fmt17(v); }
    void param(const std::string& k, int v) { manifest.parameters[k] = std::to_string(v); }

    void finish(const std::string& command) {
        manifest.command = command;
        manifest.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                .count();
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        delfront::io::write_manifest(path(command + "_manifest.json"), manifest);
    }
};

std::vector<double> parse_grid(const std::string& s) {
    double a = 0.0, b = 0.0, st = 0.0;
    if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &a, &b, &st) != 3)
        throw ArgumentError("grid must be start:stop:step, got '" + s + "'");
    if (!(st > 0.0) || b < a) throw ArgumentError("grid needs stop >= start and step > 0");
    std::vector<double> g;
    const int n = static_cast<int>(std::floor((b - a) / st + 1e-9));
    for (int i = 0; i <= n; ++i) g.push_back(a + i * st);
    return g;
}

void write_gnuplot(Ctx& ctx, const std::string& csv_name, const std::string& title,
                   const std::string& using_cols) {
    auto os = ctx.open_out(csv_name + ".gp");
    os << "set datafile separator ','\n"
       << "set key top right\n"
       << "plot '" << csv_name << "' using " << using_cols << " with lines title '"
       << title << "'\n";
}

nlohmann::ordered_json fit_json(const std::optional<delfront::wave_verify::ExponentFit>& f) {
    if (!f) return nullptr;
    nlohmann::ordered_json j;
    j["rate"] = f->rate;
    j["r_squared"] = f->r_squared;
    j["points"] = f->points;
    j["reliable"] = f->reliable;
    j["note"] = f->note;
    return j;
}

nlohmann::ordered_json report_json(const delfront::wave_verify::VerifyReport& r) {
    nlohmann::ordered_json j;
    j["residual_inf"] = r.residual_inf;
    j["residual_nodes_skipped"] = r.residual_nodes_skipped;
    j["monotone"] = r.monotone;
    j["first_nonmonotone_t"] =
        r.first_nonmonotone_t ? nlohmann::ordered_json(*r.first_nonmonotone_t) : nullptr;
    j["tail_sign_changes"] = r.tail_sign_changes;
    j["left_fit"] = fit_json(r.left_fit);
    j["right_fit"] = fit_json(r.right_fit);
    j["predicted_left"] = r.predicted_left;
    j["predicted_right"] = r.predicted_right;
    j["right_multiplicity"] = r.right_multiplicity;
    return j;
}

void print_hypothesis_notes(const delfront::model_zoo::HypothesisReport& h) {
    for (const auto& n : h.notes) std::cout << "note: " << n << "\n";
}

// ---------------------------------------------------------------- roots ----

struct RootsArgs {
    double a = 0.0, b = 0.0, c = 0.0, h = 0.0;
    std::vector<double> window;
};

int cmd_roots(Ctx& ctx, const RootsArgs& a) {
    delfront::quasipoly::CharParams p{a.a, a.b, a.c, a.h};
    std::optional<delfront::quasipoly::Window> w;
    if (!a.window.empty())
        w = delfront::quasipoly::Window{a.window[0], a.window[1], a.window[2]};
    const auto rep = delfront::quasipoly::analyze(p, w);

    nlohmann::ordered_json j;
    j["real_roots"] = nlohmann::ordered_json::array();
    for (const auto& r : rep.real_roots)
        j["real_roots"].push_back({{"value", r.value}, {"multiplicity", r.multiplicity}});
    j["complex_pairs_in_window"] = rep.complex_pairs_in_window;
    j["window"] = {{"re_min", rep.window.re_min},
                   {"re_max", rep.window.re_max},
                   {"im_max", rep.window.im_max}};
    j["dominant_real"] =
        rep.dominant_real ? nlohmann::ordered_json(*rep.dominant_real) : nullptr;
    std::cout << j.dump(2) << "\n";

    ctx.param("a", a.a);
    ctx.param("b", a.b);
    ctx.param("c", a.c);
    ctx.param("h", a.h);
    ctx.finish("roots");
    return 0;
}

// --------------------------------------------------------------- domain ----

struct DomainArgs {
    double a = -1.0, b = -1.0, tau_max = 6.0;
    int points = 200;
    std::string out = "domain_boundary.csv";
    bool gnuplot = false;
};

int cmd_domain(Ctx& ctx, const DomainArgs& a) {
    const auto p = delfront::stability_domain::make_params(a.a, a.b);
    const auto th = delfront::stability_domain::theta_point(p);
    const double ts = delfront::stability_domain::tau_sharp(p);
    const auto curve =
        delfront::stability_domain::trace_boundary(p, a.tau_max, a.points, ctx.jobs);

    {
        auto os = ctx.open_out(a.out);
        os << "tau,clin\n";
        for (const auto& pt : curve.points)
            os << fmt17(pt.tau) << ','
               << (pt.clin_value ? fmt17(*pt.clin_value) : "inf") << '\n';
    }
    if (a.gnuplot) write_gnuplot(ctx, a.out, "critical speed", "1:2");

    std::cout << "tau_sharp = " << fmt17(ts) << "\n"
              << "omega = " << fmt17(th.omega) << "\n"
              << "theta = " << fmt17(th.theta) << "\n";
    ctx.param("a", a.a);
    ctx.param("b", a.b);
    ctx.param("tau_max", a.tau_max);
    ctx.param("points", a.points);
    ctx.param("tau_sharp", ts);
    ctx.param("omega", th.omega);
    ctx.param("theta", th.theta);
    ctx.finish("domain");
    return 0;
}

// ------------------------------------------------------------------ toy ----

struct ToyArgs {
    double kappa = 0.0, p = 0.0, q = 0.0;
    std::optional<double> tau;
    std::string tau_grid;
    std::string out = "toy_speeds.csv";
    std::string profile_out;
    bool gnuplot = false;
};

int cmd_toy(Ctx& ctx, const ToyArgs& a) {
    const auto tp = delfront::toy_model::make_params(a.kappa, a.p, a.q);
    if (a.tau_grid.empty() && !a.tau)
        throw ArgumentError("pass either --tau or --tau-grid");
    if (!a.profile_out.empty() && !a.tau)
        throw ArgumentError("--profile-out needs a single --tau");

    const std::vector<double> grid =
        a.tau ? std::vector<double>{*a.tau} : parse_grid(a.tau_grid);
    const auto curve = delfront::toy_model::speed_curve(tp, grid, ctx.jobs);

    {
        auto os = ctx.open_out(a.out);
        os << "tau,c,monotone\n";
        for (const auto& pt : curve.points)
            os << fmt17(pt.tau) << ',' << fmt17(pt.c) << ',' << (pt.monotone ? 1 : 0)
               << '\n';
    }
    if (a.gnuplot) write_gnuplot(ctx, a.out, "wave speed", "1:2");

    std::cout << "branch = " << (curve.positive_branch ? "positive" : "negative") << "\n";
    if (curve.domain_exit_tau)
        std::cout << "domain_exit_tau = " << fmt17(*curve.domain_exit_tau) << "\n";

    if (!a.profile_out.empty()) {
        const auto g = delfront::toy_model::default_profile_grid(tp, *a.tau);
        const auto w = delfront::toy_model::exact_profile(tp, *a.tau, g);
        auto os = ctx.open_out(a.profile_out);
        delfront::io::write_profile_csv(os, w);
        std::cout << "c = " << fmt17(w.c) << "\n";
    } else {
        std::cout << "c(" << fmt17(grid.back()) << ") = " << fmt17(curve.points.back().c)
                  << "\n";
    }

    ctx.param("kappa", a.kappa);
    ctx.param("p", a.p);
    ctx.param("q", a.q);
    if (a.tau) ctx.param("tau", *a.tau);
    if (!a.tau_grid.empty()) ctx.param("tau_grid", a.tau_grid);
    if (curve.domain_exit_tau) ctx.param("domain_exit_tau", *curve.domain_exit_tau);
    ctx.finish("toy");
    return 0;
}

// ---------------------------------------------------------------- front ----

struct SolveArgs {
    std::string model;
    double tau = 0.0;
    double L = 40.0;
    int N = 2000;
    double tol = 1e-8;
    std::optional<double> c_init;
};

delfront::profile_solver::SolverOptions solver_options(const SolveArgs& a) {
    delfront::profile_solver::SolverOptions o;
    o.L = a.L;
    o.N = a.N;
    o.tol = a.tol;
    o.c_init = a.c_init;
    return o;
}

delfront::WaveProfile solve_at_tau(const delfront::model_zoo::ModelSpec& m,
                                   const delfront::model_zoo::SteadyStates& s,
                                   double tau,
                                   const delfront::profile_solver::SolverOptions& o) {
    const auto w0 = delfront::profile_solver::solve_nondelayed(m, s, o);
    if (tau == 0.0) return w0;
    delfront::profile_solver::ContinuationOptions copt;
    copt.tau_max = tau;
    copt.domain_overshoot = 1e18; // fronts past the boundary are still wanted here
    copt.solver = o;
    const auto curve = delfront::profile_solver::continue_in_tau(m, s, w0, copt);
    if (curve.termination != delfront::profile_solver::Termination::reached_tau_max)
        throw SolverError("continuation stopped before the requested delay");
    return *curve.points.back().profile;
}

struct FrontArgs : SolveArgs {
    std::string out = "front_profile.csv";
    std::string report_out = "front_report.json";
};

int cmd_front(Ctx& ctx, const FrontArgs& a) {
    const auto m = delfront::model_zoo::load_config(a.model);
    const auto s = delfront::model_zoo::find_steady_states(m);
    const auto hyp = delfront::model_zoo::check_hypotheses(m, s);
    print_hypothesis_notes(hyp);

    const auto w = solve_at_tau(m, s, a.tau, solver_options(a));
    const auto rep = delfront::wave_verify::verify(w, m, s);

    {
        auto os = ctx.open_out(a.out);
        delfront::io::write_profile_csv(os, w);
    }
    {
        auto os = ctx.open_out(a.report_out);
        nlohmann::ordered_json j = report_json(rep);
        j["c"] = w.c;
        j["tau"] = w.tau;
        os << j.dump(2) << '\n';
    }
    std::cout << "c = " << fmt17(w.c) << "\n"
              << "solver_residual = " << fmt17(w.residual_inf) << "\n"
              << "audit_residual = " << fmt17(rep.residual_inf) << "\n"
              << "monotone = " << (rep.monotone ? 1 : 0) << "\n";

    ctx.param("model", a.model);
    ctx.param("tau", a.tau);
    ctx.param("L", a.L);
    ctx.param("N", a.N);
    ctx.param("tol", a.tol);
    ctx.param("c", w.c);
    ctx.finish("front");
    return 0;
}

// ---------------------------------------------------------------- sweep ----

struct SweepArgs : SolveArgs {
    double tau_max = 6.0;
    double dtau_init = 0.05;
    double dtau_max = 0.1;
    double overshoot = 0.5;
    double speed_floor = 1e-3;
    double speed_ceiling = 50.0;
    std::string out = "sweep_curve.csv";
    bool gnuplot = false;
};

int cmd_sweep(Ctx& ctx, const SweepArgs& a) {
    const auto m = delfront::model_zoo::load_config(a.model);
    const auto s = delfront::model_zoo::find_steady_states(m);
    const auto hyp = delfront::model_zoo::check_hypotheses(m, s);
    print_hypothesis_notes(hyp);

    const auto o = solver_options(a);
    const auto w0 = delfront::profile_solver::solve_nondelayed(m, s, o);
    delfront::profile_solver::ContinuationOptions copt;
    copt.tau_max = a.tau_max;
    copt.dtau_init = a.dtau_init;
    copt.dtau_max = a.dtau_max;
    copt.domain_overshoot = a.overshoot;
    copt.speed_floor = a.speed_floor;
    copt.speed_ceiling = a.speed_ceiling;
    copt.solver = o;
    const auto curve = delfront::profile_solver::continue_in_tau(m, s, w0, copt);

    {
        auto os = ctx.open_out(a.out);
        os << "tau,c,monotone,residual\n";
        for (const auto& pt : curve.points)
            os << fmt17(pt.tau) << ',' << fmt17(pt.c) << ',' << (pt.monotone ? 1 : 0)
               << ',' << fmt17(pt.residual) << '\n';
    }
    if (a.gnuplot) write_gnuplot(ctx, a.out, "speed vs delay", "1:2");

    const char* term = "reached_tau_max";
    switch (curve.termination) {
        case delfront::profile_solver::Termination::reached_tau_max: break;
        case delfront::profile_solver::Termination::newton_failure:
            term = "newton_failure";
            break;
        case delfront::profile_solver::Termination::left_domain:
            term = "left_domain";
            break;
        case delfront::profile_solver::Termination::speed_bound_hit:
            term = "speed_bound_hit";
            break;
    }
    std::cout << "termination = " << term << "\n"
              << "points = " << curve.points.size() << "\n";
    if (curve.domain_exit_tau)
        std::cout << "domain_exit_tau = " << fmt17(*curve.domain_exit_tau) << "\n";

    ctx.param("model", a.model);
    ctx.param("tau_max", a.tau_max);
    ctx.param("termination", term);
    if (curve.domain_exit_tau) ctx.param("domain_exit_tau", *curve.domain_exit_tau);
    ctx.finish("sweep");
    if (curve.termination == delfront::profile_solver::Termination::newton_failure)
        throw SolverError("continuation aborted: Newton could not converge past tau = " +
                          fmt17(curve.points.back().tau));
    return 0;
}

// ------------------------------------------------------------- simulate ----

struct SimArgs {
    std::string model;
    double tau = 0.0;
    double x_max = 400.0;
    int nx = 4001;
    double dt = 0.0;
    double t_final = 120.0;
    double x0 = 80.0;
    double output_every = 0.5;
    std::optional<double> snapshot_every;
    std::string ic = "step";
    std::string seed;
    std::string out = "sim_final.csv";
    std::string summary_out = "sim_summary.csv";
};

int cmd_simulate(Ctx& ctx, const SimArgs& a) {
    const auto m = delfront::model_zoo::load_config(a.model);
    const auto s = delfront::model_zoo::find_steady_states(m);

    delfront::pde_sim::SimConfig cfg;
    cfg.x_max = a.x_max;
    cfg.nx = a.nx;
    cfg.dt = a.dt;
    cfg.t_final = a.t_final;
    cfg.tau = a.tau;
    cfg.x0 = a.x0;
    cfg.output_every = a.output_every;
    cfg.snapshot_every = a.snapshot_every;
    if (a.ic == "profile") {
        if (a.seed.empty()) throw ArgumentError("--ic profile needs --seed <profile.csv>");
        const auto w = delfront::io::read_profile_csv(a.seed);
        cfg.ic = delfront::pde_sim::SimConfig::Ic::profile;
        cfg.seed_t = w.t;
        cfg.seed_phi = w.phi;
    } else if (a.ic != "step") {
        throw ArgumentError("--ic must be step or profile");
    }

    const auto r = delfront::pde_sim::simulate(m, s, cfg);

    const auto write_state = [&](std::ofstream os, const std::vector<double>& u) {
        os << "x,u\n";
        for (std::size_t i = 0; i < u.size(); ++i)
            os << fmt17(r.x[i]) << ',' << fmt17(u[i]) << '\n';
    };
    if (a.snapshot_every) {
        for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
            char name[32];
            std::snprintf(name, sizeof name, "snapshot_%03zu.csv", k);
            write_state(ctx.open_out(name), r.snapshots[k].u);
        }
    }
    write_state(ctx.open_out(a.out), r.snapshots.back().u);
    {
        auto os = ctx.open_out(a.summary_out);
        os << "tau,measured_speed,oscillation_flag\n";
        os << fmt17(a.tau) << ',' << fmt17(r.measured_speed) << ','
           << (r.oscillation_flag ? 1 : 0) << '\n';
    }

    std::cout << "measured_speed = " << fmt17(r.measured_speed) << "\n"
              << "fit_r2 = " << fmt17(r.fit_r2) << "\n"
              << "oscillation = " << (r.oscillation_flag ? 1 : 0) << "\n";

    ctx.param("model", a.model);
    ctx.param("tau", a.tau);
    ctx.param("x_max", a.x_max);
    ctx.param("nx", a.nx);
    ctx.param("t_final", a.t_final);
    ctx.param("measured_speed", r.measured_speed);
    ctx.param("fit_r2", r.fit_r2);
    ctx.finish("simulate");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"traveling wavefronts of delayed reaction-diffusion equations"};
    app.set_help_flag("--help", "print this help and exit"); // frees -h / --h
    app.set_version_flag("--version", std::string(DELFRONT_VERSION));
    app.require_subcommand(1);

    Ctx ctx;
    app.add_option("--out-dir", ctx.out_dir, "directory for output files and manifests")
        ->envname("DELFRONT_OUTDIR");
    app.add_option("--jobs", ctx.jobs, "worker cap for parallel grid evaluation")
        ->check(CLI::Range(1, 256));

    RootsArgs ra;
    auto* roots = app.add_subcommand("roots", "classify characteristic roots");
    roots->set_help_flag("--help", "print this help and exit");
    roots->add_option("--a", ra.a, "g_u at the rest state")->required();
    roots->add_option("--b", ra.b, "g_v at the rest state")->required();
    roots->add_option("--c", ra.c, "wave speed (positive)")->required();
    roots->add_option("--h", ra.h, "delay in the moving frame, c*tau")->required();
    roots->add_option("--window", ra.window,
                      "re_min re_max im_max for the complex count")
        ->expected(3);

    DomainArgs da;
    auto* domain = app.add_subcommand("domain", "trace the critical-speed boundary");
    domain->add_option("--a", da.a, "g_u at the invaded state")->required();
    domain->add_option("--b", da.b, "g_v at the invaded state")->required();
    domain->add_option("--tau-max", da.tau_max, "right end of the delay range")
        ->required();
    domain->add_option("--points", da.points, "samples on the boundary");
    domain->add_option("--out", da.out, "boundary CSV (tau,clin)");
    domain->add_flag("--gnuplot", da.gnuplot, "emit a plot script next to the CSV");

    ToyArgs ta;
    auto* toy = app.add_subcommand("toy", "closed-form two-slope family");
    toy->add_option("--kappa", ta.kappa, "threshold of the birth function")->required();
    toy->add_option("--p", ta.p, "lower slope")->required();
    toy->add_option("--q", ta.q, "upper slope (negative)")->required();
    auto* tau_opt = toy->add_option("--tau", ta.tau, "single delay");
    toy->add_option("--tau-grid", ta.tau_grid, "delay grid start:stop:step")
        ->excludes(tau_opt);
    toy->add_option("--out", ta.out, "speed curve CSV (tau,c,monotone)");
    toy->add_option("--profile-out", ta.profile_out, "exact profile CSV (needs --tau)");
    toy->add_flag("--gnuplot", ta.gnuplot, "emit a plot script next to the CSV");

    FrontArgs fa;
    auto* front = app.add_subcommand("front", "solve one wavefront profile");
    front->add_option("--model", fa.model, "model config file")->required();
    front->add_option("--tau", fa.tau, "delay");
    front->add_option("--L", fa.L, "half-width of the collocation window");
    front->add_option("--N", fa.N, "collocation intervals (even)");
    front->add_option("--tol", fa.tol, "Newton residual target");
    front->add_option("--c-init", fa.c_init, "initial speed guess");
    front->add_option("--out", fa.out, "profile CSV (t,phi)");
    front->add_option("--report-out", fa.report_out, "verification report JSON");

    SweepArgs wa;
    auto* sweep = app.add_subcommand("sweep", "continue the front in the delay");
    sweep->add_option("--model", wa.model, "model config file")->required();
    sweep->add_option("--tau-max", wa.tau_max, "largest delay to reach");
    sweep->add_option("--L", wa.L, "half-width of the collocation window");
    sweep->add_option("--N", wa.N, "collocation intervals (even)");
    sweep->add_option("--tol", wa.tol, "Newton residual target");
    sweep->add_option("--c-init", wa.c_init, "initial speed guess");
    sweep->add_option("--dtau-init", wa.dtau_init, "first continuation step");
    sweep->add_option("--dtau-max", wa.dtau_max, "largest continuation step");
    sweep->add_option("--overshoot", wa.overshoot, "delay to keep going past the boundary");
    sweep->add_option("--speed-floor", wa.speed_floor, "stop when |c| drops below this");
    sweep->add_option("--speed-ceiling", wa.speed_ceiling, "stop when |c| exceeds this");
    sweep->add_option("--out", wa.out, "curve CSV (tau,c,monotone,residual)");
    sweep->add_flag("--gnuplot", wa.gnuplot, "emit a plot script next to the CSV");

    SimArgs sa;
    auto* simc = app.add_subcommand("simulate", "method-of-lines initial value run");
    simc->add_option("--model", sa.model, "model config file")->required();
    simc->add_option("--tau", sa.tau, "delay");
    simc->add_option("--x-max", sa.x_max, "domain length");
    simc->add_option("--nx", sa.nx, "grid points");
    simc->add_option("--dt", sa.dt, "time step (0 picks 0.4*dx^2)");
    simc->add_option("--t-final", sa.t_final, "end time");
    simc->add_option("--x0", sa.x0, "initial interface location");
    simc->add_option("--output-every", sa.output_every, "front sampling interval");
    simc->add_option("--snapshot-every", sa.snapshot_every, "state dump interval");
    simc->add_option("--ic", sa.ic, "initial condition: step or profile");
    simc->add_option("--seed", sa.seed, "profile CSV for --ic profile");
    simc->add_option("--out", sa.out, "final state CSV (x,u)");
    simc->add_option("--summary-out", sa.summary_out, "summary CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        std::cout << DELFRONT_VERSION << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        std::error_code ec;
        std::filesystem::create_directories(ctx.out_dir, ec);
        if (app.got_subcommand(roots)) return cmd_roots(ctx, ra);
        if (app.got_subcommand(domain)) return cmd_domain(ctx, da);
        if (app.got_subcommand(toy)) return cmd_toy(ctx, ta);
        if (app.got_subcommand(front)) return cmd_front(ctx, fa);
        if (app.got_subcommand(sweep)) return cmd_sweep(ctx, wa);
        if (app.got_subcommand(simc)) return cmd_simulate(ctx, sa);
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ModelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    }
    return 0;
}
