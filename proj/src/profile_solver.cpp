#include "delfront/profile_solver.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "delfront/detail/numeric.hpp"
#include "delfront/errors.hpp"
#include "delfront/quasipoly.hpp"
#include "delfront/stability_domain.hpp"

namespace delfront::profile_solver {
namespace {

using model_zoo::ModelSpec;
using model_zoo::SteadyStates;

struct Grid {
    double L = 0.0;
    int N = 0;
    double dt = 0.0;
    std::vector<double> t;
    int phase = 0; // index of the t = 0 node
};

Grid make_grid(const SolverOptions& opt) {
    if (!std::isfinite(opt.L) || !(opt.L > 0.0))
        throw ArgumentError("solver half-width L must be positive");
    if (opt.N < 16 || opt.N % 2 != 0)
        throw ArgumentError("solver N must be even and >= 16");
    if (!(opt.tol > 0.0)) throw ArgumentError("solver tol must be positive");
    if (opt.max_newton < 1) throw ArgumentError("solver max_newton must be >= 1");
    if (!(opt.boundary_tol_factor > 0.0))
        throw ArgumentError("solver boundary_tol_factor must be positive");
    Grid g;
    g.L = opt.L;
    g.N = opt.N;
    g.dt = 2.0 * opt.L / opt.N;
    g.t.resize(opt.N + 1);
    for (int i = 0; i <= opt.N; ++i) g.t[i] = -opt.L + g.dt * i;
    g.phase = opt.N / 2;
    g.t[g.phase] = 0.0;
    return g;
}

// boundary decay rates of the linearization: dominant positive root on the
// e1 side, slowest negative real root on the e3 side with the no-delay
// quadratic as fallback where the real root pair has left the axis
struct TailRates {
    double left = 0.0;
    double right = 0.0;
};

TailRates tail_rates(const ModelSpec& m, const SteadyStates& s, double c, double h) {
    TailRates r;
    const quasipoly::CharParams pl{m.g1(s.e1, s.e1), m.g2(s.e1, s.e1), c, h};
    r.left = quasipoly::dominant_positive_root(pl);
    const quasipoly::CharParams pr{m.g1(s.e3, s.e3), m.g2(s.e3, s.e3), c, h};
    r.right = std::numeric_limits<double>::quiet_NaN();
    try {
        const auto rr =
            quasipoly::real_roots(pr, quasipoly::real_scan_left_edge(pr), -1e-12);
        if (!rr.empty()) r.right = rr.back().value;
    } catch (const std::exception&) {
    }
    if (!std::isfinite(r.right)) {
        const double ab = pr.a + pr.b;
        if (!(ab < 0.0))
            throw ModelError("e3 is not linearly stable: g1 + g2 >= 0 there");
        r.right = 0.5 * (c - std::sqrt(c * c - 4.0 * ab));
    }
    return r;
}

// Lagrange basis of a 4-node uniform stencil at offset sfrac in [0, 3]
void cubic_weights(double sfrac, double w[4]) {
    w[0] = -(sfrac - 1.0) * (sfrac - 2.0) * (sfrac - 3.0) / 6.0;
    w[1] = sfrac * (sfrac - 2.0) * (sfrac - 3.0) / 2.0;
    w[2] = -sfrac * (sfrac - 1.0) * (sfrac - 3.0) / 2.0;
    w[3] = sfrac * (sfrac - 1.0) * (sfrac - 2.0) / 6.0;
}

// delayed value with its dependence pattern: either a 4-column interpolation
// stencil or a single boundary column through the tail extension
struct DelayRef {
    double value = 0.0;
    int col0 = -1;
    double w[4] = {0, 0, 0, 0};
    int tail = 0;          // -1: left extension, +1: right extension
    double tail_coef = 0.0; // d value / d phi[boundary node]
};

DelayRef delayed_value(const Grid& g, const std::vector<double>& phi,
                       const SteadyStates& s, const TailRates& r, double x) {
    DelayRef d;
    if (x < g.t.front()) {
        d.tail = -1;
        d.tail_coef = std::exp(r.left * (x - g.t.front()));
        d.value = s.e1 + (phi.front() - s.e1) * d.tail_coef;
        return d;
    }
    if (x > g.t.back()) {
        d.tail = 1;
        d.tail_coef = std::exp(r.right * (x - g.t.back()));
        d.value = s.e3 + (phi.back() - s.e3) * d.tail_coef;
        return d;
    }
    const double sidx = (x - g.t.front()) / g.dt;
    int j = static_cast<int>(std::floor(sidx));
    j = std::clamp(j, 0, g.N - 1);
    const int lo = std::clamp(j - 1, 0, g.N - 3);
    cubic_weights(sidx - lo, d.w);
    d.col0 = lo;
    d.value = d.w[0] * phi[lo] + d.w[1] * phi[lo + 1] + d.w[2] * phi[lo + 2] +
              d.w[3] * phi[lo + 3];
    return d;
}

struct Problem {
    const ModelSpec& m;
    const SteadyStates& s;
    const Grid& g;
    double tau = 0.0;
};

Eigen::VectorXd eval_residual(const Problem& pb, const Eigen::VectorXd& X) {
    const int N = pb.g.N;
    const double c = X[N + 1];
    if (!std::isfinite(c)) throw SolverError("wave speed became non-finite");
    const double h = c * pb.tau;
    const TailRates r = tail_rates(pb.m, pb.s, c, h);
    const std::vector<double> phi(X.data(), X.data() + N + 1);
    const double dt = pb.g.dt;

    Eigen::VectorXd F(N + 2);
    for (int i = 1; i < N; ++i) {
        const DelayRef d = delayed_value(pb.g, phi, pb.s, r, pb.g.t[i] - h);
        F[i] = (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) / (dt * dt) -
               c * (phi[i + 1] - phi[i - 1]) / (2.0 * dt) + pb.m.g(phi[i], d.value);
    }
    F[0] = (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * dt) -
           r.left * (phi[0] - pb.s.e1);
    F[N] = (3.0 * phi[N] - 4.0 * phi[N - 1] + phi[N - 2]) / (2.0 * dt) -
           r.right * (phi[N] - pb.s.e3);
    F[N + 1] = phi[pb.g.phase] - 0.5 * (pb.s.e1 + pb.s.e2);
    return F;
}

Eigen::SparseMatrix<double> build_jacobian(const Problem& pb, const Eigen::VectorXd& X) {
    const int N = pb.g.N;
    const double c = X[N + 1];
    const double h = c * pb.tau;
    const TailRates r = tail_rates(pb.m, pb.s, c, h);
    const std::vector<double> phi(X.data(), X.data() + N + 1);
    const double dt = pb.g.dt;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(9) * (N + 2));
    for (int i = 1; i < N; ++i) {
        const DelayRef d = delayed_value(pb.g, phi, pb.s, r, pb.g.t[i] - h);
        const double g2 = pb.m.g2(phi[i], d.value);
        trip.emplace_back(i, i - 1, 1.0 / (dt * dt) + c / (2.0 * dt));
        trip.emplace_back(i, i, -2.0 / (dt * dt) + pb.m.g1(phi[i], d.value));
        trip.emplace_back(i, i + 1, 1.0 / (dt * dt) - c / (2.0 * dt));
        if (d.col0 >= 0) {
            for (int k = 0; k < 4; ++k)
                if (d.w[k] != 0.0) trip.emplace_back(i, d.col0 + k, g2 * d.w[k]);
        } else {
            trip.emplace_back(i, d.tail < 0 ? 0 : N, g2 * d.tail_coef);
        }
    }
    trip.emplace_back(0, 0, -3.0 / (2.0 * dt) - r.left);
    trip.emplace_back(0, 1, 4.0 / (2.0 * dt));
    trip.emplace_back(0, 2, -1.0 / (2.0 * dt));
    trip.emplace_back(N, N, 3.0 / (2.0 * dt) - r.right);
    trip.emplace_back(N, N - 1, -4.0 / (2.0 * dt));
    trip.emplace_back(N, N - 2, 1.0 / (2.0 * dt));
    trip.emplace_back(N + 1, pb.g.phase, 1.0);

    // speed column by central differences through the full residual; this
    // also picks up the c-dependence of the boundary rates and of the
    // delayed-argument shift
    const double dc = 1e-7 * std::max(1.0, std::abs(c));
    Eigen::VectorXd Xp = X, Xm = X;
    Xp[N + 1] += dc;
    Xm[N + 1] -= dc;
    const Eigen::VectorXd col = (eval_residual(pb, Xp) - eval_residual(pb, Xm)) / (2.0 * dc);
    for (int i = 0; i < N + 2; ++i)
        if (col[i] != 0.0) trip.emplace_back(i, N + 1, col[i]);

    Eigen::SparseMatrix<double> J(N + 2, N + 2);
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
}

WaveProfile newton_solve(const Problem& pb, std::vector<double> phi0, double c0,
                         const SolverOptions& opt) {
    const int N = pb.g.N;
    Eigen::VectorXd X(N + 2);
    for (int i = 0; i <= N; ++i) X[i] = phi0[i];
    X[N + 1] = c0;

    Eigen::VectorXd F = eval_residual(pb, X);
    double fn = F.lpNorm<Eigen::Infinity>();
    double f2 = F.norm();

    // backtracking measures progress in the 2-norm (smooth under max-node
    // switching); the convergence target stays a sup norm
    for (int it = 0; it < opt.max_newton && fn > opt.tol; ++it) {
        const Eigen::SparseMatrix<double> J = build_jacobian(pb, X);
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(J);
        if (lu.info() != Eigen::Success)
            throw SolverError("collocation matrix factorization failed");
        const Eigen::VectorXd dX = lu.solve(-F);
        if (lu.info() != Eigen::Success)
            throw SolverError("collocation linear solve failed");

        bool accepted = false;
        double lambda = 1.0;
        for (int ls = 0; ls <= 30; ++ls) {
            const Eigen::VectorXd Xt = X + lambda * dX;
            try {
                const Eigen::VectorXd Ft = eval_residual(pb, Xt);
                const double ft2 = Ft.norm();
                if (ft2 < (1.0 - 0.25 * lambda) * f2) {
                    X = Xt;
                    F = Ft;
                    fn = F.lpNorm<Eigen::Infinity>();
                    f2 = ft2;
                    accepted = true;
                    break;
                }
            } catch (const std::exception&) {
                // step left the evaluable region; shorten it
            }
            lambda *= 0.5;
        }
        if (!accepted) throw SolverError("collocation line search stalled");
    }
    if (fn > opt.tol)
        throw SolverError("collocation Newton did not reach the residual target");

    const double span = pb.s.e3 - pb.s.e1;
    const double btol = opt.boundary_tol_factor * span;
    if (std::abs(X[0] - pb.s.e1) > btol || std::abs(X[N] - pb.s.e3) > btol)
        throw SolverError("profile tails do not clear the grid ends; increase L");

    WaveProfile w;
    w.t = pb.g.t;
    w.phi.assign(X.data(), X.data() + N + 1);
    w.c = X[N + 1];
    w.tau = pb.tau;
    w.h = w.c * pb.tau;
    w.residual_inf = fn;
    w.model_id = pb.m.id;
    return w;
}

std::vector<double> seed_on_grid(const Grid& g, const WaveProfile& seed) {
    if (seed.t.size() != seed.phi.size() || seed.t.size() < 4)
        throw ArgumentError("seed profile needs >= 4 matching nodes");
    for (std::size_t i = 0; i + 1 < seed.t.size(); ++i)
        if (!(seed.t[i] < seed.t[i + 1]))
            throw ArgumentError("seed profile grid must be strictly increasing");
    std::vector<double> phi(g.t.size());
    for (std::size_t i = 0; i < g.t.size(); ++i) {
        const double x = g.t[i];
        if (x <= seed.t.front())
            phi[i] = seed.phi.front();
        else if (x >= seed.t.back())
            phi[i] = seed.phi.back();
        else
            phi[i] = detail::interp_cubic(seed.t, seed.phi, x);
    }
    return phi;
}

bool profile_monotone(const WaveProfile& w, double span) {
    const double tol = 1e-9 * span;
    for (std::size_t i = 0; i + 1 < w.phi.size(); ++i)
        if (w.phi[i + 1] < w.phi[i] - tol) return false;
    return true;
}

} // namespace

WaveProfile solve_nondelayed(const ModelSpec& m, const SteadyStates& s,
                             const SolverOptions& opt) {
    const Grid g = make_grid(opt);
    const Problem pb{m, s, g, 0.0};
    double c0;
    if (opt.c_init) {
        c0 = *opt.c_init;
        if (!std::isfinite(c0)) throw ArgumentError("c_init must be finite");
    } else {
        c0 = model_zoo::integral_over_diagonal(m, s) >= 0.0 ? 0.1 : -0.1;
    }

    // logistic guess shaped by the linearized tail rates and anchored so the
    // phase row is satisfied from the start; a translated guess would have to
    // ride the near-null translation mode through the steepest part of g
    const TailRates r = tail_rates(m, s, c0, 0.0);
    const double width = 2.0 / (r.left + std::abs(r.right));
    const double span = s.e3 - s.e1;
    const double anchor = span / (0.5 * (s.e1 + s.e2) - s.e1) - 1.0;
    std::vector<double> phi0(g.t.size());
    for (std::size_t i = 0; i < g.t.size(); ++i)
        phi0[i] = s.e1 + span / (1.0 + anchor * std::exp(-g.t[i] / width));
    return newton_solve(pb, std::move(phi0), c0, opt);
}

WaveProfile solve_delayed(const ModelSpec& m, const SteadyStates& s, double tau,
                          const WaveProfile& seed, const SolverOptions& opt) {
    if (!std::isfinite(tau) || tau < 0.0)
        throw ArgumentError("tau must be finite and >= 0");
    const Grid g = make_grid(opt);
    const Problem pb{m, s, g, tau};
    std::vector<double> phi0 = seed_on_grid(g, seed);
    double c0 = opt.c_init ? *opt.c_init : seed.c;
    if (!std::isfinite(c0)) throw ArgumentError("seed speed must be finite");
    return newton_solve(pb, std::move(phi0), c0, opt);
}

WaveProfile refine(const ModelSpec& m, const SteadyStates& s, const WaveProfile& w,
                   int N_new, double L_new, const SolverOptions& opt) {
    if (w.t.size() < 4) throw ArgumentError("profile too short to refine");
    const double half_span = 0.5 * (w.t.back() - w.t.front());
    if (N_new < static_cast<int>(w.t.size()) - 1 || L_new < half_span - 1e-12)
        throw ArgumentError("refine must not coarsen the grid");
    SolverOptions o = opt;
    o.N = N_new;
    o.L = L_new;
    if (!o.c_init) o.c_init = w.c;
    return solve_delayed(m, s, w.tau, w, o);
}

ContinuationCurve continue_in_tau(const ModelSpec& m, const SteadyStates& s,
                                  const WaveProfile& start,
                                  const ContinuationOptions& opt) {
    if (!std::isfinite(opt.tau_max) || opt.tau_max < start.tau)
        throw ArgumentError("tau_max must be finite and >= the starting delay");
    if (!(opt.dtau_min > 0.0) || !(opt.dtau_init >= opt.dtau_min) ||
        !(opt.dtau_max >= opt.dtau_init))
        throw ArgumentError("continuation steps must satisfy 0 < min <= init <= max");
    if (!(opt.speed_floor > 0.0) || !(opt.speed_ceiling > opt.speed_floor))
        throw ArgumentError("continuation speed bounds are inverted");
    if (!(opt.domain_overshoot >= 0.0))
        throw ArgumentError("domain_overshoot must be >= 0");

    const double span = s.e3 - s.e1;

    // the monotonicity region is tracked through the linearization at the
    // invaded state whenever it has the negative-feedback sign pattern
    std::optional<stability_domain::DomainParams> dom;
    const double a3 = m.g1(s.e3, s.e3);
    const double b3 = m.g2(s.e3, s.e3);
    if (a3 < 0.0 && b3 < 0.0) dom = stability_domain::make_params(a3, b3);

    // signed distance to the boundary, -inf while clin is infinite
    auto excess = [&](double tau, double c) {
        if (!dom) return -std::numeric_limits<double>::infinity();
        const auto cl = stability_domain::clin(*dom, tau);
        if (!cl) return -std::numeric_limits<double>::infinity();
        return std::abs(c) - *cl;
    };
    auto member = [&](double tau, double c) {
        if (!dom) return true;
        return stability_domain::in_domain(*dom, tau, std::abs(c)).inside;
    };

    ContinuationCurve curve;
    auto push = [&](const WaveProfile& w, bool inside) {
        ContinuationPoint p;
        p.tau = w.tau;
        p.c = w.c;
        p.monotone = profile_monotone(w, span);
        p.in_domain = inside;
        p.residual = w.residual_inf;
        p.profile = std::make_shared<const WaveProfile>(w);
        curve.points.push_back(std::move(p));
    };

    WaveProfile cur = start;
    bool prev_inside = member(cur.tau, cur.c);
    push(cur, prev_inside);

    double dtau = opt.dtau_init;
    int streak = 0;
    std::optional<double> exit_tau;
    curve.termination = Termination::reached_tau_max;

    double tau = start.tau;
    while (tau < opt.tau_max - 1e-12) {
        const double tnext = std::min(tau + dtau, opt.tau_max);
        WaveProfile next;
        try {
            next = solve_delayed(m, s, tnext, cur, opt.solver);
        } catch (const SolverError&) {
            dtau *= 0.5;
            streak = 0;
            if (dtau < opt.dtau_min) {
                curve.termination = Termination::newton_failure;
                break;
            }
            continue;
        }

        const bool inside = member(tnext, next.c);
        push(next, inside);
        if (!exit_tau && prev_inside && !inside) {
            const double ep = excess(tau, cur.c);
            const double en = excess(tnext, next.c);
            if (std::isfinite(ep) && std::isfinite(en) && en > ep)
                exit_tau = tau - ep * (tnext - tau) / (en - ep);
            else
                exit_tau = 0.5 * (tau + tnext);
        }
        prev_inside = inside;
        cur = std::move(next);
        tau = tnext;

        if (std::abs(cur.c) > opt.speed_ceiling || std::abs(cur.c) < opt.speed_floor) {
            curve.termination = Termination::speed_bound_hit;
            break;
        }
        if (exit_tau && tau >= *exit_tau + opt.domain_overshoot) {
            curve.termination = Termination::left_domain;
            break;
        }
        if (++streak >= 3) {
            dtau = std::min(2.0 * dtau, opt.dtau_max);
            streak = 0;
        }
    }

    curve.domain_exit_tau = exit_tau;
    return curve;
}

} // namespace delfront::profile_solver
