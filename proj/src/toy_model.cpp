#include "delfront/toy_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <thread>
#include <utility>

#include "delfront/detail/numeric.hpp"
#include "delfront/errors.hpp"
#include "delfront/quasipoly.hpp"
#include "delfront/stability_domain.hpp"

namespace delfront::toy_model {

namespace {

constexpr double kDegenerateBand = 1e-9;
constexpr int kSubsteps = 512;

quasipoly::CharParams char_params(double w, double c, double h) {
    return quasipoly::CharParams{-1.0, w, c, h};
}

double dominant_root(double w, double c, double h) {
    return quasipoly::dominant_positive_root(char_params(w, c, h));
}

// delta = lambda1 - mu1 obtained from the exact difference equation
//   delta * (2*mu1 + delta - c) = exp(-mu1*h) * (p - q*exp(-delta*h)),
// a contraction on delta > 0. Substituting mu1^2 - c*mu1 - 1 = -p*e^{-mu1 h}
// removes the cancellation, so the result keeps ~1e-15 relative accuracy
// even when exp(-mu1*h) is far below the ulp of the roots.
double root_delta(const ToyParams& tp, double mu, double c, double h) {
    const double ep = std::exp(-mu * h);
    double delta = ep * (tp.p - tp.q) / (2.0 * mu - c);
    for (int it = 0; it < 48; ++it) {
        const double next =
            ep * (tp.p - tp.q * std::exp(-delta * h)) / (2.0 * mu + delta - c);
        const double err = std::abs(next - delta);
        delta = next;
        if (err <= 1e-16 * delta) break;
    }
    return delta;
}

double gap_at(const ToyParams& tp, double c, double tau) {
    if (!(c > 0.0)) throw ArgumentError("toy model: speed argument must be > 0");
    if (!(tau >= 0.0) || !std::isfinite(tau))
        throw ArgumentError("toy model: delay must be finite and >= 0");
    const double h = c * tau;
    const double mu = dominant_root(tp.p, c, h);
    const double delta = root_delta(tp, mu, c, h);
    return delta / (mu + delta);
}

// Negative-branch matching value: (1-p)/(p-q) * (lambda1/mu1 - 1) at |c|.
double R_of_v(const ToyParams& tp, double v, double tau) {
    const double gap = gap_at(tp, v, tau);
    return (1.0 - tp.p) / (tp.p - tp.q) * gap / (1.0 - gap);
}

// |largest negative real root| of z^2 - c z - 1 + w e^{-z h}; quadratic
// fallback (the h = 0 value) when no real root exists on that side.
double decay_rate(double w, double c, double h) {
    const auto pq = char_params(w, c, h);
    const double lo = quasipoly::real_scan_left_edge(pq);
    double best = std::numeric_limits<double>::quiet_NaN();
    for (const auto& r : quasipoly::real_roots(pq, lo, -1e-10))
        if (std::isnan(best) || r.value > best) best = r.value;
    if (!std::isnan(best)) return -best;
    return 0.5 * (std::sqrt(c * c + 4.0 * (1.0 - w)) - c);
}

std::string toy_id(const ToyParams& tp) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "toy(kappa=%g,p=%g,q=%g)", tp.kappa, tp.p,
                  tp.q);
    return buf;
}

// Dense method-of-steps solution of psi'' - v psi' - psi + w_eq psi(s-h) = 0
// on s >= 0 with history psi(s) = amp*exp(mu_h*(s+h)) - 1 on s <= 0.
// Nodes carry (psi, psi') so evaluation is cubic Hermite; after each segment
// the component along the unstable mode exp(r_u s) is projected out.
struct StepDense {
    double h = 0.0;
    double ds = 0.0;
    std::vector<std::vector<double>> psi, dpsi; // one array of 513 nodes per segment

    double eval(double s) const {
        const int nseg = static_cast<int>(psi.size());
        int k = std::min(static_cast<int>(std::floor(s / h)), nseg - 1);
        k = std::max(k, 0);
        const double local = s - k * h;
        int j = std::min(static_cast<int>(std::floor(local / ds)), kSubsteps - 1);
        j = std::max(j, 0);
        const double xi = (local - j * ds) / ds;
        const double h00 = (1.0 + 2.0 * xi) * (1.0 - xi) * (1.0 - xi);
        const double h10 = xi * (1.0 - xi) * (1.0 - xi);
        const double h01 = xi * xi * (3.0 - 2.0 * xi);
        const double h11 = xi * xi * (xi - 1.0);
        return h00 * psi[k][j] + h10 * ds * dpsi[k][j] + h01 * psi[k][j + 1] +
               h11 * ds * dpsi[k][j + 1];
    }
};

StepDense integrate_steps(double v, double h, double w_eq, double amp,
                          double mu_h, double s_max) {
    StepDense D;
    D.h = h;
    D.ds = h / kSubsteps;
    const int nseg = static_cast<int>(std::ceil(s_max / h)) + 1;
    if (nseg > 50000)
        throw SolverError("delay step too small for the requested horizon");

    const double ru = dominant_root(w_eq, v, h);
    const double dchi = 2.0 * ru - v - w_eq * h * std::exp(-ru * h);
    const double eruh = std::exp(-ru * h);

    auto hist = [&](double x) { return amp * std::exp(mu_h * (x + h)) - 1.0; };
    auto delayed = [&](double s) {
        const double x = s - h;
        return x <= 0.0 ? hist(x) : D.eval(x);
    };

    double y0 = hist(0.0);
    double y1 = amp * mu_h * std::exp(mu_h * h);

    for (int k = 0; k < nseg; ++k) {
        std::vector<double> ps(kSubsteps + 1), dps(kSubsteps + 1);
        ps[0] = y0;
        dps[0] = y1;
        const double s0 = k * h;
        for (int i = 0; i < kSubsteps; ++i) {
            const double s = s0 + i * D.ds;
            const double d0 = delayed(s);
            const double dm = delayed(s + 0.5 * D.ds);
            const double d1 = delayed(s + D.ds);
            // RK4 on (psi, psi'); the delay term is a known forcing here
            const double a1 = y1;
            const double b1 = v * y1 + y0 - w_eq * d0;
            const double a2 = y1 + 0.5 * D.ds * b1;
            const double b2 = v * a2 + (y0 + 0.5 * D.ds * a1) - w_eq * dm;
            const double a3 = y1 + 0.5 * D.ds * b2;
            const double b3 = v * a3 + (y0 + 0.5 * D.ds * a2) - w_eq * dm;
            const double a4 = y1 + D.ds * b3;
            const double b4 = v * a4 + (y0 + D.ds * a3) - w_eq * d1;
            y0 += D.ds / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
            y1 += D.ds / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
            ps[i + 1] = y0;
            dps[i + 1] = y1;
        }
        // remove the unstable component excited by roundoff: its amplitude is
        // the boundary-functional projection divided by chi'(r_u)
        double integral = 0.0;
        for (int j = 0; j <= kSubsteps; ++j) {
            const double sigma = -h + j * D.ds;
            const double f = std::exp(-ru * sigma) * ps[j];
            const int w = (j == 0 || j == kSubsteps) ? 1 : (j % 2 == 1 ? 4 : 2);
            integral += w * f;
        }
        integral *= D.ds / 3.0;
        const double proj = y1 + (ru - v) * y0 - w_eq * eruh * integral;
        const double A = proj / dchi;
        for (int j = 0; j <= kSubsteps; ++j) {
            const double e = A * std::exp(ru * (j - kSubsteps) * D.ds);
            ps[j] -= e;
            dps[j] -= ru * e;
        }
        y0 = ps[kSubsteps];
        y1 = dps[kSubsteps];
        if (!(std::abs(y0) < 10.0))
            throw SolverError("toy profile integration diverged");
        D.psi.push_back(std::move(ps));
        D.dpsi.push_back(std::move(dps));
    }
    return D;
}

} // namespace

ToyParams make_params(double kappa, double p, double q) {
    if (!(kappa > 0.0 && kappa < 1.0))
        throw ArgumentError("toy model: kappa must lie in (0, 1)");
    if (!(p > 0.0 && p < 1.0))
        throw ArgumentError("toy model: p must lie in (0, 1)");
    if (!(q < 0.0) || !std::isfinite(q))
        throw ArgumentError("toy model: q must be finite and < 0");
    return ToyParams{kappa, p, q};
}

double f_toy(const ToyParams& tp, double v) {
    return v < tp.kappa ? tp.p * v : 1.0 + tp.q * (v - 1.0);
}

double k_star(const ToyParams& tp) {
    return tp.kappa * (1.0 + std::sqrt((1.0 - tp.p) / (1.0 - tp.q)));
}

double balance_closed_form(const ToyParams& tp) {
    const double om = 1.0 - tp.kappa;
    return 0.5 * ((1.0 - tp.q) * om * om - (1.0 - tp.p) * tp.kappa * tp.kappa);
}

double balance_quadrature(const ToyParams& tp) {
    auto g = [&](double u) { return -u + f_toy(tp, u); };
    return detail::adaptive_simpson(g, 0.0, tp.kappa, 1e-13) +
           detail::adaptive_simpson(g, tp.kappa, 1.0, 1e-13);
}

double mu1(const ToyParams& tp, double c, double tau) {
    if (!(c > 0.0)) throw ArgumentError("mu1 requires c > 0");
    if (!(tau >= 0.0)) throw ArgumentError("mu1 requires tau >= 0");
    return dominant_root(tp.p, c, c * tau);
}

double lambda1(const ToyParams& tp, double c, double tau) {
    if (!(c > 0.0)) throw ArgumentError("lambda1 requires c > 0");
    if (!(tau >= 0.0)) throw ArgumentError("lambda1 requires tau >= 0");
    return dominant_root(tp.q, c, c * tau);
}

double ratio_gap(const ToyParams& tp, double c, double tau) {
    return gap_at(tp, c, tau);
}

double K_of_c(const ToyParams& tp, double c, double tau) {
    return (1.0 - tp.q) / (tp.p - tp.q) * gap_at(tp, c, tau);
}

SpeedResult wave_speed(const ToyParams& tp, double tau) {
    if (!(tau >= 0.0) || !std::isfinite(tau))
        throw ArgumentError("toy model: delay must be finite and >= 0");
    const double ks = k_star(tp);
    if (std::abs(ks - 1.0) < kDegenerateBand)
        throw ModelError("toy model: k* = 1 is degenerate (zero-speed balance)");
    const bool positive = ks < 1.0;

    // matching value minus its target; strictly decreasing in the speed, so
    // the root is bracketed by doubling and closed by bisection
    auto G = [&](double x) {
        return positive ? K_of_c(tp, x, tau) - tp.kappa
                        : R_of_v(tp, x, tau) - (1.0 - tp.kappa);
    };
    double lo = 1e-12;
    if (!(G(lo) > 0.0))
        throw SolverError("toy model: speed bracket failed at the origin");
    double hi = 1.0;
    int guard = 0;
    while (G(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 60) throw SolverError("toy model: speed bracket failed");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (G(mid) > 0.0 ? lo : hi) = mid;
    }
    const double v = 0.5 * (lo + hi);

    SpeedResult out;
    out.positive_branch = positive;
    out.c = positive ? v : -v;
    const double h = v * tau;
    out.mu1 = dominant_root(tp.p, v, h);
    out.lambda1 = out.mu1 + root_delta(tp, out.mu1, v, h);
    out.K_value = positive ? K_of_c(tp, v, tau)
                           : std::numeric_limits<double>::quiet_NaN();
    return out;
}

WaveProfile exact_profile(const ToyParams& tp, double tau,
                          const std::vector<double>& t_grid) {
    if (t_grid.size() < 2)
        throw ArgumentError("exact_profile: grid needs at least two nodes");
    for (size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw ArgumentError("exact_profile: grid must be strictly increasing");

    const SpeedResult sr = wave_speed(tp, tau);
    const bool pos = sr.positive_branch;
    const double v = std::abs(sr.c);
    const double h = v * tau;
    const double w_hist = pos ? tp.p : tp.q;
    const double w_eq = pos ? tp.q : tp.p;
    const double amp = pos ? tp.kappa : 1.0 - tp.kappa;
    const double mu_h = dominant_root(w_hist, v, h);

    // s is the integration coordinate: s = t on the positive branch, s = -t
    // on the negative one (reflected front with p and q swapped)
    const double s_max = pos ? t_grid.back() : -t_grid.front();
    std::function<double(double)> psi_eval;
    if (s_max > 0.0) {
        if (tau == 0.0) {
            const double r2 = 0.5 * (v - std::sqrt(v * v + 4.0 * (1.0 - w_eq)));
            const double psi0 = amp - 1.0;
            psi_eval = [r2, psi0](double s) { return psi0 * std::exp(r2 * s); };
        } else {
            auto dense = std::make_shared<StepDense>(
                integrate_steps(v, h, w_eq, amp, mu_h, s_max));
            psi_eval = [dense](double s) { return dense->eval(s); };
        }
    }

    auto value = [&](double t) -> double {
        const double s = pos ? t : -t;
        if (s <= 0.0) {
            const double tail = amp * std::exp(mu_h * (s + h));
            return pos ? tail : 1.0 - tail;
        }
        const double ps = psi_eval(s);
        return pos ? 1.0 + ps : -ps;
    };

    WaveProfile w;
    w.t = t_grid;
    w.phi.resize(t_grid.size());
    for (size_t i = 0; i < t_grid.size(); ++i) w.phi[i] = value(t_grid[i]);
    w.c = sr.c;
    w.tau = tau;
    w.h = sr.c * tau;
    w.model_id = toy_id(tp);

    // finite-difference audit; the slope-break preimage sits at t = 0 exactly
    // (junction normalization), where phi'' jumps, so nodes near 0 are skipped
    double worst = 0.0;
    for (size_t i = 1; i + 1 < t_grid.size(); ++i) {
        const double d1 = t_grid[i] - t_grid[i - 1];
        const double d2 = t_grid[i + 1] - t_grid[i];
        const double band = 2.5 * std::max(d1, d2);
        if (std::abs(t_grid[i - 1]) <= band || std::abs(t_grid[i]) <= band ||
            std::abs(t_grid[i + 1]) <= band)
            continue;
        const double dd = 2.0 *
                          (d1 * w.phi[i + 1] - (d1 + d2) * w.phi[i] +
                           d2 * w.phi[i - 1]) /
                          (d1 * d2 * (d1 + d2));
        const double dp = (d1 * d1 * w.phi[i + 1] +
                           (d2 * d2 - d1 * d1) * w.phi[i] -
                           d2 * d2 * w.phi[i - 1]) /
                          (d1 * d2 * (d1 + d2));
        const double vd = value(t_grid[i] - w.h);
        const double res = dd - sr.c * dp - w.phi[i] + f_toy(tp, vd);
        worst = std::max(worst, std::abs(res));
    }
    w.residual_inf = worst;
    return w;
}

std::vector<double> default_profile_grid(const ToyParams& tp, double tau,
                                         double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ArgumentError("default_profile_grid: dt must be positive");
    const SpeedResult sr = wave_speed(tp, tau);
    const double v = std::abs(sr.c);
    const double h = v * tau;
    double t_back, t_fwd;
    if (sr.positive_branch) {
        t_back = std::max(40.0, h + std::log(tp.kappa / 1e-14) / sr.mu1);
        t_fwd = std::max(40.0, 20.0 / decay_rate(tp.q, v, h));
    } else {
        t_back = std::max(40.0, 20.0 / decay_rate(tp.p, v, h));
        t_fwd =
            std::max(40.0, h + std::log((1.0 - tp.kappa) / 1e-14) / sr.lambda1);
    }
    // align so t = 0 is a node
    const long nb = std::lround(std::ceil(t_back / dt));
    const long nf = std::lround(std::ceil(t_fwd / dt));
    std::vector<double> grid(nb + nf + 1);
    for (long i = 0; i <= nb + nf; ++i) grid[i] = (i - nb) * dt;
    return grid;
}

SpeedCurve speed_curve(const ToyParams& tp, const std::vector<double>& tau_grid,
                       int jobs) {
    if (tau_grid.empty()) throw ArgumentError("speed_curve: empty tau grid");
    for (size_t i = 0; i < tau_grid.size(); ++i) {
        if (!(tau_grid[i] >= 0.0) || !std::isfinite(tau_grid[i]))
            throw ArgumentError("speed_curve: delays must be finite and >= 0");
        if (i > 0 && !(tau_grid[i] > tau_grid[i - 1]))
            throw ArgumentError("speed_curve: tau grid must be strictly increasing");
    }
    if (jobs < 1) jobs = 1;

    const bool positive = k_star(tp) < 1.0; // wave_speed re-checks degeneracy
    const auto dom = stability_domain::make_params(-1.0, tp.q);

    SpeedCurve out;
    out.positive_branch = positive;
    out.points.resize(tau_grid.size());

    auto fill = [&](size_t i) {
        const double tau = tau_grid[i];
        const SpeedResult sr = wave_speed(tp, tau);
        const auto chk = stability_domain::in_domain(dom, tau, std::abs(sr.c));
        CurvePoint pt;
        pt.tau = tau;
        pt.c = sr.c;
        pt.in_domain = chk.inside;
        pt.monotone = positive ? chk.inside : true;
        out.points[i] = pt;
    };

    const size_t n = tau_grid.size();
    const int workers = std::min<size_t>(jobs, n);
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) fill(i);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errs(workers);
        for (int wkr = 0; wkr < workers; ++wkr) {
            pool.emplace_back([&, wkr]() {
                try {
                    for (size_t i = wkr; i < n; i += workers) fill(i);
                } catch (...) {
                    errs[wkr] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errs)
            if (e) std::rethrow_exception(e);
    }

    if (positive) {
        for (size_t i = 0; i + 1 < n; ++i) {
            if (out.points[i].in_domain && !out.points[i + 1].in_domain) {
                // c(tau) - clin(tau) changes sign here; clin is finite on the
                // outside end so the bracket is well defined
                auto excess = [&](double t) {
                    const auto cl = stability_domain::clin(dom, t);
                    if (!cl) return -1.0;
                    return wave_speed(tp, t).c - *cl;
                };
                double lo = tau_grid[i], hi = tau_grid[i + 1];
                while (hi - lo > 1e-7) {
                    const double mid = 0.5 * (lo + hi);
                    (excess(mid) <= 0.0 ? lo : hi) = mid;
                }
                out.domain_exit_tau = 0.5 * (lo + hi);
                break;
            }
        }
    }
    return out;
}

} // namespace delfront::toy_model
