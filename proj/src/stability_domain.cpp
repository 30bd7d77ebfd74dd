#include "delfront/stability_domain.hpp"

#include <cmath>
#include <functional>
#include <thread>

#include "delfront/errors.hpp"
#include "delfront/quasipoly.hpp"

namespace delfront::stability_domain {

namespace {

constexpr double kE = 2.718281828459045235360287471;

// The two sides of the boundary condition at (c, h). Their crossing in c (at
// fixed tau, h = c*tau) is the critical speed: left side above right side
// means three real roots (inside), below means one.
struct Sides {
    double A, B;
};

Sides sides(const DomainParams& p, double c, double h) {
    const double aa = -p.a_minus;
    const double bb = -p.b_minus;
    const double s = std::sqrt(c * c * h * h + 4.0 + 4.0 * aa * h * h);
    Sides out;
    out.A = (2.0 + s) / (kE * h * h * bb);
    out.B = std::exp((2.0 + 2.0 * aa * h * h) / (c * h + s));
    return out;
}

double gap_at_tau(const DomainParams& p, double tau, double c) {
    const Sides s = sides(p, c, c * tau);
    return s.A - s.B; // positive inside the domain
}

double bisect_to_limit(const std::function<double(double)>& f, double lo, double hi,
                       bool keep_positive_low) {
    // keeps f(lo) on the `keep_positive_low` side; 200 halvings reach the
    // double-precision limit for every bracket we use
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const bool pos = f(mid) > 0.0;
        if (pos == keep_positive_low)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

DomainParams make_params(double a_minus, double b_minus) {
    if (!std::isfinite(a_minus) || !std::isfinite(b_minus) || !(a_minus < 0.0) ||
        !(b_minus < 0.0))
        throw ArgumentError("domain parameters must be finite and strictly negative");
    return {a_minus, b_minus};
}

double tau_sharp(const DomainParams& p) {
    const double aa = -p.a_minus;
    const double bb = -p.b_minus;
    auto G = [&](double t) { return kE * bb * t * std::exp(aa * t) - 1.0; };
    double hi = 1.0;
    int guard = 0;
    while (G(hi) < 0.0) {
        hi *= 2.0;
        if (++guard > 60) throw SolverError("tau_sharp bracket failed");
    }
    double t = bisect_to_limit(G, 0.0, hi, false);
    for (int it = 0; it < 6; ++it) { // Newton polish on the increasing G
        const double e = std::exp(aa * t);
        const double f = kE * bb * t * e - 1.0;
        const double d = kE * bb * e * (1.0 + aa * t);
        if (d == 0.0) break;
        t -= f / d;
    }
    if (std::abs(kE * bb * t * std::exp(aa * t) - 1.0) > 1e-12)
        throw SolverError("tau_sharp residual too large");
    return t;
}

ThetaResult theta_point(const DomainParams& p) {
    const double a = p.a_minus;
    const double b = p.b_minus;
    // root of b*exp(-w)*(2+w) + 2a on (-inf, -2); left end positive, -2 end
    // negative
    auto H = [&](double w) { return b * std::exp(-w) * (2.0 + w) + 2.0 * a; };
    double lo = -3.0;
    int guard = 0;
    while (H(lo) < 0.0) {
        lo = -2.0 + (lo + 2.0) * 2.0;
        if (++guard > 60) throw SolverError("theta bracket failed");
    }
    const double w = bisect_to_limit(H, lo, -2.0 - 1e-13, true);
    ThetaResult out;
    out.omega = w;
    out.theta = std::sqrt(2.0 * w / b) * std::exp(w / 2.0);
    return out;
}

std::optional<double> clin(const DomainParams& p, double tau) {
    if (!std::isfinite(tau) || tau < 0.0) throw ArgumentError("tau must be >= 0");
    if (tau <= tau_sharp(p)) return std::nullopt;
    auto F = [&](double c) { return gap_at_tau(p, tau, c); };
    const double lo0 = 1e-8;
    if (!(F(lo0) > 0.0)) throw SolverError("critical speed bracket failed near c = 0");
    double hi = 1.0;
    int guard = 0;
    while (F(hi) > 0.0) {
        hi *= 2.0;
        if (++guard > 80) throw SolverError("critical speed bracket failed upward");
    }
    const double c = bisect_to_limit(F, lo0, hi, true);
    const Sides s = sides(p, c, c * tau);
    if (std::abs(s.A - s.B) > 1e-10 * std::max(1.0, std::abs(s.A)))
        throw SolverError("critical speed residual too large");
    return c;
}

double c_crit_of_h(const DomainParams& p, double h) {
    if (!std::isfinite(h) || h < 0.0) throw ArgumentError("h must be >= 0");
    if (h == 0.0) return 0.0;
    if (h <= theta_point(p).theta) return 0.0;
    // at fixed h the left side grows and the right side falls in c, so the
    // sign switches once from negative to positive
    auto F = [&](double c) {
        const Sides s = sides(p, c, h);
        return s.A - s.B;
    };
    if (F(1e-12) >= 0.0) return 0.0;
    double hi = 1.0;
    int guard = 0;
    while (F(hi) < 0.0) {
        hi *= 2.0;
        if (++guard > 80) throw SolverError("c_crit bracket failed");
    }
    return bisect_to_limit(F, 1e-12, hi, false);
}

DomainCheck in_domain(const DomainParams& p, double tau, double c) {
    if (!std::isfinite(c) || !(c > 0.0) || !std::isfinite(tau) || tau < 0.0)
        throw ArgumentError("need c > 0 and tau >= 0");
    DomainCheck out;
    out.clin_value = clin(p, tau);
    out.inside = !out.clin_value || c <= *out.clin_value;
    out.real_root_count = -1;

    const double h = c * tau;
    if (h < 0.01) return out; // third root beyond any usable scan range

    quasipoly::CharParams cp{p.a_minus, p.b_minus, c, h};
    const double right = quasipoly::dominant_positive_root(cp) + 5.0;
    const auto roots = quasipoly::real_roots(cp, quasipoly::real_scan_left_edge(cp), right);
    int count = 0;
    for (const auto& r : roots) count += r.multiplicity;
    out.real_root_count = count;

    const bool near_boundary =
        out.clin_value &&
        std::abs(c - *out.clin_value) <= 1e-6 * std::max(1.0, *out.clin_value);
    if (!near_boundary) {
        if ((count == 3) != out.inside)
            throw SolverError("domain classification inconsistent: root count "
                              "disagrees with the critical speed");
        out.count_checked = true;
    }
    return out;
}

BoundaryCurve trace_boundary(const DomainParams& p, double tau_max, int n_points,
                             int jobs) {
    if (n_points < 8) throw ArgumentError("trace_boundary needs at least 8 points");
    if (jobs < 1) throw ArgumentError("jobs must be >= 1");
    BoundaryCurve bc;
    bc.params = p;
    bc.tau_sharp_value = tau_sharp(p);
    const double ts = bc.tau_sharp_value;
    if (!(tau_max > ts + 1e-4))
        throw ArgumentError("critical speed is infinite on the whole range "
                            "(tau_max <= tau_sharp)");

    const int m_inf = std::max(2, n_points / 20);
    const int n_fin = n_points - m_inf;
    std::vector<double> taus(n_points);
    for (int j = 0; j < m_inf; ++j) taus[j] = ts * j / double(m_inf - 1);
    const double d0 = 1e-4;
    if (n_fin == 1) {
        taus[m_inf] = tau_max;
    } else {
        const double ratio = std::pow((tau_max - ts) / d0, 1.0 / double(n_fin - 1));
        for (int k = 0; k < n_fin; ++k) taus[m_inf + k] = ts + d0 * std::pow(ratio, k);
        taus[n_points - 1] = tau_max;
    }
    for (int i = 1; i < n_points; ++i)
        if (!(taus[i] > taus[i - 1])) throw SolverError("boundary grid not increasing");

    bc.points.assign(n_points, {});
    auto eval_range = [&](int i0, int i1) {
        for (int i = i0; i < i1; ++i) {
            bc.points[i].tau = taus[i];
            bc.points[i].clin_value =
                (taus[i] <= ts) ? std::nullopt : clin(p, taus[i]);
        }
    };
    if (jobs <= 1) {
        eval_range(0, n_points);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (n_points + jobs - 1) / jobs;
        for (int j = 0; j < jobs; ++j) {
            const int i0 = j * chunk;
            const int i1 = std::min(n_points, i0 + chunk);
            if (i0 < i1) pool.emplace_back(eval_range, i0, i1);
        }
        for (auto& th : pool) th.join();
    }

    for (int i = m_inf + 1; i < n_points; ++i) {
        if (!bc.points[i].clin_value || !bc.points[i - 1].clin_value) continue;
        if (!(*bc.points[i].clin_value < *bc.points[i - 1].clin_value))
            throw SolverError("critical speed failed to decrease along the boundary");
    }
    return bc;
}

} // namespace delfront::stability_domain
