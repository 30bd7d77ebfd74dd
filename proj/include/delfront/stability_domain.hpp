#pragma once
#include <optional>
#include <vector>

namespace delfront::stability_domain {

// Coefficients of the tail characteristic function at the invaded state:
// chi(z) = z^2 - c*z + a_minus + b_minus * exp(-z*c*tau), both negative.
struct DomainParams {
    double a_minus = 0.0;
    double b_minus = 0.0;
};

// Throws ArgumentError unless a_minus < 0 and b_minus < 0 (finite).
DomainParams make_params(double a_minus, double b_minus);

// Unique positive root of e * |b| * tau * exp(|a| * tau) = 1. For
// tau <= tau_sharp the critical speed is infinite (every c admissible).
double tau_sharp(const DomainParams& p);

// omega: unique root of -2a = b * exp(-omega) * (2 + omega) on (-inf, -2);
// theta = sqrt(2*omega/b) * exp(omega/2). theta is the critical value of
// h = c*tau below which c_crit_of_h vanishes, and h*clin(tau) -> theta as
// tau -> inf.
struct ThetaResult {
    double omega = 0.0;
    double theta = 0.0;
};
ThetaResult theta_point(const DomainParams& p);

// Critical speed clin(tau): empty optional means +infinity (tau <= tau_sharp).
// For c <= clin(tau) the characteristic function keeps three real roots
// counting multiplicity; above it the two negative roots leave the real axis.
std::optional<double> clin(const DomainParams& p, double tau);

// Boundary in (h, c) coordinates: zero for h <= theta, else the unique c
// solving the same crossing condition at fixed h.
double c_crit_of_h(const DomainParams& p, double h);

struct DomainCheck {
    bool inside = false;
    std::optional<double> clin_value; // empty = infinite
    int real_root_count = 0;          // counting multiplicity, -1 if not computed
    bool count_checked = false;       // cross-check performed and consistent
};

// Membership test for (tau, c), c > 0. Primary test is c <= clin(tau); the
// real-root count of chi is cross-checked (3 inside, 1 outside) whenever
// h = c*tau >= 0.01 and (tau, c) is not within a relative 1e-6 band of the
// boundary, where the count legitimately degenerates. A disagreement outside
// that band raises SolverError.
DomainCheck in_domain(const DomainParams& p, double tau, double c);

struct BoundaryPoint {
    double tau = 0.0;
    std::optional<double> clin_value; // empty = infinite
};

struct BoundaryCurve {
    DomainParams params{};
    double tau_sharp_value = 0.0;
    std::vector<BoundaryPoint> points; // tau strictly increasing
};

// Samples the boundary on [0, tau_max]: a short uniform prefix on
// [0, tau_sharp] carries the infinite rows, then a geometric ladder from
// tau_sharp + 1e-4 to tau_max. Finite values are checked to be strictly
// decreasing. Throws ArgumentError when tau_max <= tau_sharp ("the critical
// speed is infinite on the whole range"). jobs > 1 parallelizes point
// evaluation with index-ordered (deterministic) assembly.
BoundaryCurve trace_boundary(const DomainParams& p, double tau_max, int n_points,
                             int jobs = 1);

} // namespace delfront::stability_domain
