#pragma once
#include <optional>
#include <vector>

#include "delfront/wave.hpp"

namespace delfront::toy_model {

// Two-slope birth function f(u) = p*u on [0, kappa), 1 + q*(u - 1) on
// [kappa, 1]; kinetics g(u,v) = -u + f(v) with rest states 0 and 1.
// Wave speeds and profiles are available in closed form up to scalar
// root-finding, which makes this family the reference oracle for the
// generic machinery.
struct ToyParams {
    double kappa = 0.0;
    double p = 0.0;
    double q = 0.0;
};

// Requires kappa, p in (0, 1) and q < 0.
ToyParams make_params(double kappa, double p, double q);

double f_toy(const ToyParams& tp, double v);

// k* = kappa * (1 + sqrt((1-p)/(1-q))). k* < 1 selects the positive-speed
// branch, k* > 1 the negative one; |k*-1| < 1e-9 is treated as degenerate.
double k_star(const ToyParams& tp);

// Signed area balance of g(u,u) over [0, 1]:
// ((1-q)*(1-kappa)^2 - (1-p)*kappa^2) / 2. Positive iff k* < 1.
double balance_closed_form(const ToyParams& tp);
double balance_quadrature(const ToyParams& tp); // piecewise adaptive Simpson

// Dominant positive roots of z^2 - c z - 1 + w * exp(-z*c*tau) for w = p
// (mu1) and w = q (lambda1); c > 0.
double mu1(const ToyParams& tp, double c, double tau);
double lambda1(const ToyParams& tp, double c, double tau);

// gap = (lambda1 - mu1) / lambda1 = 1 - mu1/lambda1, evaluated through the
// exact difference equation
//   delta * (mu1 + lambda1 - c) = exp(-mu1*h) * (p - q*exp(-delta*h))
// so it stays accurate when exp(-mu1*h) is far below the ulp of the roots
// (large c*tau). Strictly decreasing in c.
double ratio_gap(const ToyParams& tp, double c, double tau);

// K(c) = (1-q)/(p-q) * (1 - mu1/lambda1): the value of kappa for which c is
// the positive-branch speed at delay tau. Strictly decreasing in c with
// K(0+) = 1/(1 + sqrt((1-p)/(1-q))).
double K_of_c(const ToyParams& tp, double c, double tau);

struct SpeedResult {
    double c = 0.0;
    bool positive_branch = true;
    double mu1 = 0.0;     // at |c|
    double lambda1 = 0.0; // at |c|
    double K_value = 0.0; // NaN on the negative branch
};

// Branch chosen by sign(1 - k*); bisection + secant polish on the branch
// equation. Throws ModelError when |k*-1| < 1e-9.
SpeedResult wave_speed(const ToyParams& tp, double tau);

// Exact profile, normalized so phi passes through kappa where the delayed
// argument crosses the slope break. Positive branch: closed form on t <= 0,
// method-of-steps integration (RK4 on segments of length h, dense cubic
// history, projection filter removing the unstable mode at each segment
// boundary) on t > 0. Negative branch: the reflection u -> 1 - u, t -> -t
// maps it onto the same construction with the roles of p and q swapped and
// threshold 1 - kappa, so the t >= 0 side is a single exponential and the
// t < 0 side is integrated. residual_inf is a finite-difference audit on
// the output grid, skipping the nodes straddling the slope-break preimage
// at t = 0.
WaveProfile exact_profile(const ToyParams& tp, double tau,
                          const std::vector<double>& t_grid);

// Grid [-t_back, t_fwd] with spacing dt; t_fwd = max(40, 20/|rate|) where
// rate is the slowest tail decay rate at the invaded state, t_back sized so
// the left tail clears 1e-14.
std::vector<double> default_profile_grid(const ToyParams& tp, double tau,
                                         double dt = 0.01);

struct CurvePoint {
    double tau = 0.0;
    double c = 0.0;
    bool monotone = false; // equals the domain membership test on this family
    bool in_domain = false;
};

struct SpeedCurve {
    std::vector<CurvePoint> points;
    bool positive_branch = true;
    // Positive branch only: delay at which c(tau) crosses the critical speed
    // (bisection-refined to 1e-6); empty when the curve stays inside.
    std::optional<double> domain_exit_tau;
};

// Speed over a tau grid. Domain membership is tested against the region
// where the characteristic function with coefficients (-1, q) keeps three
// real roots, evaluated at |c|. On the positive branch monotonicity holds
// exactly inside and fails outside, so the monotone flag equals membership;
// on the negative branch the wave is monotone for every delay and the flag
// is always true (membership is still reported).
SpeedCurve speed_curve(const ToyParams& tp, const std::vector<double>& tau_grid,
                       int jobs = 1);

} // namespace delfront::toy_model
