#pragma once
#include <complex>
#include <optional>
#include <vector>

namespace delfront::quasipoly {

// chi(z) = z^2 - c*z + a + b*exp(-z*h) with h = c*tau >= 0.
// This is the linearization of the profile equation at a rest state with
// g_u = a, g_v = b; its real roots are the admissible tail decay rates.
struct CharParams {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double h = 0.0;
};

// Throws ArgumentError unless all fields are finite, c > 0 and h >= 0.
void validate(const CharParams& p);

std::complex<double> eval_char(const CharParams& p, std::complex<double> z);
double eval_char(const CharParams& p, double z);
double eval_char_deriv(const CharParams& p, double z);
double eval_char_deriv2(const CharParams& p, double z);

// Polished real roots satisfy |chi| <= kRootResidualTol * local scale.
inline constexpr double kRootResidualTol = 1e-11;

struct RealRoot {
    double value = 0.0;
    int multiplicity = 1; // 2 when chi and chi' vanish together to tolerance
};

// Rectangle [re_min, re_max] x [-im_max, im_max] in the complex plane.
struct Window {
    double re_min = 0.0;
    double re_max = 0.0;
    double im_max = 0.0;
};

// Largest positive real root. Requires a + b < 0 (so chi(0) < 0 and a
// positive root exists); throws ModelError otherwise. Valid for any finite
// c, not just c > 0.
double dominant_positive_root(const CharParams& p);

// Left edge L < 0 such that no real root lies below L (the exponential term
// dominates the quadratic for z < L when b != 0 and h > 0).
double real_scan_left_edge(const CharParams& p);

// All real roots in [lo, hi]: dense sign scan of chi and chi' with local
// refinement, bisection brackets polished by Newton. Double roots are
// detected through chi' and reported once with multiplicity 2.
std::vector<RealRoot> real_roots(const CharParams& p, double lo, double hi);

// Total root count inside the window (argument principle, adaptive phase
// tracking along the boundary). The window inflates by small factors, at
// most five times, when a root sits too close to the boundary; throws
// SolverError("ill-posed window") if clearance is never achieved and
// ArgumentError for degenerate rectangles.
int count_roots_in_window(const CharParams& p, Window w, Window* used = nullptr);

Window default_window(const CharParams& p);

struct RootReport {
    std::vector<RealRoot> real_roots;    // over the full adaptive real range
    int complex_pairs_in_window = 0;
    Window window{};                     // window actually used (post inflation)
    std::optional<double> dominant_real; // rightmost real root when a+b < 0
};

// Full classification: real scan plus argument-principle count over the
// window; complex pair count is (total - real-in-window)/2 and a mismatch
// in parity raises SolverError.
RootReport analyze(const CharParams& p, std::optional<Window> w = std::nullopt);

} // namespace delfront::quasipoly
