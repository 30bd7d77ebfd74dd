#pragma once
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "delfront/errors.hpp"

namespace delfront::detail {

// adaptive Simpson with absolute tolerance
inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-10) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// least-squares line y = a + b x; returns {a, b, r_squared}
struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r_squared = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    if (n < 2 || y.size() != n) throw ArgumentError("fit_line needs >= 2 points");
    double sx = 0, sy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    out.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return out;
}

// cubic interpolation through four consecutive nodes of a uniform grid
// (Lagrange form); x is the offset from node j in units of the spacing,
// sensible for x in [1, 2] relative to the window start
inline double cubic4(double f0, double f1, double f2, double f3, double x) {
    const double c0 = -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0;
    const double c1 = x * (x - 2.0) * (x - 3.0) / 2.0;
    const double c2 = -x * (x - 1.0) * (x - 3.0) / 2.0;
    const double c3 = x * (x - 1.0) * (x - 2.0) / 6.0;
    return c0 * f0 + c1 * f1 + c2 * f2 + c3 * f3;
}

// 4-point Lagrange interpolation on a strictly increasing grid, tolerating
// nonuniform spacing; x must lie inside [t.front(), t.back()] and the grid
// needs at least four nodes
inline double interp_cubic(const std::vector<double>& t, const std::vector<double>& y,
                           double x) {
    const size_t n = t.size();
    size_t j = static_cast<size_t>(
        std::upper_bound(t.begin(), t.end(), x) - t.begin());
    if (j > 0) --j;
    if (j >= n - 1) j = n - 2;
    size_t lo = (j == 0) ? 0 : j - 1;
    if (lo + 3 >= n) lo = n - 4;
    double out = 0.0;
    for (size_t k = 0; k < 4; ++k) {
        double w = 1.0;
        for (size_t l = 0; l < 4; ++l) {
            if (l == k) continue;
            w *= (x - t[lo + l]) / (t[lo + k] - t[lo + l]);
        }
        out += w * y[lo + k];
    }
    return out;
}

} // namespace delfront::detail
