#include "delfront/quasipoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "delfront/errors.hpp"

namespace delfront::quasipoly {

namespace {

constexpr double kExpUnderflow = -700.0;
constexpr double kHuge = 1e308;

// local magnitude of the three chi terms; tolerances scale with it
double local_scale(const CharParams& p, double z) {
    double ex = -z * p.h;
    double bterm = (ex > 700.0) ? kHuge : std::abs(p.b) * std::exp(ex);
    return std::max({1.0, z * z, std::abs(p.c * z), std::abs(p.a), bterm});
}

} // namespace

void validate(const CharParams& p) {
    if (!std::isfinite(p.a) || !std::isfinite(p.b) || !std::isfinite(p.c) ||
        !std::isfinite(p.h))
        throw ArgumentError("characteristic parameters must be finite");
    if (!(p.c > 0.0)) throw ArgumentError("wave speed c must be positive");
    if (p.h < 0.0) throw ArgumentError("delay footprint h must be nonnegative");
}

double eval_char(const CharParams& p, double z) {
    const double quad = (z - p.c) * z + p.a;
    if (p.b == 0.0) return quad;
    const double x = -z * p.h;
    if (x < kExpUnderflow) return quad;
    if (x > 600.0) {
        // evaluate b*exp(x) in log form so intermediate exp() cannot overflow
        const double lg = x + std::log(std::abs(p.b));
        if (lg > 708.0) return p.b > 0 ? kHuge : -kHuge;
        return quad + (p.b > 0 ? std::exp(lg) : -std::exp(lg));
    }
    return quad + p.b * std::exp(x);
}

double eval_char_deriv(const CharParams& p, double z) {
    const double lin = 2.0 * z - p.c;
    if (p.b == 0.0 || p.h == 0.0) return lin;
    const double x = -z * p.h;
    if (x < kExpUnderflow) return lin;
    const double coef = -p.b * p.h;
    if (x > 600.0) {
        const double lg = x + std::log(std::abs(coef));
        if (lg > 708.0) return coef > 0 ? kHuge : -kHuge;
        return lin + (coef > 0 ? std::exp(lg) : -std::exp(lg));
    }
    return lin + coef * std::exp(x);
}

double eval_char_deriv2(const CharParams& p, double z) {
    if (p.b == 0.0 || p.h == 0.0) return 2.0;
    const double x = -z * p.h;
    if (x < kExpUnderflow) return 2.0;
    const double coef = p.b * p.h * p.h;
    if (x > 600.0) {
        const double lg = x + std::log(std::abs(coef));
        if (lg > 708.0) return coef > 0 ? kHuge : -kHuge;
        return 2.0 + (coef > 0 ? std::exp(lg) : -std::exp(lg));
    }
    return 2.0 + coef * std::exp(x);
}

std::complex<double> eval_char(const CharParams& p, std::complex<double> z) {
    const std::complex<double> quad = (z - p.c) * z + p.a;
    if (p.b == 0.0) return quad;
    const std::complex<double> x = -z * p.h;
    if (x.real() > 690.0) {
        // saturate the magnitude but keep the phase continuous for winding
        return p.b * std::exp(std::complex<double>(690.0, x.imag()));
    }
    if (x.real() < kExpUnderflow) return quad;
    return quad + p.b * std::exp(x);
}

double dominant_positive_root(const CharParams& p) {
    if (!(p.a + p.b < 0.0))
        throw ModelError("no guaranteed positive root: a + b >= 0 at the rest state");

    auto bisect_up = [&](double lo, double hi) {
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            (eval_char(p, mid) <= 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    double hi = 1.0;
    int guard = 0;
    while (eval_char(p, hi) <= 0.0) {
        hi *= 2.0;
        if (++guard > 60) throw SolverError("positive root bracket failed");
    }
    double r = bisect_up(0.0, hi);

    // chi can wiggle back below zero for b < 0; make sure we hold the last
    // up-crossing, not an earlier one
    for (int pass = 0; pass < 4; ++pass) {
        const double right = 2.0 * std::abs(r) + 10.0;
        double zneg = std::numeric_limits<double>::quiet_NaN();
        for (int i = 1; i <= 64; ++i) {
            const double z = r + (right - r) * i / 64.0;
            if (eval_char(p, z) < 0.0) {
                zneg = z;
                break;
            }
        }
        if (!std::isfinite(zneg)) break;
        double hi2 = right;
        guard = 0;
        while (eval_char(p, hi2) <= 0.0) {
            hi2 *= 2.0;
            if (++guard > 60) throw SolverError("positive root bracket failed");
        }
        r = bisect_up(zneg, hi2);
    }

    for (int it = 0; it < 10; ++it) {
        const double f = eval_char(p, r);
        const double d = eval_char_deriv(p, r);
        if (d == 0.0) break;
        const double step = f / d;
        const double rn = r - step;
        if (!std::isfinite(rn)) break;
        r = rn;
        if (std::abs(step) < 1e-17 * std::max(1.0, std::abs(r))) break;
    }
    if (std::abs(eval_char(p, r)) > kRootResidualTol * local_scale(p, r))
        throw SolverError("positive root polish failed its residual bound");
    return r;
}

double real_scan_left_edge(const CharParams& p) {
    const double quad_bound =
        2.0 + std::abs(p.c) + 2.0 * std::sqrt(std::abs(p.a) + std::abs(p.b) + 1.0);
    // for h <= 0 the exponential dies out toward -inf, so the quadratic bound holds
    if (p.b == 0.0 || p.h <= 0.0) return -quad_bound;
    double L = std::max(8.0, quad_bound);
    for (int it = 0; it < 70; ++it) {
        if (L * p.h > 700.0) break; // exponential term certainly dominates
        const bool past_turn = L >= 2.0 / p.h; // ratio exp/quad grows beyond here
        if (past_turn && std::abs(p.b) * std::exp(L * p.h) >
                             4.0 * (L * L + std::abs(p.c) * L + std::abs(p.a) + 1.0))
            break;
        L *= 2.0;
    }
    return -L;
}

std::vector<RealRoot> real_roots(const CharParams& p, double lo, double hi) {
    if (!(lo < hi)) throw ArgumentError("empty real scan interval");

    struct Cell {
        double l, r, fl, fr, gl, gr;
    };
    auto f = [&](double z) { return eval_char(p, z); };
    auto g = [&](double z) { return eval_char_deriv(p, z); };
    auto changed = [](double u, double v) {
        return (u <= 0.0 && v > 0.0) || (u >= 0.0 && v < 0.0) || (u == 0.0) ;
    };

    const int kBase = 4096;
    std::vector<Cell> cells;
    {
        double zl = lo, fl = f(lo), gl = g(lo);
        for (int i = 1; i <= kBase; ++i) {
            const double zr = lo + (hi - lo) * i / kBase;
            const double fr = f(zr), gr = g(zr);
            if (changed(fl, fr) || changed(gl, gr))
                cells.push_back({zl, zr, fl, fr, gl, gr});
            zl = zr;
            fl = fr;
            gl = gr;
        }
    }
    // four refinement passes, 4x density each, around every sign change
    for (int pass = 0; pass < 4; ++pass) {
        std::vector<Cell> next;
        for (const Cell& c : cells) {
            double zs[5], fs[5], gs[5];
            for (int k = 0; k <= 4; ++k) {
                zs[k] = c.l + (c.r - c.l) * k / 4.0;
            }
            fs[0] = c.fl; fs[4] = c.fr; gs[0] = c.gl; gs[4] = c.gr;
            for (int k = 1; k <= 3; ++k) {
                fs[k] = f(zs[k]);
                gs[k] = g(zs[k]);
            }
            for (int k = 0; k < 4; ++k)
                if (changed(fs[k], fs[k + 1]) || changed(gs[k], gs[k + 1]))
                    next.push_back({zs[k], zs[k + 1], fs[k], fs[k + 1], gs[k], gs[k + 1]});
        }
        cells = std::move(next);
    }

    auto bisect_on = [&](auto&& fn, double l, double r, double vl) {
        for (int it = 0; it < 140; ++it) {
            const double mid = 0.5 * (l + r);
            if (mid == l || mid == r) break;
            const double vm = fn(mid);
            if ((vl <= 0.0) == (vm <= 0.0)) {
                l = mid;
                vl = vm;
            } else {
                r = mid;
            }
        }
        return 0.5 * (l + r);
    };

    std::vector<double> simples;
    std::vector<double> doubles;
    for (const Cell& c : cells) {
        if (changed(c.fl, c.fr)) {
            double r = bisect_on(f, c.l, c.r, c.fl);
            for (int it = 0; it < 8; ++it) { // Newton polish
                const double d = g(r);
                if (d == 0.0) break;
                const double step = f(r) / d;
                const double rn = r - step;
                if (!std::isfinite(rn) || rn < c.l - (c.r - c.l) || rn > c.r + (c.r - c.l))
                    break;
                r = rn;
                if (std::abs(step) < 1e-17 * std::max(1.0, std::abs(r))) break;
            }
            simples.push_back(r);
        }
        if (changed(c.gl, c.gr)) {
            const double m = bisect_on(g, c.l, c.r, c.gl);
            const double S = local_scale(p, m);
            if (std::abs(f(m)) < 1e-9 * S && std::abs(g(m)) < 1e-7 * S)
                doubles.push_back(m);
        }
    }

    std::sort(simples.begin(), simples.end());
    simples.erase(std::unique(simples.begin(), simples.end(),
                              [](double u, double v) {
                                  return std::abs(u - v) <=
                                         1e-11 * std::max(1.0, std::abs(u));
                              }),
                  simples.end());
    std::sort(doubles.begin(), doubles.end());
    doubles.erase(std::unique(doubles.begin(), doubles.end(),
                              [](double u, double v) {
                                  return std::abs(u - v) <=
                                         1e-7 * std::max(1.0, std::abs(u));
                              }),
                  doubles.end());

    std::vector<RealRoot> out;
    for (double m : doubles) {
        // a detected double root absorbs any nearby bracketed simples
        const double d2 = std::abs(eval_char_deriv2(p, m));
        const double radius =
            2.0 * std::sqrt(std::abs(f(m)) / std::max(d2, 1e-3)) +
            1e-9 * std::max(1.0, std::abs(m));
        simples.erase(std::remove_if(simples.begin(), simples.end(),
                                     [&](double r) { return std::abs(r - m) <= radius; }),
                      simples.end());
        out.push_back({m, 2});
    }
    for (double r : simples) out.push_back({r, 1});
    std::sort(out.begin(), out.end(),
              [](const RealRoot& u, const RealRoot& v) { return u.value < v.value; });
    return out;
}

namespace {

struct NearBoundary {};

// phase increment along one segment, subdividing until each piece turns by
// less than pi/2
double walk_phase(const CharParams& p, std::complex<double> z0, std::complex<double> z1,
                  std::complex<double> f0, std::complex<double> f1, int depth) {
    auto clearance = [&](std::complex<double> z, std::complex<double> fz) {
        const double S = std::max({1.0, std::norm(z), std::abs(p.b)});
        if (std::abs(fz) < 1e-11 * S) throw NearBoundary{};
    };
    clearance(z0, f0);
    clearance(z1, f1);
    const double dphi = std::arg(f1 / f0);
    if (depth > 48) return dphi; // give up subdividing; caller checks closure
    if (std::abs(dphi) <= 1.3 && depth >= 2) return dphi;
    const std::complex<double> zm = 0.5 * (z0 + z1);
    const std::complex<double> fm = eval_char(p, zm);
    return walk_phase(p, z0, zm, f0, fm, depth + 1) +
           walk_phase(p, zm, z1, fm, f1, depth + 1);
}

struct WindingResult {
    bool ok = false;
    int count = 0;
};

WindingResult try_winding(const CharParams& p, const Window& w, int base_per_edge) {
    using C = std::complex<double>;
    const C corners[4] = {{w.re_min, -w.im_max},
                          {w.re_max, -w.im_max},
                          {w.re_max, w.im_max},
                          {w.re_min, w.im_max}};
    double total = 0.0;
    try {
        for (int e = 0; e < 4; ++e) {
            const C a = corners[e], b = corners[(e + 1) % 4];
            C zp = a, fp = eval_char(p, zp);
            for (int i = 1; i <= base_per_edge; ++i) {
                const C z = a + (b - a) * (double(i) / base_per_edge);
                const C fz = eval_char(p, z);
                total += walk_phase(p, zp, z, fp, fz, 0);
                zp = z;
                fp = fz;
            }
        }
    } catch (const NearBoundary&) {
        return {false, 0};
    }
    const double turns = total / (2.0 * M_PI);
    const long n = std::lround(turns);
    if (std::abs(turns - double(n)) > 0.05 || n < 0)
        return {false, int(n)}; // unreliable winding; caller densifies/inflates
    return {true, int(n)};
}

} // namespace

int count_roots_in_window(const CharParams& p, Window w, Window* used) {
    if (!std::isfinite(w.re_min) || !std::isfinite(w.re_max) || !std::isfinite(w.im_max) ||
        !(w.re_min < w.re_max) || !(w.im_max > 0.0))
        throw ArgumentError("ill-posed window");
    int base = 96;
    for (int infl = 0; infl <= 5; ++infl) {
        const WindingResult r = try_winding(p, w, base);
        if (r.ok) {
            if (used) *used = w;
            return r.count;
        }
        // a root sits too close to the contour (or the winding failed to
        // close): inflate about the center and densify
        const double cx = 0.5 * (w.re_min + w.re_max);
        const double hw = 0.5 * (w.re_max - w.re_min);
        w.re_min = cx - hw * 1.13;
        w.re_max = cx + hw * 1.13;
        w.im_max *= 1.13;
        base *= 2;
    }
    throw SolverError("ill-posed window: no clearance after five inflations");
}

Window default_window(const CharParams& p) {
    double re_max = 5.0;
    if (p.a + p.b < 0.0) re_max = std::max(5.0, 2.0 * dominant_positive_root(p));
    const double re_min = std::max(-30.0, -250.0 / std::max(p.h, 1e-8));
    const double im_max = 60.0 / std::max(p.h, 0.1);
    return {re_min, re_max, im_max};
}

RootReport analyze(const CharParams& p, std::optional<Window> wopt) {
    validate(p);
    const Window w = wopt ? *wopt : default_window(p);
    RootReport rep;

    double lo = std::min(real_scan_left_edge(p), w.re_min);
    double hi = std::max(5.0, w.re_max);
    if (p.a + p.b < 0.0) {
        const double d = dominant_positive_root(p);
        hi = std::max(hi, d + 5.0);
        rep.dominant_real = d;
    }
    rep.real_roots = real_roots(p, lo, hi);

    Window used{};
    const int total = count_roots_in_window(p, w, &used);
    rep.window = used;
    int real_in = 0;
    for (const RealRoot& r : rep.real_roots)
        if (r.value >= used.re_min && r.value <= used.re_max) real_in += r.multiplicity;
    const int rem = total - real_in;
    if (rem < 0 || rem % 2 != 0)
        throw SolverError("argument-principle total inconsistent with real roots");
    rep.complex_pairs_in_window = rem / 2;
    return rep;
}

} // namespace delfront::quasipoly
