#include "delfront/wave_verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "delfront/detail/numeric.hpp"
#include "delfront/errors.hpp"
#include "delfront/quasipoly.hpp"

namespace delfront::wave_verify {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// NaN outside the grid, cubic inside
double interp_profile(const std::vector<double>& t, const std::vector<double>& y,
                      double x) {
    if (!(x >= t.front() && x <= t.back())) return kNan;
    return detail::interp_cubic(t, y, x);
}

void validate_input(const WaveProfile& w, const model_zoo::SteadyStates& s) {
    const std::size_t n = w.t.size();
    if (n != w.phi.size()) throw ArgumentError("profile grid/value size mismatch");
    if (n < 16) throw ArgumentError("profile too short to verify (need >= 16 nodes)");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(w.t[i] < w.t[i + 1]))
            throw ArgumentError("profile grid must be strictly increasing");
    if (!std::isfinite(w.c) || !std::isfinite(w.tau) || w.tau < 0.0)
        throw ArgumentError("profile speed/delay must be finite with tau >= 0");
    if (std::abs(w.h - w.c * w.tau) > 1e-9 * std::max(1.0, std::abs(w.h)))
        throw ArgumentError("profile field h does not equal c*tau");
    if (!(s.e3 - s.e1 > 0.0)) throw ArgumentError("steady states must satisfy e1 < e3");
}

} // namespace

VerifyReport verify(const WaveProfile& w, const model_zoo::ModelSpec& m,
                    const model_zoo::SteadyStates& s) {
    validate_input(w, s);
    const std::size_t n = w.t.size();
    const double span = s.e3 - s.e1;

    VerifyReport rep;

    // delayed values at every node; NaN where t - h leaves the grid
    std::vector<double> vd(n, kNan);
    for (std::size_t i = 0; i < n; ++i)
        vd[i] = interp_profile(w.t, w.phi, w.t[i] - w.h);

    // a stencil is skipped when the delayed trajectory crosses or touches a
    // non-Lipschitz level of g(., v) anywhere inside it
    auto near_kink = [&](std::size_t i) {
        for (double lev : m.nonsmooth_v_levels) {
            if (std::abs(vd[i] - lev) <= 1e-9 * span) return true;
            if (std::isfinite(vd[i - 1]) && std::isfinite(vd[i + 1]) &&
                (vd[i - 1] - lev) * (vd[i + 1] - lev) <= 0.0)
                return true;
        }
        return false;
    };

    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!std::isfinite(vd[i])) continue;
        if (!m.nonsmooth_v_levels.empty() && near_kink(i)) {
            ++rep.residual_nodes_skipped;
            continue;
        }
        const double dm = w.t[i] - w.t[i - 1];
        const double dp = w.t[i + 1] - w.t[i];
        const double denom = dm * dp * (dm + dp);
        const double d1 =
            (dm * dm * w.phi[i + 1] + (dp * dp - dm * dm) * w.phi[i] -
             dp * dp * w.phi[i - 1]) / denom;
        const double d2 =
            2.0 * (dm * w.phi[i + 1] - (dm + dp) * w.phi[i] + dp * w.phi[i - 1]) / denom;
        const double res = d2 - w.c * d1 + m.g(w.phi[i], vd[i]);
        worst = std::max(worst, std::abs(res));
    }
    rep.residual_inf = worst;

    const double mono_tol = 1e-9 * span;
    rep.monotone = true;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (w.phi[i + 1] < w.phi[i] - mono_tol) {
            rep.monotone = false;
            rep.first_nonmonotone_t = w.t[i];
            break;
        }
    }

    // crossings of e3 to the right of the last midline crossing, kept only
    // when the excursions on both sides rise above the noise floor
    const double floor_amp =
        std::max(1e-10 * span, 0.05 * std::abs(w.residual_inf));
    const double mid = 0.5 * (s.e1 + s.e3);
    std::size_t tail_start = 0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        if ((w.phi[i] - mid) * (w.phi[i + 1] - mid) <= 0.0) tail_start = i + 1;
    std::vector<std::size_t> cross;
    for (std::size_t i = tail_start; i + 1 < n; ++i)
        if ((w.phi[i] - s.e3) * (w.phi[i + 1] - s.e3) < 0.0) cross.push_back(i);
    if (!cross.empty()) {
        auto seg_max = [&](std::size_t lo, std::size_t hi) {
            double a = 0.0;
            for (std::size_t i = lo; i <= hi; ++i)
                a = std::max(a, std::abs(w.phi[i] - s.e3));
            return a;
        };
        std::vector<double> amp(cross.size() + 1);
        amp.front() = seg_max(tail_start, cross.front());
        for (std::size_t k = 1; k < cross.size(); ++k)
            amp[k] = seg_max(cross[k - 1] + 1, cross[k]);
        amp.back() = seg_max(cross.back() + 1, n - 1);
        for (std::size_t k = 0; k < cross.size(); ++k)
            if (amp[k] > floor_amp && amp[k + 1] > floor_amp) ++rep.tail_sign_changes;
    }

    // characteristic rates at the two rest states; either speed sign is fine
    rep.predicted_left = kNan;
    rep.predicted_right = kNan;
    try {
        const quasipoly::CharParams pl{m.g1(s.e1, s.e1), m.g2(s.e1, s.e1), w.c, w.h};
        rep.predicted_left = quasipoly::dominant_positive_root(pl);
    } catch (const std::exception&) {
    }
    try {
        const quasipoly::CharParams pr{m.g1(s.e3, s.e3), m.g2(s.e3, s.e3), w.c, w.h};
        const auto rr =
            quasipoly::real_roots(pr, quasipoly::real_scan_left_edge(pr), -1e-12);
        if (!rr.empty()) {
            rep.predicted_right = rr.back().value;
            rep.right_multiplicity = rr.back().multiplicity;
        }
    } catch (const std::exception&) {
    }

    auto fit_side = [&](bool left) -> std::optional<ExponentFit> {
        const double rest = left ? s.e1 : s.e3;
        const std::size_t lo = left ? 0 : n / 2;
        const std::size_t hi = left ? n / 2 : n - 1;
        const bool strip_t = !left && rep.right_multiplicity == 2;
        std::vector<double> xs, ys;
        double amin = std::numeric_limits<double>::infinity();
        double amax = 0.0;
        for (std::size_t i = lo; i <= hi; ++i) {
            const double a = std::abs(w.phi[i] - rest);
            if (a < floor_amp || a > 0.08 * span) continue;
            double yv = std::log(a);
            if (strip_t) {
                // amplitude ~ (a0 + a1*t) * exp(rate*t); remove the prefactor
                if (!(w.t[i] > 1.0)) continue;
                yv -= std::log(w.t[i]);
            }
            xs.push_back(w.t[i]);
            ys.push_back(yv);
            amin = std::min(amin, a);
            amax = std::max(amax, a);
        }
        if (xs.size() < 4) return std::nullopt;
        const auto lf = detail::fit_line(xs, ys);
        ExponentFit f;
        f.rate = lf.slope;
        f.r_squared = lf.r_squared;
        f.points = static_cast<int>(xs.size());
        f.reliable = (amax >= 10.0 * amin) && f.points >= 8;
        if (!f.reliable) f.note = "amplitude window spans less than a decade";
        if (strip_t)
            f.note += (f.note.empty() ? "" : "; ") +
                      std::string("t prefactor removed (double tail root)");
        return f;
    };
    rep.left_fit = fit_side(true);
    if (rep.tail_sign_changes == 0) rep.right_fit = fit_side(false);

    return rep;
}

} // namespace delfront::wave_verify
