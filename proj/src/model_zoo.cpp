#include "delfront/model_zoo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "delfront/detail/numeric.hpp"
#include "delfront/errors.hpp"
#include "delfront/io.hpp"

namespace delfront::model_zoo {

namespace {

constexpr int kScanCells = 2048;
constexpr int kGrid = 400;

std::string fmt_id(const char* fmt, double a, double b, double c = 0.0,
                   double d = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), fmt, a, b, c, d);
    return buf;
}

void require_finite(double x, const char* name) {
    if (!std::isfinite(x))
        throw ArgumentError(std::string("model parameter '") + name +
                            "' must be finite");
}

double poly_eval(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
    return acc;
}

double poly_deriv_eval(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (size_t k = c.size(); k-- > 1;) acc = acc * x + k * c[k];
    return acc;
}

double parse_double(const std::string& key, const std::string& raw) {
    try {
        size_t used = 0;
        const double x = std::stod(raw, &used);
        while (used < raw.size() && std::isspace(static_cast<unsigned char>(raw[used])))
            ++used;
        if (used != raw.size()) throw std::invalid_argument("trailing");
        if (!std::isfinite(x)) throw std::invalid_argument("nonfinite");
        return x;
    } catch (const std::exception&) {
        throw ArgumentError("config value for '" + key + "' is not a number: " + raw);
    }
}

// u-probes for the v-extremum detection; interior of (e1, e3)
std::vector<double> probe_points(double lo, double hi) {
    std::vector<double> out;
    for (int i = 1; i <= 7; ++i) out.push_back(lo + (hi - lo) * i / 8.0);
    return out;
}

} // namespace

ModelSpec make_mackey_glass(double A, double r) {
    require_finite(A, "A");
    require_finite(r, "r");
    if (!(A > 0.0)) throw ArgumentError("mackey_glass: A must be > 0");
    if (!(r > 0.0 && r < 1.0)) throw ArgumentError("mackey_glass: r must lie in (0, 1)");
    ModelSpec m;
    m.g = [A, r](double u, double v) {
        return -u + v + A * v * (v - r) * (1.0 - v);
    };
    m.g1 = [](double, double) { return -1.0; };
    m.g2 = [A, r](double, double v) {
        return 1.0 + A * (-3.0 * v * v + 2.0 * (1.0 + r) * v - r);
    };
    m.domain_lo = -0.25;
    m.domain_hi = 1.25;
    m.kind = ModelKind::mackey_glass;
    m.id = fmt_id("mackey_glass(A=%g,r=%g)", A, r);
    return m;
}

ModelSpec make_virus(double amp, double width, double v0) {
    require_finite(amp, "amp");
    require_finite(width, "width");
    require_finite(v0, "v0");
    if (!(amp > 0.0 && amp < 1.0))
        throw ArgumentError("virus: amp must lie in (0, 1)");
    if (!(width > 0.0)) throw ArgumentError("virus: width must be > 0");
    if (!(v0 > 0.0 && v0 < 1.0))
        throw ArgumentError("virus: v0 must lie in (0, 1)");
    auto f = [amp, width, v0](double v) {
        return amp * std::exp(-width * (v - v0) * (v - v0));
    };
    ModelSpec m;
    m.g = [f](double u, double v) { return u * (1.0 - u - f(v)); };
    m.g1 = [f](double u, double v) { return 1.0 - 2.0 * u - f(v); };
    m.g2 = [f, width, v0](double u, double v) {
        return u * 2.0 * width * (v - v0) * f(v);
    };
    // u = 0 is a rest state of the kinetics but not part of the bistable
    // triple; the working interval starts above it
    m.domain_lo = 0.01;
    m.domain_hi = 1.25;
    m.kind = ModelKind::virus;
    m.id = fmt_id("virus(amp=%g,width=%g,v0=%g)", amp, width, v0);
    return m;
}

ModelSpec make_toy_smooth(double kappa, double p, double q, double eps) {
    require_finite(kappa, "kappa");
    require_finite(p, "p");
    require_finite(q, "q");
    require_finite(eps, "eps");
    if (!(kappa > 0.0 && kappa < 1.0))
        throw ArgumentError("toy_smooth: kappa must lie in (0, 1)");
    if (!(p > 0.0 && p < 1.0)) throw ArgumentError("toy_smooth: p must lie in (0, 1)");
    if (!(q < 0.0)) throw ArgumentError("toy_smooth: q must be < 0");
    if (!(eps > 0.0)) throw ArgumentError("toy_smooth: eps must be > 0");
    auto f = [kappa, p, q, eps](double v) {
        const double s = 1.0 / (1.0 + std::exp(-(v - kappa) / eps));
        return (1.0 - s) * p * v + s * (1.0 + q * (v - 1.0));
    };
    auto fp = [kappa, p, q, eps](double v) {
        const double s = 1.0 / (1.0 + std::exp(-(v - kappa) / eps));
        const double sp = s * (1.0 - s) / eps;
        return (1.0 - s) * p + s * q + sp * (1.0 + q * (v - 1.0) - p * v);
    };
    ModelSpec m;
    m.g = [f](double u, double v) { return -u + f(v); };
    m.g1 = [](double, double) { return -1.0; };
    m.g2 = [fp](double, double v) { return fp(v); };
    m.domain_lo = -0.25;
    m.domain_hi = 1.25;
    m.kind = ModelKind::toy_smooth;
    m.id = fmt_id("toy_smooth(kappa=%g,p=%g,q=%g,eps=%g)", kappa, p, q, eps);
    return m;
}

ModelSpec make_toy_exact(double kappa, double p, double q) {
    require_finite(kappa, "kappa");
    require_finite(p, "p");
    require_finite(q, "q");
    if (!(kappa > 0.0 && kappa < 1.0))
        throw ArgumentError("toy_exact: kappa must lie in (0, 1)");
    if (!(p > 0.0 && p < 1.0)) throw ArgumentError("toy_exact: p must lie in (0, 1)");
    if (!(q < 0.0)) throw ArgumentError("toy_exact: q must be < 0");
    auto f = [kappa, p, q](double v) {
        return v < kappa ? p * v : 1.0 + q * (v - 1.0);
    };
    ModelSpec m;
    m.g = [f](double u, double v) { return -u + f(v); };
    m.g1 = [](double, double) { return -1.0; };
    m.g2 = [kappa, p, q](double, double v) { return v < kappa ? p : q; };
    m.domain_lo = -0.25;
    m.domain_hi = 1.25;
    m.kind = ModelKind::custom;
    m.id = fmt_id("toy_exact(kappa=%g,p=%g,q=%g)", kappa, p, q);
    m.nonsmooth_v_levels = {kappa};
    return m;
}

ModelSpec make_custom_birth(const std::vector<double>& coeffs, double lo,
                            double hi) {
    if (coeffs.empty()) throw ArgumentError("custom: empty coefficient list");
    for (double c : coeffs) require_finite(c, "coeffs");
    require_finite(lo, "domain_lo");
    require_finite(hi, "domain_hi");
    if (!(lo < hi)) throw ArgumentError("custom: domain_lo must be < domain_hi");
    ModelSpec m;
    m.g = [coeffs](double u, double v) { return -u + poly_eval(coeffs, v); };
    m.g1 = [](double, double) { return -1.0; };
    m.g2 = [coeffs](double, double v) { return poly_deriv_eval(coeffs, v); };
    m.domain_lo = lo;
    m.domain_hi = hi;
    m.kind = ModelKind::custom;
    std::ostringstream id;
    id << "custom(coeffs=";
    for (size_t k = 0; k < coeffs.size(); ++k) {
        if (k) id << ",";
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", coeffs[k]);
        id << buf;
    }
    id << ")";
    m.id = id.str();
    return m;
}

SteadyStates find_steady_states(const ModelSpec& m) {
    const double lo = m.domain_lo, hi = m.domain_hi;
    auto diag = [&](double u) { return m.g(u, u); };

    std::vector<double> roots;
    auto push_root = [&](double r) {
        for (double existing : roots)
            if (std::abs(existing - r) < (hi - lo) * 1e-9) return;
        roots.push_back(r);
    };

    double prev_u = lo, prev_g = diag(lo);
    for (int i = 1; i <= kScanCells; ++i) {
        const double u = lo + (hi - lo) * i / kScanCells;
        const double gu = diag(u);
        if (prev_g == 0.0) push_root(prev_u);
        if (prev_g * gu < 0.0) {
            double a = prev_u, b = u;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (a + b);
                if (b - a < 1e-12 * std::max(1.0, std::abs(mid))) break;
                (diag(mid) * diag(a) <= 0.0 ? b : a) = mid;
            }
            push_root(0.5 * (a + b));
        }
        prev_u = u;
        prev_g = gu;
    }
    if (prev_g == 0.0) push_root(prev_u);
    std::sort(roots.begin(), roots.end());

    if (roots.size() != 3)
        throw ModelError("not bistable on the given interval: found " +
                         std::to_string(roots.size()) +
                         " diagonal rest states, need 3");

    // stability pattern along the diagonal: down, up, down
    const double step = (hi - lo) * 1e-7;
    auto dslope = [&](double u) {
        return (diag(u + step) - diag(u - step)) / (2.0 * step);
    };
    if (!(dslope(roots[0]) < 0.0 && dslope(roots[1]) > 0.0 &&
          dslope(roots[2]) < 0.0))
        throw ModelError(
            "not bistable on the given interval: wrong stability pattern");
    return SteadyStates{roots[0], roots[1], roots[2]};
}

double integral_over_diagonal(const ModelSpec& m, const SteadyStates& s) {
    auto diag = [&](double u) { return m.g(u, u); };
    std::vector<double> cuts{s.e1};
    for (double lev : m.nonsmooth_v_levels)
        if (lev > s.e1 && lev < s.e3) cuts.push_back(lev);
    cuts.push_back(s.e3);
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i)
        acc += detail::adaptive_simpson(diag, cuts[i], cuts[i + 1], 1e-10);
    return acc;
}

HypothesisReport check_hypotheses(const ModelSpec& m, const SteadyStates& s) {
    HypothesisReport rep;
    const double span = s.e3 - s.e1;
    char buf[192];

    // (stability of the outer pair) both partial-derivative conditions
    {
        const double a1 = m.g1(s.e1, s.e1), b1 = m.g2(s.e1, s.e1);
        const double a3 = m.g1(s.e3, s.e3), b3 = m.g2(s.e3, s.e3);
        rep.bistable_ok = (a1 < 0.0 && a1 + b1 < 0.0 && a3 < 0.0 && a3 + b3 < 0.0);
        if (!rep.bistable_ok) {
            std::snprintf(buf, sizeof(buf),
                          "outer-state stability failed: g1,g1+g2 = (%.3g, %.3g) "
                          "at e1, (%.3g, %.3g) at e3",
                          a1, a1 + b1, a3, a3 + b3);
            rep.notes.push_back(buf);
        }
    }

    // locate the v-extremum: sign change of g2 in v, checked against several
    // u probes; it must be unique and u-independent to count
    {
        const double band = 1e-9 * span;
        bool consistent = true;
        double found = 0.0;
        bool any = false;
        for (double uprobe : probe_points(s.e1, s.e3)) {
            std::vector<double> zeros;
            double pv = s.e1 + band, pg = m.g2(uprobe, pv);
            for (int i = 1; i <= kGrid; ++i) {
                const double v = s.e1 + band + (span - 2 * band) * i / kGrid;
                const double gv = m.g2(uprobe, v);
                if (pg * gv < 0.0) {
                    double a = pv, b = v;
                    for (int it = 0; it < 100; ++it) {
                        const double mid = 0.5 * (a + b);
                        (m.g2(uprobe, mid) * m.g2(uprobe, a) <= 0.0 ? b : a) = mid;
                    }
                    zeros.push_back(0.5 * (a + b));
                }
                pv = v;
                pg = gv;
            }
            if (zeros.size() != 1) {
                consistent = false;
                break;
            }
            if (any && std::abs(zeros[0] - found) > 1e-6 * span) {
                consistent = false;
                break;
            }
            found = zeros[0];
            any = true;
        }
        if (consistent && any)
            rep.kappa = found;
        else
            rep.notes.push_back(
                "no unique u-independent v-extremum found on (e1, e3)");
    }

    // sign of g2 on each side of kappa, sampled over the full (u, v) box
    auto g2_signs_ok = [&](double kap, int low_sign) {
        const double exclusion = std::max(1e-3 * span, 1e-9);
        for (int iu = 0; iu <= kGrid; ++iu) {
            const double u = s.e1 + span * iu / kGrid;
            for (int iv = 0; iv <= kGrid; ++iv) {
                const double v = s.e1 + span * iv / kGrid;
                if (std::abs(v - kap) < exclusion) continue;
                const double val = m.g2(u, v);
                const int want = v < kap ? low_sign : -low_sign;
                if (val * want < 0.0) {
                    std::snprintf(buf, sizeof(buf),
                                  "g2 sign violated at (u,v)=(%.6g,%.6g): %.3g",
                                  u, v, val);
                    rep.notes.push_back(buf);
                    return false;
                }
            }
        }
        return true;
    };

    // g1 < 0 on the triangle u >= v of [ulo,uhi] x [vlo,vhi]
    auto g1_negative_on = [&](double ulo, double uhi, double vlo, double vhi,
                              const char* tag) {
        for (int iu = 0; iu <= kGrid; ++iu) {
            const double u = ulo + (uhi - ulo) * iu / kGrid;
            for (int iv = 0; iv <= kGrid; ++iv) {
                const double v = vlo + (vhi - vlo) * iv / kGrid;
                if (v > u) continue;
                if (!(m.g1(u, v) < 0.0)) {
                    std::snprintf(buf, sizeof(buf),
                                  "g1 >= 0 at (u,v)=(%.6g,%.6g) in %s box", u, v,
                                  tag);
                    rep.notes.push_back(buf);
                    return false;
                }
            }
        }
        return true;
    };

    if (rep.kappa && *rep.kappa > s.e1 && *rep.kappa < s.e2) {
        // low-threshold shape: g2 negative below kappa, positive above;
        // g1 < 0 for u >= v with u up to e2, v up to kappa; and the e1-section
        // g(u, e1) keeps the invasion signs around e1 and beyond e2
        bool ok = g2_signs_ok(*rep.kappa, -1);
        ok = ok && g1_negative_on(s.e1, s.e2 - 1e-9 * span, s.e1, *rep.kappa,
                                  "low-unimodal");
        if (ok) {
            for (int i = 1; i <= kGrid; ++i) {
                const double above =
                    s.e2 + (m.domain_hi - s.e2) * i / (kGrid + 1.0);
                const double below =
                    m.domain_lo + (s.e1 - m.domain_lo) * i / (kGrid + 1.0);
                if (!(m.g(above, s.e1) < 0.0)) {
                    std::snprintf(buf, sizeof(buf),
                                  "g(u,e1) >= 0 at u=%.6g beyond e2", above);
                    rep.notes.push_back(buf);
                    ok = false;
                    break;
                }
                if (!(m.g(below, s.e1) > 0.0)) {
                    std::snprintf(buf, sizeof(buf),
                                  "g(u,e1) <= 0 at u=%.6g below e1", below);
                    rep.notes.push_back(buf);
                    ok = false;
                    break;
                }
            }
        }
        rep.unimodal_low_ok = ok;
    }

    if (rep.kappa && *rep.kappa > s.e2 && *rep.kappa < s.e3) {
        // high-threshold shape: g2 positive below kappa, negative above;
        // g1 < 0 for u >= v on [kappa, e3]^2
        bool ok = g2_signs_ok(*rep.kappa, +1);
        ok = ok && g1_negative_on(*rep.kappa, s.e3, *rep.kappa, s.e3,
                                  "high-unimodal");
        rep.unimodal_high_ok = ok;

        // strong sub-tangency: both partials bounded below by their value at
        // (e3, e3) on the u >= v triangle of [e1, e3]^2
        const double b1 = m.g1(s.e3, s.e3), b2 = m.g2(s.e3, s.e3);
        const double slack = 1e-9 * std::max(1.0, std::abs(b1) + std::abs(b2));
        bool sub = true;
        for (int iu = 0; iu <= kGrid && sub; ++iu) {
            const double u = s.e1 + span * iu / kGrid;
            for (int iv = 0; iv <= kGrid; ++iv) {
                const double v = s.e1 + span * iv / kGrid;
                if (v > u) continue;
                if (m.g1(u, v) < b1 - slack || m.g2(u, v) < b2 - slack) {
                    std::snprintf(buf, sizeof(buf),
                                  "sub-tangency violated at (u,v)=(%.6g,%.6g)", u,
                                  v);
                    rep.notes.push_back(buf);
                    sub = false;
                    break;
                }
            }
        }
        rep.subtangency_ok = sub;
    }

    rep.integral_value = integral_over_diagonal(m, s);
    rep.integral_ok = rep.integral_value > 0.0;
    if (!rep.integral_ok) {
        std::snprintf(buf, sizeof(buf), "diagonal integral not positive: %.6g",
                      rep.integral_value);
        rep.notes.push_back(buf);
    }
    rep.notes.push_back("grid 400x400");
    return rep;
}

ModelSpec transform_reflect(const ModelSpec& m, const SteadyStates& s) {
    const double sum = s.e1 + s.e3;
    ModelSpec t;
    t.g = [g = m.g, sum](double u, double v) { return -g(sum - u, sum - v); };
    t.g1 = [g1 = m.g1, sum](double u, double v) { return g1(sum - u, sum - v); };
    t.g2 = [g2 = m.g2, sum](double u, double v) { return g2(sum - u, sum - v); };
    t.domain_lo = sum - m.domain_hi;
    t.domain_hi = sum - m.domain_lo;
    t.kind = ModelKind::custom;
    t.id = "reflect(" + m.id + ")";
    for (double lev : m.nonsmooth_v_levels)
        t.nonsmooth_v_levels.push_back(sum - lev);
    std::sort(t.nonsmooth_v_levels.begin(), t.nonsmooth_v_levels.end());
    return t;
}

ModelSpec load_config(const std::string& path) {
    auto kv = io::read_config(path);
    auto take = [&](const char* key) {
        auto it = kv.find(key);
        if (it == kv.end())
            throw ArgumentError(std::string("config is missing key '") + key +
                                "': " + path);
        const std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto take_num = [&](const char* key) { return parse_double(key, take(key)); };

    const std::string kind = take("kind");
    ModelSpec m;
    if (kind == "mackey_glass") {
        const double A = take_num("A"), r = take_num("r");
        m = make_mackey_glass(A, r);
    } else if (kind == "virus") {
        const double amp = take_num("amp"), width = take_num("width"),
                     v0 = take_num("v0");
        m = make_virus(amp, width, v0);
    } else if (kind == "toy_smooth") {
        const double kappa = take_num("kappa"), p = take_num("p"),
                     q = take_num("q"), eps = take_num("eps");
        m = make_toy_smooth(kappa, p, q, eps);
    } else if (kind == "toy_exact") {
        const double kappa = take_num("kappa"), p = take_num("p"),
                     q = take_num("q");
        m = make_toy_exact(kappa, p, q);
    } else if (kind == "custom") {
        const std::string raw = take("coeffs");
        std::vector<double> coeffs;
        std::stringstream ss(raw);
        std::string item;
        while (std::getline(ss, item, ','))
            coeffs.push_back(parse_double("coeffs", item));
        const double lo = take_num("domain_lo"), hi = take_num("domain_hi");
        m = make_custom_birth(coeffs, lo, hi);
    } else {
        throw ArgumentError("unknown model kind '" + kind + "' in " + path);
    }
    if (!kv.empty())
        throw ArgumentError("unknown config key '" + kv.begin()->first + "' in " +
                            path);
    return m;
}

void validate_partials(const ModelSpec& m) {
    const double step = 1e-6;
    const double lo = m.domain_lo + 1e-3, hi = m.domain_hi - 1e-3;
    for (int iu = 0; iu < 20; ++iu) {
        const double u = lo + (hi - lo) * (iu + 0.5) / 20.0;
        for (int iv = 0; iv < 20; ++iv) {
            const double v = lo + (hi - lo) * (iv + 0.5) / 20.0;
            bool near_level = false;
            for (double lev : m.nonsmooth_v_levels)
                if (std::abs(v - lev) < 100.0 * step) near_level = true;
            if (near_level) continue;
            const double fd1 = (m.g(u + step, v) - m.g(u - step, v)) / (2.0 * step);
            const double fd2 = (m.g(u, v + step) - m.g(u, v - step)) / (2.0 * step);
            const double a1 = m.g1(u, v), a2 = m.g2(u, v);
            const double s1 = std::max({1.0, std::abs(fd1), std::abs(a1)});
            const double s2 = std::max({1.0, std::abs(fd2), std::abs(a2)});
            if (std::abs(fd1 - a1) > 1e-4 * s1 || std::abs(fd2 - a2) > 1e-4 * s2) {
                char buf[160];
                std::snprintf(buf, sizeof(buf),
                              "partials disagree with finite differences at "
                              "(u,v)=(%.6g,%.6g): g1 %.6g vs %.6g, g2 %.6g vs %.6g",
                              u, v, a1, fd1, a2, fd2);
                throw ModelError(buf);
            }
        }
    }
}

} // namespace delfront::model_zoo
