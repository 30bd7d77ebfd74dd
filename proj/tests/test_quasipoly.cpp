#include <doctest.h>

#include <cmath>

#include "delfront/errors.hpp"
#include "delfront/quasipoly.hpp"
#include "oracles.hpp"

using namespace delfront;
using namespace delfront::quasipoly;

TEST_CASE("eval matches the definition at hand-checked points") {
    CharParams p{-1.0, -1.0, 0.5, 0.25};
    CHECK(eval_char(p, 0.0) == doctest::Approx(-2.0).epsilon(1e-15)); // a + b
    // z = 1: 1 - 0.5 - 1 - e^{-0.25}
    CHECK(eval_char(p, 1.0) ==
          doctest::Approx(1.0 - 0.5 - 1.0 - std::exp(-0.25)).epsilon(1e-15));
    // derivative: 2z - c - b h e^{-zh}
    CHECK(eval_char_deriv(p, 1.0) ==
          doctest::Approx(2.0 - 0.5 + 0.25 * std::exp(-0.25)).epsilon(1e-15));
    // complex evaluation agrees with the real overload on the axis
    CHECK(eval_char(p, std::complex<double>(1.0, 0.0)).real() ==
          doctest::Approx(eval_char(p, 1.0)).epsilon(1e-15));
}

TEST_CASE("validate rejects bad parameter blocks") {
    CHECK_THROWS_AS(validate(CharParams{0, 0, 0.0, 1.0}), ArgumentError);  // c = 0
    CHECK_THROWS_AS(validate(CharParams{0, 0, -1.0, 1.0}), ArgumentError); // c < 0
    CHECK_THROWS_AS(validate(CharParams{0, 0, 1.0, -1.0}), ArgumentError); // h < 0
    CHECK_THROWS_AS(validate(CharParams{std::nan(""), 0, 1.0, 1.0}), ArgumentError);
    CHECK_NOTHROW(validate(CharParams{-1, -1, 0.5, 0.0}));
}

TEST_CASE("dominant positive root: frozen sample and oracle agreement") {
    CharParams p{-1.0, -1.0, 0.5, 0.5};
    const double r = dominant_positive_root(p);
    CHECK(r == doctest::Approx(oracles::kLambda1Sample).epsilon(1e-12));
    CHECK(r == doctest::Approx(oracles::positive_root(-1, -1, 0.5, 0.5)).epsilon(1e-13));
    CHECK(std::abs(eval_char(p, r)) < 1e-11);

    // no delay, pure quadratic: closed form (c + sqrt(c^2 - 4(a+b)))/2
    CharParams q{-1.0, 0.25, 0.7, 0.0};
    const double rq = dominant_positive_root(q);
    CHECK(rq == doctest::Approx((0.7 + std::sqrt(0.49 + 3.0)) / 2.0).epsilon(1e-14));

    CHECK_THROWS_AS(dominant_positive_root(CharParams{1.0, 0.5, 1.0, 0.1}), ModelError);
}

TEST_CASE("real_roots finds the quadratic pair when h = 0") {
    CharParams p{-1.0, 0.25, 0.7, 0.0}; // z^2 - 0.7 z - 0.75
    auto roots = real_roots(p, -10.0, 10.0);
    REQUIRE(roots.size() == 2);
    const double disc = std::sqrt(0.49 + 3.0);
    CHECK(roots[0].value == doctest::Approx((0.7 - disc) / 2.0).epsilon(1e-12));
    CHECK(roots[1].value == doctest::Approx((0.7 + disc) / 2.0).epsilon(1e-12));
    CHECK(roots[0].multiplicity == 1);
    CHECK(roots[1].multiplicity == 1);
}

TEST_CASE("real_roots: three simple roots inside the three-root region") {
    // c = 0.5, tau = 1 sits well inside for coefficients (-1,-1)
    CharParams p{-1.0, -1.0, 0.5, 0.5};
    auto roots = real_roots(p, real_scan_left_edge(p), 10.0);
    REQUIRE(roots.size() == 3);
    for (const auto& r : roots) {
        CHECK(r.multiplicity == 1);
        CHECK(std::abs(eval_char(p, r.value)) <
              1e-9 * std::max(1.0, r.value * r.value));
    }
    CHECK(roots[0].value < roots[1].value);
    CHECK(roots[1].value < 0.0);
    CHECK(roots[2].value == doctest::Approx(oracles::kLambda1Sample).epsilon(1e-12));
}

// Construct an exact double root: pick z0 and h, then solve chi(z0) = 0 and
// chi'(z0) = 0 for a and b in closed form.
static CharParams double_root_params(double z0, double c, double h) {
    const double beh = (2.0 * z0 - c) / h;        // b * e^{-z0 h}
    const double b = beh * std::exp(z0 * h);
    const double a = -z0 * z0 + c * z0 - beh;
    return {a, b, c, h};
}

TEST_CASE("double roots are detected with multiplicity 2") {
    const double z0 = -2.5, c = 0.79, h = 0.79;
    CharParams p = double_root_params(z0, c, h);
    REQUIRE(std::abs(eval_char(p, z0)) < 1e-12);
    REQUIRE(std::abs(eval_char_deriv(p, z0)) < 1e-12);

    auto roots = real_roots(p, real_scan_left_edge(p), 10.0);
    bool found_double = false;
    int total = 0;
    for (const auto& r : roots) {
        total += r.multiplicity;
        if (r.multiplicity == 2) {
            found_double = true;
            CHECK(r.value == doctest::Approx(z0).epsilon(1e-7));
        }
    }
    CHECK(found_double);
    CHECK(total == 3); // double pair plus the dominant positive root
}

TEST_CASE("perturbing off the double root splits or removes the pair") {
    const double z0 = -2.5, c = 0.79, h = 0.79;
    CharParams p = double_root_params(z0, c, h);

    // lifting chi (a up) separates two simple roots around z0
    CharParams up = p;
    up.a += 1e-4;
    auto ru = real_roots(up, real_scan_left_edge(up), 10.0);
    int count_up = 0;
    for (const auto& r : ru) count_up += r.multiplicity;
    CHECK(count_up == 3);
    CHECK(ru.size() == 3);

    // pushing chi down removes both: only the positive root stays real
    CharParams dn = p;
    dn.a -= 1e-4;
    auto rd = real_roots(dn, real_scan_left_edge(dn), 10.0);
    int count_dn = 0;
    for (const auto& r : rd) count_dn += r.multiplicity;
    CHECK(count_dn == 1);

    // and the argument principle sees the pair as complex
    auto rep = analyze(dn);
    CHECK(rep.complex_pairs_in_window >= 1);
    CHECK(rep.real_roots.size() == 1);
}

TEST_CASE("analyze: counts are consistent and the dominant root is reported") {
    CharParams p{-1.0, -1.0, 0.5, 0.5};
    auto rep = analyze(p);
    CHECK(rep.real_roots.size() == 3);
    REQUIRE(rep.dominant_real.has_value());
    CHECK(*rep.dominant_real == doctest::Approx(oracles::kLambda1Sample).epsilon(1e-12));
    CHECK(rep.complex_pairs_in_window >= 0);

    // convex case (b > 0): exactly two real roots, none complex nearby
    CharParams q{-1.0, 0.5, 1.0, 0.7};
    auto repq = analyze(q);
    CHECK(repq.real_roots.size() == 2);
    CHECK(repq.real_roots[0].value < 0.0);
    CHECK(repq.real_roots[1].value > 0.0);
}

TEST_CASE("window handling: degenerate rejected, boundary roots force inflation") {
    CharParams p{-1.0, -1.0, 0.5, 0.25};
    CHECK_THROWS_AS(count_roots_in_window(p, Window{1.0, 1.0, 1.0}, nullptr),
                    ArgumentError);
    CHECK_THROWS_AS(count_roots_in_window(p, Window{-1.0, 1.0, 0.0}, nullptr),
                    ArgumentError);

    const double lam = dominant_positive_root(p);
    // right edge exactly on the root: the window inflates and then contains it
    Window w{lam - 1.0, lam, 1.0};
    Window used{};
    const int n = count_roots_in_window(p, w, &used);
    CHECK(n >= 1);
    CHECK(used.re_max > lam);
}

TEST_CASE("left scan edge clears the slow third root for small h") {
    CharParams p{-1.0, -1.0, 1.5, 0.015}; // h small: third root far left
    const double edge = real_scan_left_edge(p);
    auto roots = real_roots(p, edge, 10.0);
    int total = 0;
    for (const auto& r : roots) total += r.multiplicity;
    CHECK(total == 3); // tau < tau_sharp here, so three real roots must appear
    CHECK(roots.front().value > edge);
    CHECK(roots.front().value < -100.0); // genuinely far out
}
