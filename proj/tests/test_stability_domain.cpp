#include <doctest.h>

#include <cmath>

#include "delfront/errors.hpp"
#include "delfront/quasipoly.hpp"
#include "delfront/stability_domain.hpp"
#include "oracles.hpp"

using namespace delfront;
using namespace delfront::stability_domain;

namespace {
const DomainParams kP11 = make_params(-1.0, -1.0);
}

TEST_CASE("make_params rejects nonnegative coefficients") {
    CHECK_THROWS_AS(make_params(0.0, -1.0), ArgumentError);
    CHECK_THROWS_AS(make_params(-1.0, 0.0), ArgumentError);
    CHECK_THROWS_AS(make_params(1.0, -1.0), ArgumentError);
    CHECK_NOTHROW(make_params(-2.0, -0.5));
}

TEST_CASE("tau_sharp: defining equation and frozen values") {
    const double ts = tau_sharp(kP11);
    // defining equation residual
    CHECK(std::abs(std::exp(1.0) * 1.0 * ts * std::exp(ts) - 1.0) < 1e-12);
    CHECK(ts == doctest::Approx(oracles::kTauSharp11).epsilon(1e-12));
    CHECK(ts == doctest::Approx(oracles::tau_sharp(-1, -1)).epsilon(1e-12));

    const double ts2 = tau_sharp(make_params(-2.0, -1.0));
    CHECK(ts2 == doctest::Approx(oracles::kTauSharp21).epsilon(1e-12));
}

TEST_CASE("theta point: transcendental system satisfied, frozen values") {
    const ThetaResult th = theta_point(kP11);
    CHECK(th.omega < -2.0);
    // -2a = b e^{-w} (2 + w)
    CHECK(std::abs(-1.0 * std::exp(-th.omega) * (2.0 + th.omega) - 2.0) < 1e-11);
    CHECK(th.omega == doctest::Approx(oracles::kOmega11).epsilon(1e-11));
    CHECK(th.theta == doctest::Approx(oracles::kTheta11).epsilon(1e-11));
}

TEST_CASE("clin: infinite below tau_sharp, frozen finite values above") {
    CHECK(!clin(kP11, 0.0).has_value());
    CHECK(!clin(kP11, 0.27).has_value());
    CHECK(!clin(kP11, oracles::kTauSharp11).has_value());

    auto c1 = clin(kP11, 1.0);
    REQUIRE(c1.has_value());
    CHECK(*c1 == doctest::Approx(oracles::kClin11Tau1).epsilon(1e-9));

    auto c4 = clin(kP11, 4.0);
    REQUIRE(c4.has_value());
    CHECK(*c4 == doctest::Approx(oracles::kClin11Tau4).epsilon(1e-9));

    // tail scaling: tau * clin(tau) approaches theta
    auto c100 = clin(kP11, 100.0);
    REQUIRE(c100.has_value());
    CHECK(*c100 * 100.0 ==
          doctest::Approx(oracles::kClin11Tau100Scaled).epsilon(1e-9));
    CHECK(std::abs(*c100 * 100.0 - oracles::kTheta11) / oracles::kTheta11 < 0.01);
}

TEST_CASE("boundary points give a double characteristic root") {
    const double tau = 1.0;
    const double c = *clin(kP11, tau);
    quasipoly::CharParams cp{-1.0, -1.0, c, c * tau};
    auto roots =
        quasipoly::real_roots(cp, quasipoly::real_scan_left_edge(cp), 10.0);
    int total = 0;
    bool has_double = false;
    for (const auto& r : roots) {
        total += r.multiplicity;
        if (r.multiplicity == 2) {
            has_double = true;
            CHECK(r.value == doctest::Approx(-2.5277).epsilon(1e-3));
        }
    }
    CHECK(total == 3);
    CHECK(has_double);
}

TEST_CASE("in_domain agrees with the critical speed and the root count") {
    auto inside = in_domain(kP11, 1.0, 0.5);
    CHECK(inside.inside);
    CHECK(inside.real_root_count == 3);
    CHECK(inside.count_checked);

    auto outside = in_domain(kP11, 1.0, 1.0);
    CHECK(!outside.inside);
    CHECK(outside.real_root_count == 1);
    CHECK(outside.count_checked);

    // below tau_sharp everything is inside and the count still shows 3
    auto small_tau = in_domain(kP11, 0.2, 2.0);
    CHECK(small_tau.inside);
    CHECK(!small_tau.clin_value.has_value());
    CHECK(small_tau.real_root_count == 3);

    CHECK_THROWS_AS(in_domain(kP11, 1.0, 0.0), ArgumentError);
    CHECK_THROWS_AS(in_domain(kP11, -1.0, 1.0), ArgumentError);
}

TEST_CASE("c_crit_of_h: zero up to theta, then positive and increasing") {
    const double theta = theta_point(kP11).theta;
    CHECK(c_crit_of_h(kP11, 0.5 * theta) == 0.0);
    CHECK(c_crit_of_h(kP11, theta) == 0.0);
    const double c1 = c_crit_of_h(kP11, theta + 0.02);
    const double c2 = c_crit_of_h(kP11, theta + 0.1);
    CHECK(c1 > 0.0);
    CHECK(c2 > c1);
    // consistency with clin: at tau, h = clin(tau)*tau lies on the boundary
    const double tau = 2.0;
    const double cl = *clin(kP11, tau);
    CHECK(c_crit_of_h(kP11, cl * tau) == doctest::Approx(cl).epsilon(1e-8));
}

TEST_CASE("trace_boundary: grid shape, monotonicity, determinism, errors") {
    auto bc = trace_boundary(kP11, 6.0, 50);
    REQUIRE(int(bc.points.size()) == 50);
    CHECK(bc.tau_sharp_value == doctest::Approx(oracles::kTauSharp11).epsilon(1e-12));
    CHECK(bc.points.front().tau == 0.0);
    CHECK(bc.points.back().tau == 6.0);
    int n_inf = 0;
    for (size_t i = 0; i < bc.points.size(); ++i) {
        if (i > 0) CHECK(bc.points[i].tau > bc.points[i - 1].tau);
        if (!bc.points[i].clin_value) ++n_inf;
    }
    CHECK(n_inf == 2); // max(2, 50/20)
    // finite part decreases strictly
    const auto& pts = bc.points;
    for (size_t i = n_inf + 1; i < pts.size(); ++i)
        CHECK(*pts[i].clin_value < *pts[i - 1].clin_value);
    // first finite value is enormous (just past tau_sharp)
    CHECK(*pts[n_inf].clin_value > 100.0);

    // deterministic under jobs
    auto bc4 = trace_boundary(kP11, 6.0, 50, 4);
    for (size_t i = 0; i < pts.size(); ++i) {
        CHECK(bc4.points[i].tau == pts[i].tau);
        CHECK(bc4.points[i].clin_value.has_value() == pts[i].clin_value.has_value());
        if (pts[i].clin_value)
            CHECK(*bc4.points[i].clin_value == *pts[i].clin_value);
    }

    CHECK_THROWS_AS(trace_boundary(kP11, 0.2, 50), ArgumentError);
    CHECK_THROWS_AS(trace_boundary(kP11, 6.0, 4), ArgumentError);
}
