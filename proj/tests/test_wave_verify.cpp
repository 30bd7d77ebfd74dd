#include <cmath>
#include <limits>
#include <vector>

#include "delfront/errors.hpp"
#include "delfront/model_zoo.hpp"
#include "delfront/quasipoly.hpp"
#include "delfront/toy_model.hpp"
#include "delfront/wave_verify.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace delfront;

namespace {

// cubic bistable kinetics written as a birth function: g(u,u) = u(1-u)(u-1/4),
// exact front phi = 1/(1+exp(-t/sqrt 2)) at speed (1-2/4)/sqrt 2
const std::vector<double> kCubicCoeffs{0.0, 0.75, 1.25, -1.0};

WaveProfile tanh_front(double t0, double t1, double dt) {
    WaveProfile w;
    const double rt2 = std::sqrt(2.0);
    for (double t = t0; t <= t1 + 0.5 * dt; t += dt) {
        w.t.push_back(t);
        w.phi.push_back(1.0 / (1.0 + std::exp(-t / rt2)));
    }
    w.c = oracles::kNagumoSpeed;
    w.tau = 0.0;
    w.h = 0.0;
    w.residual_inf = 0.0;
    w.model_id = "cubic-test";
    return w;
}

} // namespace

TEST_CASE("verify rejects malformed profiles") {
    const auto m = model_zoo::make_custom_birth(kCubicCoeffs, -0.25, 1.25);
    const auto s = model_zoo::find_steady_states(m);
    auto w = tanh_front(-10.0, 10.0, 0.5);

    auto bad = w;
    bad.phi.pop_back();
    CHECK_THROWS_AS(wave_verify::verify(bad, m, s), ArgumentError);

    bad = w;
    bad.t[3] = bad.t[2];
    CHECK_THROWS_AS(wave_verify::verify(bad, m, s), ArgumentError);

    bad = w;
    bad.t.resize(8);
    bad.phi.resize(8);
    CHECK_THROWS_AS(wave_verify::verify(bad, m, s), ArgumentError);

    bad = w;
    bad.h = 0.5; // disagrees with c * tau = 0
    CHECK_THROWS_AS(wave_verify::verify(bad, m, s), ArgumentError);

    bad = w;
    bad.tau = -1.0;
    bad.h = -oracles::kNagumoSpeed;
    CHECK_THROWS_AS(wave_verify::verify(bad, m, s), ArgumentError);
}

TEST_CASE("verify confirms the closed-form cubic front") {
    const auto m = model_zoo::make_custom_birth(kCubicCoeffs, -0.25, 1.25);
    const auto s = model_zoo::find_steady_states(m);
    REQUIRE(s.e1 == doctest::Approx(0.0).epsilon(1e-9));
    REQUIRE(s.e3 == doctest::Approx(1.0).epsilon(1e-9));

    const auto w = tanh_front(-35.0, 35.0, 0.02);
    const auto rep = wave_verify::verify(w, m, s);

    CHECK(rep.residual_inf < 1e-5);
    CHECK(rep.residual_nodes_skipped == 0);
    CHECK(rep.monotone);
    CHECK(!rep.first_nonmonotone_t.has_value());
    CHECK(rep.tail_sign_changes == 0);

    // both tail rates have the closed form (c -+ sqrt(c^2 + 4*(1 - f'(e))))/2
    const double rt2 = std::sqrt(2.0);
    CHECK(rep.predicted_left == doctest::Approx(1.0 / rt2).epsilon(1e-9));
    CHECK(rep.predicted_right == doctest::Approx(-1.0 / rt2).epsilon(1e-9));
    CHECK(rep.right_multiplicity == 1);

    REQUIRE(rep.left_fit.has_value());
    CHECK(rep.left_fit->reliable);
    CHECK(rep.left_fit->rate == doctest::Approx(1.0 / rt2).epsilon(0.01));
    CHECK(rep.left_fit->r_squared > 0.999);

    REQUIRE(rep.right_fit.has_value());
    CHECK(rep.right_fit->reliable);
    CHECK(rep.right_fit->rate == doctest::Approx(-1.0 / rt2).epsilon(0.01));
    CHECK(rep.right_fit->r_squared > 0.999);
}

TEST_CASE("verify agrees with the exact two-slope profile, positive branch") {
    const auto tp = toy_model::make_params(1.0 / 3.0, 0.5, -1.0);
    const auto m = model_zoo::make_toy_exact(1.0 / 3.0, 0.5, -1.0);
    const auto s = model_zoo::find_steady_states(m);
    const double tau = 2.0;
    const auto w = toy_model::exact_profile(tp, tau, toy_model::default_profile_grid(tp, tau));
    REQUIRE(w.c == doctest::Approx(oracles::kToySpeedTau2).epsilon(1e-12));

    const auto rep = wave_verify::verify(w, m, s);

    CHECK(rep.residual_inf < 5e-4);
    CHECK(rep.residual_nodes_skipped >= 1);
    CHECK(rep.residual_nodes_skipped < 20);
    CHECK(rep.monotone);
    CHECK(rep.tail_sign_changes == 0);

    // left rate is the dominant p-side root, identical to the producer's mu1
    const double mu = toy_model::mu1(tp, w.c, tau);
    CHECK(rep.predicted_left == doctest::Approx(mu).epsilon(1e-10));
    REQUIRE(rep.left_fit.has_value());
    CHECK(rep.left_fit->reliable);
    CHECK(rep.left_fit->rate == doctest::Approx(mu).epsilon(1e-4));

    // right rate is the slowest negative q-side root
    const quasipoly::CharParams pr{-1.0, -1.0, w.c, w.h};
    const auto rr = quasipoly::real_roots(pr, quasipoly::real_scan_left_edge(pr), -1e-12);
    REQUIRE(!rr.empty());
    CHECK(rep.predicted_right == doctest::Approx(rr.back().value).epsilon(1e-10));
    CHECK(rep.right_multiplicity == 1);
    REQUIRE(rep.right_fit.has_value());
    CHECK(rep.right_fit->reliable);
    CHECK(rep.right_fit->rate == doctest::Approx(rep.predicted_right).epsilon(0.02));
}

TEST_CASE("verify flags the oscillatory tail outside the monotonicity region") {
    const auto tp = toy_model::make_params(1.0 / 3.0, 0.5, -1.0);
    const auto m = model_zoo::make_toy_exact(1.0 / 3.0, 0.5, -1.0);
    const auto s = model_zoo::find_steady_states(m);
    const double tau = 6.0;
    const auto w = toy_model::exact_profile(tp, tau, toy_model::default_profile_grid(tp, tau));
    REQUIRE(w.c == doctest::Approx(oracles::kToySpeedTau6).epsilon(1e-12));

    const auto rep = wave_verify::verify(w, m, s);

    CHECK(!rep.monotone);
    REQUIRE(rep.first_nonmonotone_t.has_value());
    CHECK(*rep.first_nonmonotone_t > 2.0);
    CHECK(*rep.first_nonmonotone_t < 4.0);
    CHECK(rep.tail_sign_changes >= 1);
    CHECK(!rep.right_fit.has_value());

    // no negative real root at e3 out here, consistent with the oscillation
    CHECK(std::isnan(rep.predicted_right));
    CHECK(rep.right_multiplicity == 1);

    const double mu = toy_model::mu1(tp, w.c, tau);
    REQUIRE(rep.left_fit.has_value());
    CHECK(rep.left_fit->reliable);
    CHECK(rep.left_fit->rate == doctest::Approx(mu).epsilon(1e-3));
}

TEST_CASE("verify handles negative-speed profiles directly") {
    const auto tp = toy_model::make_params(0.9, 0.5, -1.0);
    const auto m = model_zoo::make_toy_exact(0.9, 0.5, -1.0);
    const auto s = model_zoo::find_steady_states(m);
    const double tau = 1.0;
    const auto w = toy_model::exact_profile(tp, tau, toy_model::default_profile_grid(tp, tau));
    REQUIRE(w.c == doctest::Approx(oracles::kToyNegTau1).epsilon(1e-12));
    REQUIRE(w.h < 0.0);

    const auto rep = wave_verify::verify(w, m, s);

    CHECK(rep.residual_inf < 5e-4);
    CHECK(rep.residual_nodes_skipped >= 1);
    CHECK(rep.monotone);
    CHECK(rep.tail_sign_changes == 0);

    const double v = -w.c;
    // the reflected model turns each tail equation into the standard one at
    // speed v with p and q swapped: check both rates through that mapping
    const quasipoly::CharParams refl_p{-1.0, 0.5, v, v * tau};
    const auto rp =
        quasipoly::real_roots(refl_p, quasipoly::real_scan_left_edge(refl_p), -1e-12);
    REQUIRE(!rp.empty());
    CHECK(rep.predicted_left == doctest::Approx(-rp.back().value).epsilon(1e-10));
    CHECK(rep.predicted_right ==
          doctest::Approx(-toy_model::lambda1(tp, v, tau)).epsilon(1e-10));

    REQUIRE(rep.left_fit.has_value());
    CHECK(rep.left_fit->reliable);
    CHECK(rep.left_fit->rate == doctest::Approx(rep.predicted_left).epsilon(0.02));

    // the t >= 0 side of the reflected construction is one pure exponential
    REQUIRE(rep.right_fit.has_value());
    CHECK(rep.right_fit->reliable);
    CHECK(rep.right_fit->rate == doctest::Approx(rep.predicted_right).epsilon(1e-4));
}

TEST_CASE("verify regresses out the t prefactor on a double tail root") {
    // linearization at e3 tuned to the tangency speed, where the two negative
    // roots collide; tail amplitude ~ t * exp(z0 t)
    const double c = oracles::kClin11Tau1;
    const double h = c * 1.0;
    const quasipoly::CharParams pr{-1.0, -1.0, c, h};
    const auto rr = quasipoly::real_roots(pr, quasipoly::real_scan_left_edge(pr), -1e-12);
    REQUIRE(!rr.empty());
    REQUIRE(rr.back().multiplicity == 2);
    const double z0 = rr.back().value;

    model_zoo::ModelSpec m;
    m.g = [](double u, double v) { return -u - v + 2.0; };
    m.g1 = [](double, double) { return -1.0; };
    m.g2 = [](double, double) { return -1.0; };
    m.domain_lo = -0.25;
    m.domain_hi = 1.25;
    m.id = "affine-test";
    const model_zoo::SteadyStates s{0.0, 0.5, 1.0};

    // the jump up to e3 at t = 0 followed by the dip of the t-prefactor tail
    // is deliberate; it also pins first_nonmonotone_t at the junction
    const double rho = quasipoly::dominant_positive_root(pr);
    WaveProfile w;
    for (double t = -12.0; t <= 14.0 + 0.005; t += 0.01) {
        w.t.push_back(t);
        w.phi.push_back(t < 0.0 ? 0.5 * std::exp(rho * t)
                                : 1.0 - 0.5 * t * std::exp(z0 * t));
    }
    w.c = c;
    w.tau = 1.0;
    w.h = h;
    w.residual_inf = 0.0;
    w.model_id = m.id;

    const auto rep = wave_verify::verify(w, m, s);

    CHECK(!rep.monotone);
    REQUIRE(rep.first_nonmonotone_t.has_value());
    CHECK(std::abs(*rep.first_nonmonotone_t) < 0.1);
    CHECK(rep.tail_sign_changes == 0);
    CHECK(rep.right_multiplicity == 2);
    CHECK(rep.predicted_right == doctest::Approx(z0).epsilon(1e-10));
    CHECK(rep.predicted_left == doctest::Approx(rho).epsilon(1e-10));

    REQUIRE(rep.left_fit.has_value());
    CHECK(rep.left_fit->rate == doctest::Approx(rho).epsilon(0.01));

    // with a pure t * exp(z0 t) amplitude the stripped regression is exact
    REQUIRE(rep.right_fit.has_value());
    CHECK(rep.right_fit->reliable);
    CHECK(rep.right_fit->rate == doctest::Approx(z0).epsilon(1e-6));
    CHECK(rep.right_fit->note.find("prefactor") != std::string::npos);
}
