#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "delfront/errors.hpp"
#include "delfront/model_zoo.hpp"
#include "delfront/toy_model.hpp"
#include "doctest.h"

using namespace delfront;
using namespace delfront::model_zoo;

namespace {

struct TempConfig {
    std::string path;
    explicit TempConfig(const std::string& body) {
        static int counter = 0;
        path = "zoo_cfg_" + std::to_string(counter++) + ".cfg";
        std::ofstream out(path);
        out << body;
    }
    ~TempConfig() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("factory validation") {
    CHECK_THROWS_AS(make_mackey_glass(0.0, 0.3), ArgumentError);
    CHECK_THROWS_AS(make_mackey_glass(2.0, 1.0), ArgumentError);
    CHECK_THROWS_AS(make_virus(0.0, 8.0, 0.25), ArgumentError);
    CHECK_THROWS_AS(make_virus(0.8, -1.0, 0.25), ArgumentError);
    CHECK_THROWS_AS(make_toy_smooth(0.3, 0.5, -1.0, 0.0), ArgumentError);
    CHECK_THROWS_AS(make_toy_exact(0.3, 0.5, 1.0), ArgumentError);
    CHECK_THROWS_AS(make_custom_birth({}, 0.0, 1.0), ArgumentError);
    CHECK_THROWS_AS(make_custom_birth({1.0}, 1.0, 0.0), ArgumentError);
}

TEST_CASE("cubic birth kinetics: states, shape, integral") {
    const auto m = make_mackey_glass(2.0, 0.3);
    validate_partials(m);
    const auto s = find_steady_states(m);
    CHECK(std::abs(s.e1) < 1e-9);
    CHECK(s.e2 == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(s.e3 == doctest::Approx(1.0).epsilon(1e-9));

    // slope of the birth function at the rest states
    CHECK(m.g2(0.0, 0.0) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(m.g2(0.0, 1.0) == doctest::Approx(-0.4).epsilon(1e-12));

    const auto rep = check_hypotheses(m, s);
    CHECK(rep.bistable_ok);
    REQUIRE(rep.kappa.has_value());
    // v-extremum of the birth function: root of 3Av^2 - 2A(1+r)v + (Ar-1)
    const double kexp = (1.3 + std::sqrt(1.3 * 1.3 - 3.0 * (0.3 - 0.5))) / 3.0;
    CHECK(*rep.kappa == doctest::Approx(kexp).epsilon(1e-6));
    CHECK(*rep.kappa > s.e2);
    CHECK(!rep.unimodal_low_ok);
    CHECK(rep.unimodal_high_ok);
    CHECK(rep.subtangency_ok);
    CHECK(rep.integral_ok);
    // closed form: A*(-1/4 + (1+r)/3 - r/2) = 1/15
    CHECK(rep.integral_value == doctest::Approx(1.0 / 15.0).epsilon(1e-9));
}

TEST_CASE("saturating-infection kinetics: states and low-threshold shape") {
    const auto m = make_virus(0.8, 8.0, 0.25);
    validate_partials(m);

    // g(0.5, 0.25) = 0.5*(1 - 0.5 - 0.8) exactly
    CHECK(m.g(0.5, 0.25) == doctest::Approx(-0.15).epsilon(1e-14));

    const auto s = find_steady_states(m);
    CHECK(s.e1 > 0.20);
    CHECK(s.e1 < 0.22);
    CHECK(s.e2 > 0.46);
    CHECK(s.e2 < 0.50);
    CHECK(s.e3 > 0.98);
    CHECK(s.e3 < 1.00);
    for (double e : {s.e1, s.e2, s.e3}) CHECK(std::abs(m.g(e, e)) < 1e-10);

    const auto rep = check_hypotheses(m, s);
    CHECK(rep.bistable_ok);
    REQUIRE(rep.kappa.has_value());
    // the delayed slope changes sign exactly at v0
    CHECK(*rep.kappa == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(*rep.kappa > s.e1);
    CHECK(*rep.kappa < s.e2);
    CHECK(rep.unimodal_low_ok);
    CHECK(!rep.unimodal_high_ok);
}

TEST_CASE("smoothed two-slope kinetics") {
    const auto m = make_toy_smooth(1.0 / 3.0, 0.5, -1.0, 0.02);
    validate_partials(m);
    const auto s = find_steady_states(m);
    CHECK(std::abs(s.e1) < 1e-5);
    CHECK(s.e2 > 0.25);
    CHECK(s.e2 < 0.34);
    CHECK(std::abs(s.e3 - 1.0) < 1e-9);
    CHECK(std::abs(m.g(s.e2, s.e2)) < 1e-10);

    const auto rep = check_hypotheses(m, s);
    CHECK(rep.bistable_ok);
    REQUIRE(rep.kappa.has_value());
    // smoothing pushes the v-extremum well above the nominal switch point
    CHECK(*rep.kappa > 0.40);
    CHECK(*rep.kappa < 0.44);
    CHECK(rep.unimodal_high_ok);
    CHECK(rep.subtangency_ok);
    CHECK(rep.integral_ok);
    CHECK(rep.integral_value == doctest::Approx(5.0 / 12.0).epsilon(0.03));
}

TEST_CASE("exact two-slope kinetics") {
    const double kappa = 1.0 / 3.0;
    const auto m = make_toy_exact(kappa, 0.5, -1.0);
    REQUIRE(m.nonsmooth_v_levels.size() == 1);
    CHECK(m.nonsmooth_v_levels[0] == kappa);
    validate_partials(m); // skips the band around the slope break

    CHECK(m.g2(0.5, 0.2) == 0.5);
    CHECK(m.g2(0.5, 0.5) == -1.0);

    const auto s = find_steady_states(m);
    CHECK(std::abs(s.e1) < 1e-9);
    // the middle "state" is the jump location itself
    CHECK(s.e2 == doctest::Approx(kappa).epsilon(1e-9));
    CHECK(std::abs(s.e3 - 1.0) < 1e-9);

    const auto rep = check_hypotheses(m, s);
    CHECK(rep.bistable_ok);
    REQUIRE(rep.kappa.has_value());
    CHECK(*rep.kappa == doctest::Approx(kappa).epsilon(1e-8));
    // kappa coincides with e2, so neither open-interval shape applies
    CHECK(!rep.unimodal_low_ok);
    CHECK(!rep.unimodal_high_ok);

    // piecewise-linear diagonal integrates to the closed-form area balance
    const auto tp = toy_model::make_params(kappa, 0.5, -1.0);
    CHECK(rep.integral_value ==
          doctest::Approx(toy_model::balance_closed_form(tp)).epsilon(1e-10));
}

TEST_CASE("polynomial birth function matches the cubic factory") {
    // v + 2v(v-0.3)(1-v) expanded: coefficients {0, 0.4, 2.6, -2}
    const auto poly = make_custom_birth({0.0, 0.4, 2.6, -2.0}, -0.25, 1.25);
    const auto mg = make_mackey_glass(2.0, 0.3);
    validate_partials(poly);
    for (double v : {-0.1, 0.2, 0.5, 0.9, 1.2}) {
        CHECK(poly.g(0.4, v) == doctest::Approx(mg.g(0.4, v)).epsilon(1e-13));
        CHECK(poly.g2(0.4, v) == doctest::Approx(mg.g2(0.4, v)).epsilon(1e-13));
    }
    const auto s = find_steady_states(poly);
    CHECK(s.e2 == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("reflection swaps the outer states and flips the balance") {
    const auto m = make_mackey_glass(2.0, 0.3);
    const auto s = find_steady_states(m);
    const auto t = transform_reflect(m, s);
    validate_partials(t);

    const auto st = find_steady_states(t);
    CHECK(std::abs(st.e1) < 1e-9);
    CHECK(st.e2 == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(st.e3 == doctest::Approx(1.0).epsilon(1e-9));

    const auto rep = check_hypotheses(t, st);
    CHECK(rep.bistable_ok);
    REQUIRE(rep.kappa.has_value());
    const double kexp = (1.3 + std::sqrt(1.3 * 1.3 - 3.0 * (0.3 - 0.5))) / 3.0;
    CHECK(*rep.kappa == doctest::Approx(1.0 - kexp).epsilon(1e-6));
    CHECK(rep.unimodal_low_ok);
    CHECK(!rep.unimodal_high_ok);
    CHECK(!rep.integral_ok);
    CHECK(rep.integral_value == doctest::Approx(-1.0 / 15.0).epsilon(1e-9));
}

TEST_CASE("non-bistable kinetics are rejected") {
    const auto mono = make_custom_birth({0.0, 0.5}, -0.25, 1.25);
    CHECK_THROWS_AS(find_steady_states(mono), ModelError);
}

TEST_CASE("partial validation catches wrong derivatives") {
    auto m = make_mackey_glass(2.0, 0.3);
    m.g1 = [](double, double) { return -2.0; };
    CHECK_THROWS_AS(validate_partials(m), ModelError);
}

TEST_CASE("config loading") {
    {
        TempConfig cfg("# cubic birth\nkind = mackey_glass\nA = 2\nr = 0.3\n");
        const auto m = load_config(cfg.path);
        CHECK(m.kind == ModelKind::mackey_glass);
        const auto s = find_steady_states(m);
        CHECK(s.e2 == doctest::Approx(0.3).epsilon(1e-9));
    }
    {
        TempConfig cfg(
            "kind = custom\ncoeffs = 0,0.4,2.6,-2\ndomain_lo = -0.25\n"
            "domain_hi = 1.25\n");
        const auto m = load_config(cfg.path);
        const auto s = find_steady_states(m);
        CHECK(s.e2 == doctest::Approx(0.3).epsilon(1e-9));
    }
    {
        TempConfig cfg("kind = toy_exact\nkappa = 0.333\np = 0.5\nq = -1\n");
        const auto m = load_config(cfg.path);
        CHECK(m.nonsmooth_v_levels.size() == 1);
    }
    {
        TempConfig cfg("kind = warp_drive\n");
        CHECK_THROWS_AS(load_config(cfg.path), ArgumentError);
    }
    {
        TempConfig cfg("kind = mackey_glass\nA = 2\n"); // r missing
        CHECK_THROWS_AS(load_config(cfg.path), ArgumentError);
    }
    {
        TempConfig cfg("kind = mackey_glass\nA = 2\nr = 0.3\nbogus = 1\n");
        CHECK_THROWS_AS(load_config(cfg.path), ArgumentError);
    }
    {
        TempConfig cfg("kind = mackey_glass\nA = two\nr = 0.3\n");
        CHECK_THROWS_AS(load_config(cfg.path), ArgumentError);
    }
    CHECK_THROWS_AS(load_config("no_such_file_anywhere.cfg"), IoError);
}
