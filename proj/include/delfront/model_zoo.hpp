#pragma once
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace delfront::model_zoo {

enum class ModelKind { mackey_glass, virus, toy_smooth, custom };

// Reaction kinetics g(u, v) of u_t = u_xx + g(u(t,x), u(t-tau,x)) together
// with analytic partials and the working interval [domain_lo, domain_hi].
// nonsmooth_v_levels lists v values where g(., v) is not Lipschitz (the
// exact piecewise-linear birth function has one at kappa); residual audits
// skip grid nodes whose delayed argument passes near these levels.
struct ModelSpec {
    std::function<double(double, double)> g;
    std::function<double(double, double)> g1; // d g / d u
    std::function<double(double, double)> g2; // d g / d v
    double domain_lo = 0.0;
    double domain_hi = 1.0;
    ModelKind kind = ModelKind::custom;
    std::string id;
    std::vector<double> nonsmooth_v_levels;
};

// g(u,v) = -u + f(v), f(u) = u + A*u*(u - r)*(1 - u); A > 0, 0 < r < 1.
ModelSpec make_mackey_glass(double A, double r);

// g(u,v) = u*(1 - u - f(v)), f(v) = amp * exp(-width*(v - v0)^2) on [0, 1].
ModelSpec make_virus(double amp, double width, double v0);

// Smoothed two-slope birth function: f(u) blends p*u into 1 + q*(u-1) with a
// logistic switch of width eps centered at kappa; g(u,v) = -u + f(v).
ModelSpec make_toy_smooth(double kappa, double p, double q, double eps);

// Exact two-slope birth function (discontinuous slope at kappa):
// f(v) = p*v for v < kappa, 1 + q*(v-1) for v >= kappa; g(u,v) = -u + f(v).
ModelSpec make_toy_exact(double kappa, double p, double q);

// g(u,v) = -u + f(v) with polynomial f(v) = sum coeffs[k] * v^k.
ModelSpec make_custom_birth(const std::vector<double>& coeffs, double lo, double hi);

struct SteadyStates {
    double e1 = 0.0;
    double e2 = 0.0;
    double e3 = 1.0;
};

// Roots of g(u, u) on (domain_lo, domain_hi): 2048-point scan, each bracket
// bisected to 1e-12. Exactly three roots are required (with g'(e1), g'(e3)
// negative and g'(e2) positive along the diagonal); anything else throws
// ModelError("not bistable on the given interval").
SteadyStates find_steady_states(const ModelSpec& m);

struct HypothesisReport {
    bool bistable_ok = false;          // three ordered states, stable outer pair
    bool unimodal_low_ok = false;      // single v-extremum kappa in (e1, e2) branch
    bool unimodal_high_ok = false;     // kappa in (e2, e3) branch
    bool subtangency_ok = false;       // g_j(u,v) >= g_j(e3,e3) for u >= v on the box
    bool integral_ok = false;          // integral of g(u,u) over [e1, e3] positive
    double integral_value = 0.0;
    std::optional<double> kappa;       // detected v-extremum, if unique and u-independent
    std::vector<std::string> notes;    // failed-condition descriptions, grid sizes
};

// Grid verification (400 x 400 samples) of the structural conditions the
// wave theory needs. A pass is "passed on the grid", never a proof; notes
// record each failure with a witness point.
HypothesisReport check_hypotheses(const ModelSpec& m, const SteadyStates& s);

// Adaptive Simpson quadrature of g(u,u) over [e1, e3], tolerance 1e-10.
double integral_over_diagonal(const ModelSpec& m, const SteadyStates& s);

// The reflected model gt(u,v) = -g(e1+e3-u, e1+e3-v): swaps the roles of the
// outer states so negative-speed fronts of g become positive-speed fronts
// of gt. States map to {e1, e1+e3-e2, e3}.
ModelSpec transform_reflect(const ModelSpec& m, const SteadyStates& s);

// key = value config file, '#' comments. Keys: kind plus the per-kind
// parameters (see FORMATS.md). Throws IoError on unreadable files,
// ArgumentError on bad keys/values.
ModelSpec load_config(const std::string& path);

// Finite-difference check of g1/g2 on a 20 x 20 grid (step 1e-6): relative
// mismatch above 1e-4 throws ModelError. Points within 100 steps of a
// non-Lipschitz level are skipped.
void validate_partials(const ModelSpec& m);

} // namespace delfront::model_zoo
