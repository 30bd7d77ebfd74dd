#pragma once
#include <optional>
#include <string>

#include "delfront/model_zoo.hpp"
#include "delfront/wave.hpp"

namespace delfront::wave_verify {

struct ExponentFit {
    double rate = 0.0;      // signed slope of log|phi - e| vs t
    double r_squared = 0.0;
    int points = 0;
    bool reliable = false;  // window spans >= one decade of amplitude
    std::string note;
};

struct VerifyReport {
    double residual_inf = 0.0;     // independent finite-difference audit
    int residual_nodes_skipped = 0; // near non-Lipschitz levels of g(.,v)
    bool monotone = false;
    std::optional<double> first_nonmonotone_t;
    int tail_sign_changes = 0;     // amplitude-confirmed crossings of e3
    std::optional<ExponentFit> left_fit;   // toward e1
    std::optional<ExponentFit> right_fit;  // toward e3; absent if oscillating
    double predicted_left = 0.0;   // dominant positive root at e1
    double predicted_right = 0.0;  // slowest negative real root at e3 (NaN if none)
    int right_multiplicity = 1;    // 2 on the boundary (t-prefactor regression)
};

// A-posteriori checks of a computed profile against the model it claims to
// solve. The residual is re-derived here (central differences, cubic delayed
// interpolation) rather than taken from the producer. Monotonicity tolerance
// is 1e-9*(e3-e1) per grid step. Tail exponents are fitted on
// amplitude-selected windows: nodes whose distance to the rest state lies
// between a noise floor (max of 1e-10*(e3-e1) and a multiple of the
// producer-reported residual) and 8% of the jump, restricted to the outer
// halves of the grid. Works for either speed sign; delayed arguments that
// leave the grid are simply not audited.
VerifyReport verify(const WaveProfile& w, const model_zoo::ModelSpec& m,
                    const model_zoo::SteadyStates& s);

} // namespace delfront::wave_verify
