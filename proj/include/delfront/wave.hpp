#pragma once
#include <string>
#include <vector>

namespace delfront {

// Traveling-wave profile sampled on a strictly increasing grid in the moving
// coordinate. residual_inf is the sup norm of the discretized profile
// equation reported by whichever routine produced the profile; the
// verification module recomputes it independently.
//
// Phase normalization is producer-specific: the collocation solver pins
// phi(0) = (e1+e2)/2, the exact piecewise-linear-model profiles pin
// phi(-c*tau) = kappa.
struct WaveProfile {
    std::vector<double> t;
    std::vector<double> phi;
    double c = 0.0;
    double tau = 0.0;
    double h = 0.0; // c * tau
    double residual_inf = 0.0;
    std::string model_id;
};

} // namespace delfront
