#pragma once
#include <optional>
#include <string>
#include <vector>

#include "delfront/model_zoo.hpp"
#include "delfront/wave.hpp"

namespace delfront::pde_sim {

// Method of lines for u_t = u_xx + g(u(t,x), u(t-tau,x)) on [0, x_max]:
// second-order central space differences, homogeneous Neumann ends, explicit
// Euler in time (dt <= 0.4*dx^2 enforced), delayed values from a ring buffer
// of past levels with linear interpolation in time. History on [-tau, 0] is
// the initial condition held fixed.
struct SimConfig {
    double x_max = 400.0;
    int nx = 4001;
    double dt = 0.0;          // 0 -> 0.4*dx^2
    double t_final = 120.0;
    double tau = 0.0;
    double x0 = 80.0;         // initial interface location
    double output_every = 0.5;
    // step: u = e3 for x <= x0, e1 beyond (front then travels right at the
    // positive wave speed). profile: seed (t, phi) resampled as u(x) = the
    // profile mirrored about x0.
    enum class Ic { step, profile } ic = Ic::step;
    std::vector<double> seed_t, seed_phi;
    std::optional<double> snapshot_every; // empty -> final snapshot only
};

struct Snapshot {
    double time = 0.0;
    std::vector<double> u;
};

struct SimResult {
    std::vector<double> x;
    std::vector<double> front_time;     // sampled every output_every
    std::vector<double> front_position; // mid-level crossing, linear in x
    double measured_speed = 0.0;        // least-squares slope, final 40%
    double fit_r2 = 0.0;
    bool oscillation_flag = false;      // overshoot above e3 behind the front
    std::vector<Snapshot> snapshots;    // per snapshot_every, plus final state
};

// Throws ArgumentError for bad sizes/steps, SolverError if the state stops
// being finite or the front reaches within 10 cells of either end.
SimResult simulate(const model_zoo::ModelSpec& m, const model_zoo::SteadyStates& s,
                   const SimConfig& cfg);

} // namespace delfront::pde_sim
