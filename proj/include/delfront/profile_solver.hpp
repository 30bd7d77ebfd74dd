#pragma once
#include <memory>
#include <optional>
#include <vector>

#include "delfront/model_zoo.hpp"
#include "delfront/wave.hpp"

namespace delfront::profile_solver {

// Collocation of phi'' - c phi' + g(phi(t), phi(t - c*tau)) = 0 on a uniform
// grid over [-L, L]. Unknowns are the N+1 nodal values plus c; equations are
// N-1 interior central-difference rows, two one-sided second-order Robin
// rows matching the linearized tail decay rates at e1/e3, and the phase
// condition phi(0) = (e1+e2)/2. Newton with Armijo backtracking on a sparse
// LU factorization (band + delay interpolation entries + border column).
struct SolverOptions {
    double L = 40.0;
    int N = 2000;
    double tol = 1e-8;            // Newton residual sup-norm target
    int max_newton = 50;
    double boundary_tol_factor = 1e-6; // * (e3 - e1) for the tail-clearance check
    std::optional<double> c_init;      // default 0.1 * sign of the diagonal integral
};

// tau = 0 solve from the logistic initial guess.
WaveProfile solve_nondelayed(const model_zoo::ModelSpec& m,
                             const model_zoo::SteadyStates& s,
                             const SolverOptions& opt = {});

// Same discretization at delay tau, Newton-started from `seed` (grid
// interpolated if it differs). Delayed arguments left of -L use the
// linearized tail extension e1 + (phi(-L) - e1) * exp(rho * (t + L)).
WaveProfile solve_delayed(const model_zoo::ModelSpec& m,
                          const model_zoo::SteadyStates& s, double tau,
                          const WaveProfile& seed, const SolverOptions& opt = {});

enum class Termination {
    reached_tau_max,
    newton_failure,   // step floor hit without convergence
    left_domain,      // continued past the boundary by the configured overshoot
    speed_bound_hit,  // c above ceiling or below the near-zero floor
};

struct ContinuationPoint {
    double tau = 0.0;
    double c = 0.0;
    bool monotone = false;
    bool in_domain = true; // vacuously true when no domain test applies
    double residual = 0.0;
    std::shared_ptr<const WaveProfile> profile;
};

struct ContinuationOptions {
    double tau_max = 6.0;
    double dtau_init = 0.05;
    double dtau_min = 1e-5;
    double dtau_max = 0.1;
    double speed_ceiling = 50.0;
    double speed_floor = 1e-3;     // |c| below this stops the branch
    double domain_overshoot = 0.5; // how far past the boundary to keep going
    SolverOptions solver{};
};

struct ContinuationCurve {
    std::vector<ContinuationPoint> points;
    Termination termination = Termination::reached_tau_max;
    std::optional<double> domain_exit_tau; // interpolated crossing, if seen
};

// March tau from start.tau (profile `start` must already solve that delay)
// toward tau_max: step 0.05, halved on Newton failure (floor 1e-5), doubled
// back after three successes (cap 0.1). Domain membership is tracked against
// the invaded-state coefficients whenever both are negative; monotonicity is
// measured on each profile. After leaving the domain the march continues for
// `domain_overshoot` more delay before stopping.
ContinuationCurve continue_in_tau(const model_zoo::ModelSpec& m,
                                  const model_zoo::SteadyStates& s,
                                  const WaveProfile& start,
                                  const ContinuationOptions& opt);

// Re-solve `w` on a finer grid (N_new >= N, L_new >= L); seed is the cubic
// interpolant of w.
WaveProfile refine(const model_zoo::ModelSpec& m, const model_zoo::SteadyStates& s,
                   const WaveProfile& w, int N_new, double L_new,
                   const SolverOptions& opt = {});

} // namespace delfront::profile_solver
