#include "delfront/pde_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "delfront/detail/numeric.hpp"
#include "delfront/errors.hpp"

namespace delfront::pde_sim {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void validate(const model_zoo::ModelSpec& m, const model_zoo::SteadyStates& s,
              const SimConfig& cfg, double dx) {
    if (!m.g) throw ArgumentError("model has no kinetics");
    if (!(cfg.x_max > 0.0) || !std::isfinite(cfg.x_max))
        throw ArgumentError("x_max must be positive and finite");
    if (cfg.nx < 32) throw ArgumentError("nx must be at least 32");
    if (!(cfg.x0 > 0.0) || !(cfg.x0 < cfg.x_max))
        throw ArgumentError("x0 must lie inside (0, x_max)");
    if (!(cfg.t_final > 0.0) || !std::isfinite(cfg.t_final))
        throw ArgumentError("t_final must be positive and finite");
    if (!std::isfinite(cfg.tau) || cfg.tau < 0.0)
        throw ArgumentError("tau must be finite and nonnegative");
    if (!(cfg.output_every > 0.0)) throw ArgumentError("output_every must be positive");
    if (cfg.snapshot_every && !(*cfg.snapshot_every > 0.0))
        throw ArgumentError("snapshot_every must be positive");
    if (!(cfg.dt >= 0.0) || !std::isfinite(cfg.dt))
        throw ArgumentError("dt must be nonnegative");
    if (cfg.dt > 0.4 * dx * dx * (1.0 + 1e-12))
        throw ArgumentError("dt exceeds the diffusive stability bound 0.4*dx^2");
    if (!(s.e3 > s.e1)) throw ArgumentError("steady states must satisfy e1 < e3");
    if (cfg.ic == SimConfig::Ic::profile) {
        if (cfg.seed_t.size() != cfg.seed_phi.size() || cfg.seed_t.size() < 4)
            throw ArgumentError("profile seed needs matching t/phi arrays with at least 4 nodes");
        for (std::size_t i = 1; i < cfg.seed_t.size(); ++i)
            if (!(cfg.seed_t[i] > cfg.seed_t[i - 1]))
                throw ArgumentError("profile seed grid must be strictly increasing");
    }
}

std::vector<double> initial_state(const SimConfig& cfg, const model_zoo::SteadyStates& s,
                                  const std::vector<double>& x) {
    std::vector<double> u(x.size());
    if (cfg.ic == SimConfig::Ic::step) {
        for (std::size_t i = 0; i < x.size(); ++i) u[i] = (x[i] <= cfg.x0) ? s.e3 : s.e1;
        return u;
    }
    // the seed runs e1 -> e3 left to right in its own coordinate; mirroring
    // about x0 puts e3 on the left as the step start does
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = cfg.x0 - x[i];
        if (w <= cfg.seed_t.front())
            u[i] = cfg.seed_phi.front();
        else if (w >= cfg.seed_t.back())
            u[i] = cfg.seed_phi.back();
        else
            u[i] = detail::interp_cubic(cfg.seed_t, cfg.seed_phi, w);
    }
    return u;
}

// first left-to-right descent through the mid level; -1 when the state never
// crosses it (for example spatially uniform data)
int crossing_index(const std::vector<double>& u, double lev) {
    for (std::size_t i = 0; i + 1 < u.size(); ++i)
        if (u[i] >= lev && u[i + 1] < lev) return static_cast<int>(i);
    return -1;
}

} // namespace

SimResult simulate(const model_zoo::ModelSpec& m, const model_zoo::SteadyStates& s,
                   const SimConfig& cfg) {
    const double dx = cfg.x_max / (cfg.nx - 1);
    validate(m, s, cfg, dx);
    const double dt = (cfg.dt > 0.0) ? cfg.dt : 0.4 * dx * dx;
    const int nsteps = static_cast<int>(std::ceil(cfg.t_final / dt - 1e-9));
    const std::size_t nx = static_cast<std::size_t>(cfg.nx);

    // ring of stored levels deep enough to interpolate t - tau linearly
    const int back = (cfg.tau > 0.0) ? static_cast<int>(std::ceil(cfg.tau / dt)) + 2 : 0;
    if (back > 0 && static_cast<double>(back) * static_cast<double>(nx) > 2.5e8)
        throw ArgumentError("delay history would exceed 2 GB; coarsen the grid or shrink tau");

    SimResult out;
    out.x.resize(nx);
    for (std::size_t i = 0; i < nx; ++i) out.x[i] = i * dx;

    const std::vector<double> u0 = initial_state(cfg, s, out.x);
    std::vector<double> u = u0, unew(nx);
    std::vector<std::vector<double>> ring;
    if (back > 0) ring.assign(static_cast<std::size_t>(back), u0);

    const double lev = 0.5 * (s.e1 + s.e3);
    const double span = s.e3 - s.e1;
    const double inv_dx2 = 1.0 / (dx * dx);
    const double tau_steps = cfg.tau / dt;

    bool seen_crossing = false;
    const auto sample = [&](double t, const std::vector<double>& st) {
        for (double v : st)
            if (!std::isfinite(v)) throw SolverError("solution lost finiteness");
        out.front_time.push_back(t);
        const int ci = crossing_index(st, lev);
        if (ci < 0) {
            // an interface that existed and is gone swept past an end between
            // samples; data that never had one (uniform states) records NaN
            if (seen_crossing)
                throw SolverError("front reached the domain margin; enlarge x_max");
            out.front_position.push_back(kNan);
            return;
        }
        seen_crossing = true;
        if (ci < 10 || ci > cfg.nx - 12)
            throw SolverError("front reached the domain margin; enlarge x_max");
        const double frac = (st[ci] - lev) / (st[ci] - st[ci + 1]);
        out.front_position.push_back(out.x[ci] + frac * dx);
    };

    sample(0.0, u);
    if (cfg.snapshot_every) out.snapshots.push_back({0.0, u});
    double next_out = cfg.output_every;
    double next_snap = cfg.snapshot_every ? *cfg.snapshot_every : kNan;

    for (int n = 0; n < nsteps; ++n) {
        const double* A = nullptr;
        const double* B = nullptr;
        double wb = 0.0;
        bool held = cfg.tau == 0.0;
        if (!held) {
            const double sidx = n - tau_steps; // level index of time t_n - tau
            if (sidx <= 0.0) {
                held = true; // history is the initial condition held fixed
            } else {
                const int j = static_cast<int>(sidx);
                wb = sidx - j;
                A = ring[static_cast<std::size_t>(j % back)].data();
                B = ring[static_cast<std::size_t>((j + 1) % back)].data();
            }
        }
        for (std::size_t i = 0; i < nx; ++i) {
            double lap;
            if (i == 0)
                lap = 2.0 * (u[1] - u[0]);
            else if (i == nx - 1)
                lap = 2.0 * (u[nx - 2] - u[nx - 1]);
            else
                lap = u[i - 1] - 2.0 * u[i] + u[i + 1];
            double vd;
            if (cfg.tau == 0.0)
                vd = u[i];
            else if (held)
                vd = u0[i];
            else
                vd = (1.0 - wb) * A[i] + wb * B[i];
            unew[i] = u[i] + dt * (lap * inv_dx2 + m.g(u[i], vd));
        }
        u.swap(unew);
        const double t = (n + 1) * dt;
        if (back > 0) ring[static_cast<std::size_t>((n + 1) % back)] = u;

        const bool last = n == nsteps - 1;
        if (t + 1e-12 >= next_out || last) {
            sample(t, u);
            while (next_out <= t + 1e-12) next_out += cfg.output_every;
        }
        if (cfg.snapshot_every && (t + 1e-12 >= next_snap)) {
            out.snapshots.push_back({t, u});
            while (next_snap <= t + 1e-12) next_snap += *cfg.snapshot_every;
        }
        if (last && (out.snapshots.empty() || out.snapshots.back().time < t - 1e-9))
            out.snapshots.push_back({t, u});
    }

    // speed regression over the trailing 40% of samples with a real interface
    std::vector<double> ts, xs;
    for (std::size_t k = 0; k < out.front_time.size(); ++k)
        if (out.front_time[k] >= 0.6 * cfg.t_final && std::isfinite(out.front_position[k])) {
            ts.push_back(out.front_time[k]);
            xs.push_back(out.front_position[k]);
        }
    if (ts.size() >= 2) {
        const auto fit = detail::fit_line(ts, xs);
        out.measured_speed = fit.slope;
        out.fit_r2 = fit.r_squared;
    }

    // overshoot ripple around e3 behind the interface, ignoring the cells
    // within two space units of it; two consecutive hot cells required
    const auto& fin = out.snapshots.back().u;
    const int ci = crossing_index(fin, lev);
    if (ci > 0) {
        const int margin = static_cast<int>(std::ceil(2.0 / dx));
        int run = 0;
        for (int i = 10; i < ci - margin; ++i) {
            if (fin[static_cast<std::size_t>(i)] - s.e3 > 1e-5 * span) {
                if (++run >= 2) {
                    out.oscillation_flag = true;
                    break;
                }
            } else {
                run = 0;
            }
        }
    }
    return out;
}

} // namespace delfront::pde_sim
