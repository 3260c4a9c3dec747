#pragma once

// Newton solver and eps-continuation for the rescaled traveling-wave
// equation
//
//     Phi(W, eps) = W - R_eps[ g_eps(W) ] = 0,
//     R_eps = eps^2 (nu_eps - L_eps)^{-1},   g_eps(W) = eps^-4 n(eps^2 W),
//
// posed on even fields. A solution gives the physical wave
// u(x, t) = eps^2 W(eps (x - nu_eps t)).

#include "whitwave/kdv.hpp"
#include "whitwave/model.hpp"
#include "whitwave/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace whitwave {

enum class WaveMode { Solitary, Periodic };
enum class LinearSolver { Dense, Krylov };

std::string to_string(WaveMode mode);
WaveMode parse_wave_mode(const std::string& s);

struct SolveConfig {
    double eps = 0.1;
    WaveMode mode = WaveMode::Solitary;
    double half_period = 40.0;
    int n_points = 1024;
    double newton_tol = 1e-11;
    int max_iter = 25;
    double damping = 1.0;
    LinearSolver linear_solver = LinearSolver::Dense;

    /// Throws InputError on out-of-range values.
    void validate() const;
    PeriodicGrid grid() const { return PeriodicGrid(half_period, n_points); }
};

struct WaveSolution {
    std::string model_name;
    WaveMode mode = WaveMode::Solitary;
    double eps = 0.0;
    double nu = 0.0;
    SpectralField W;
    double residual_sup = 0.0;
    int iterations = 0;
    double parity_defect = 0.0;
    double newton_tol = 1e-11;
};

/// Phi(W, eps) as a field.
SpectralField phi_residual(const SymbolModel& model, double eps, const SpectralField& W);

/// Damped Newton in cosine coordinates. Throws NumericalError on
/// "max iterations exceeded", "Jacobian numerically singular" and
/// validity-radius violations.
WaveSolution newton_solve(const SymbolModel& model, const SolveConfig& config,
                          const SpectralField& initial_guess);

/// Limit profile used to seed and to measure a branch: sigma for solitary
/// waves, the cnoidal phi_P for periodic ones.
LimitProfile limit_profile_for(const SymbolModel& model, WaveMode mode, const PeriodicGrid& grid);

struct ContinuationRun {
    std::vector<WaveSolution> solutions;
    std::vector<double> deviations;  // H1 distance to the limit profile
    std::optional<double> slope;     // least-squares slope of log d vs log eps
    bool complete = true;
    std::string failure;             // first failing rung, when incomplete
};

ContinuationRun continue_in_eps(const SymbolModel& model, const std::vector<double>& eps_ladder,
                                const SolveConfig& base);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct PhysicalWave {
    std::vector<double> x;  // physical nodes, x_j / eps
    std::vector<double> u;  // eps^2 W
    double half_period = 0.0;
    double period = 0.0;
    double speed = 0.0;
    double amplitude = 0.0;
};

PhysicalWave unscale(const WaveSolution& solution);

/// Sup of (nu - L) w - n(w) for the physical wave, evaluated with the
/// unscaled symbol on the physical grid.
double physical_residual(const SymbolModel& model, const PhysicalWave& wave);

/// max |W| over |x| >= 0.9 P. Throws InputError for periodic solutions.
double decay_check(const WaveSolution& solution);

} // namespace whitwave
