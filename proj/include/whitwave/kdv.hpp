#pragma once

// The eps = 0 limit: -W'' + W - gamma W^2 = 0, its solitary and cnoidal
// solutions, the linearization  Lc = -d^2 + 1 - 2 gamma phi  and the
// fixed-point Jacobian  K = Id - 2 gamma (1 - d^2)^{-1}(phi .).

#include "whitwave/spectral.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace whitwave {

enum class ProfileKind { Solitary, Cnoidal };

std::string to_string(ProfileKind kind);

struct LimitProfile {
    ProfileKind kind;
    double gamma;
    SpectralField field;
    double residual;  // sup norm of -W'' + W - gamma W^2
    int iterations = 0;
};

/// Sup-norm residual of -W'' + W - gamma W^2 via spectral differentiation.
double limit_residual(const SpectralField& W, double gamma);

/// (3/(2 gamma)) sech^2(x/2) sampled on the grid.
LimitProfile sigma(double gamma, const PeriodicGrid& grid);
/// Analytic derivative of sigma.
SpectralField sigma_prime(double gamma, const PeriodicGrid& grid);

/// Even 2P-periodic non-constant solution found by Newton in cosine
/// coordinates from the periodized soliton (images |n| <= 2). The grid's
/// half-period is the period cell. Throws NumericalError if Newton diverges
/// or lands on a constant state.
LimitProfile solve_cnoidal(double gamma, const PeriodicGrid& grid, double tol = 1e-11, int max_iter = 30);

/// Dense symmetric matrix of -d^2 + 1 - 2 gamma phi in the trig basis.
struct LimitOperator {
    PeriodicGrid grid;
    Eigen::MatrixXd matrix;

    Eigen::MatrixXd even_block() const;
    Eigen::MatrixXd odd_block() const;
    SpectralField apply(const SpectralField& f) const;
};

LimitOperator limit_operator(const LimitProfile& profile);

struct LimitSpectrum {
    std::vector<double> eigenvalues;  // ascending
    Eigen::MatrixXd eigenvectors;     // trig coordinates, one column per eigenvalue
    std::vector<bool> even;           // parity of each eigenvector
};

/// Lowest `count` eigenvalues, merged from the even and odd blocks.
LimitSpectrum limit_spectrum(const LimitOperator& op, int count = 10, bool vectors = true);

/// -(2 sigma + x sigma')/2, which Lc maps to sigma.
SpectralField linv_sigma_closed_form(double gamma, const PeriodicGrid& grid);

/// <Lc^{-1} phi, phi> by a dense solve on the even block.
double limit_vk_numeric(const LimitProfile& profile);

/// Closed form -(3/4)||sigma||^2 = -9/(2 gamma^2).
double limit_vk_closed_form(double gamma);

/// Matrix of K restricted to the even (cosine) block.
Eigen::MatrixXd k_operator_even_block(const LimitProfile& profile);
/// Applies K on the full space through FFTs.
SpectralField apply_k_operator(const LimitProfile& profile, const SpectralField& f);
/// Smallest singular value of K on the even subspace.
double k_operator_min_singular(const LimitProfile& profile);

} // namespace whitwave
