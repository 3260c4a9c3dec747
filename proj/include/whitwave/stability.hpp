#pragma once

// Spectral stability of computed waves.
//
// The linearization about W_eps is  Lc_eps = -L_eps + nu - n'(eps^2 W_eps)
// and the eigenvalue problem is  d/dx Lc_eps z = lambda z. Everything here
// works with the scaled operator eps^-2 Lc_eps so thresholds stay O(1).
//
// The verdict follows the index count  k_unstable <= n^-(Lc) - k0,  with
// k0 >= 1 certified by a negative Vakhitov-Kolokolov value
// <Lc_eps^{-1} W_eps, W_eps>.

#include "whitwave/kdv.hpp"
#include "whitwave/solver.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace whitwave {

/// eps^-2 Lc_eps as a dense symmetric matrix in the trig basis.
struct LinearizedOp {
    PeriodicGrid grid;
    double eps;
    Eigen::MatrixXd matrix;

    Eigen::MatrixXd even_block() const;
    Eigen::MatrixXd odd_block() const;
    /// Largest entry of the even/odd coupling blocks.
    double offblock_norm() const;
    /// Largest |A - A^T| entry relative to the largest |A| entry.
    double symmetry_defect() const;
    SpectralField apply(const SpectralField& f) const;
};

/// Throws NumericalError for non-finite symbol values on the grid.
LinearizedOp assemble_linearized(const SymbolModel& model, const WaveSolution& solution);

struct EigenStructure {
    std::vector<double> eigenvalues;  // lowest ones, ascending
    Eigen::MatrixXd eigenvectors;     // trig coordinates
    std::vector<bool> even;
    double op_norm = 0.0;             // largest |eigenvalue|
};

/// Lowest `count` eigenpairs from the parity blocks. Throws NumericalError
/// if the eigensolver fails.
EigenStructure eigen_structure(const LinearizedOp& op, int count = 10);

struct VkResult {
    double value = 0.0;     // <Lc_eps^{-1} W, W>
    double scaled = 0.0;    // eps^2 * value
    double residual = 0.0;  // L2 norm of eps^-2 Lc_eps u - W on the even block, u = (eps^-2 Lc_eps)^{-1} W
};

/// Even-block solve. Throws NumericalError("even-block numerically singular").
VkResult vk_quantity(const SymbolModel& model, const WaveSolution& solution);
VkResult vk_quantity(const LinearizedOp& op, const WaveSolution& solution);

/// Leading-order prediction -(2/m''(0)) eps^-2 <Lc^{-1} phi, phi> for the
/// branch's limit profile phi.
double vk_asymptote(const SymbolModel& model, const WaveSolution& solution);

/// max over 16 random unit fields of
///   || (eps^-2 Lc_eps + mu)^{-1} f - (-m''(0)/2 Lc + mu)^{-1} f ||_{L2}.
/// Throws NumericalError if either shifted operator is not positive definite.
double resolvent_asymptotic_check(const SymbolModel& model, const WaveSolution& solution, double mu = 2.0,
                                  std::uint64_t seed = 20240611, int batch = 16);

enum class Verdict { SpectrallyStable, Inconclusive, IndexViolation };
std::string to_string(Verdict v);

struct IndexInputs {
    double eps = 0.0;
    std::vector<double> eigenvalues;
    int morse_index = 0;
    int kernel_dim = 0;
    double kernel_alignment = 0.0;
    double vk_value = 0.0;
};

struct FullSpectrum {
    std::vector<std::complex<double>> eigenvalues;
    double max_real = 0.0;
    // Worst relative mismatch when pairing each eigenvalue with -lambda and
    // with conj(lambda).
    double quadruple_defect = 0.0;
};

struct StabilityReport {
    double eps = 0.0;
    std::vector<double> eigenvalues;
    int morse_index = 0;
    int kernel_dim = 0;
    double kernel_tolerance = 0.0;
    double kernel_alignment = 0.0;
    double vk_value = 0.0;
    double vk_scaled = 0.0;
    double vk_residual = 0.0;
    double vk_asymptote = 0.0;
    int k_unstable_bound = 0;
    Verdict verdict = Verdict::Inconclusive;
    std::string diagnostics;

    double symmetry_defect = 0.0;
    double parity_offblock = 0.0;
    double kernel_residual = 0.0;  // ||eps^-2 Lc_eps W'|| / ||W'||
    std::optional<double> resolvent_gap;
    std::optional<FullSpectrum> full_spectrum;
};

/// k_unstable_bound = morse - k0 with k0 = 1 iff vk < 0; verdict from the
/// four certified facts only.
StabilityReport index_verdict(const IndexInputs& in);

enum class Subspace { Whole, ZeroMean };

/// Spectrum of ddx * op for a symmetric operator matrix in the trig basis;
/// ZeroMean drops the constant mode.
FullSpectrum product_spectrum(const PeriodicGrid& grid, const Eigen::MatrixXd& op, Subspace subspace);

/// Advisory check on d/dx (eps^-2 Lc_eps); not part of the verdict.
FullSpectrum full_spectrum_check(const SymbolModel& model, const WaveSolution& solution, Subspace subspace);

struct StabilityOptions {
    double mu = 2.0;
    std::uint64_t seed = 20240611;
    bool resolvent_check = true;
    bool full_spectrum = false;
    int eigen_count = 10;
};

StabilityReport analyze_stability(const SymbolModel& model, const WaveSolution& solution,
                                  const StabilityOptions& options = {});

} // namespace whitwave
