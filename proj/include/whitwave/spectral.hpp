#pragma once

// Periodic collocation grids, Fourier coefficients and multiplier operators.
//
// Conventions. The cell is [-P, P) with N nodes x_j = -P + 2Pj/N and
// wavenumbers K_j = j*pi/P for j in {-N/2+1, ..., N/2}. Coefficients follow
//
//     f^(j) = (1/2P) \int_{-P}^{P} f(x) exp(-i K_j x) dx,   f(x) = sum_j f^(j) exp(i K_j x),
//
// evaluated by the trapezoid rule (exact for trigonometric polynomials of
// degree < N/2).
//
// Dense linear algebra uses the real trigonometric basis, orthonormal with
// respect to the Euclidean product of nodal values:
//
//     index a in [0, N/2]          : cos(K_a x)   (weight 1/sqrt(N) at a = 0, N/2, else sqrt(2/N))
//     index N/2 + b, b in [1, N/2-1]: sin(K_b x)   (weight sqrt(2/N))
//
// The first N/2+1 entries span the even fields, the rest the odd fields.
// L2 inner products equal spacing() times the Euclidean product of these
// coordinates.

#include "whitwave/model.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace whitwave {

class PeriodicGrid {
public:
    PeriodicGrid(double half_period, int n_points);

    double half_period() const { return half_period_; }
    int size() const { return n_; }
    int mode_count() const { return n_ / 2 + 1; }
    double spacing() const { return 2.0 * half_period_ / n_; }
    double length() const { return 2.0 * half_period_; }

    double node(int j) const { return (2.0 * j - n_) * half_period_ / n_; }
    std::vector<double> nodes() const;
    /// K_j = j*pi/P; j may be negative.
    double wavenumber(int j) const;
    /// Node index of -x_j.
    int mirror(int j) const { return j == 0 ? 0 : n_ - j; }

    bool operator==(const PeriodicGrid& other) const = default;

private:
    double half_period_;
    int n_;
};

using Coefficients = std::vector<std::complex<double>>;

/// Real field sampled on a grid. Coefficients are computed on demand and
/// cached until the values change. A single field is not safe for concurrent
/// first access to coefficients(); distinct fields are independent.
class SpectralField {
public:
    SpectralField(PeriodicGrid grid, std::vector<double> values);

    static SpectralField zeros(const PeriodicGrid& grid);
    static SpectralField from_function(const PeriodicGrid& grid, const std::function<double(double)>& f);
    /// Half spectrum, modes 0..N/2; imaginary parts of modes 0 and N/2 are dropped.
    static SpectralField from_coefficients(const PeriodicGrid& grid, const Coefficients& half);

    const PeriodicGrid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double operator[](int j) const { return values_[static_cast<std::size_t>(j)]; }
    int size() const { return grid_.size(); }

    void set_values(std::vector<double> values);

    /// Modes 0..N/2 under the (1/2P) normalization.
    const Coefficients& coefficients() const;
    /// Coefficient for any j in the symmetric index set.
    std::complex<double> coefficient(int j) const;

    double max_abs() const;

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(double s);

private:
    PeriodicGrid grid_;
    std::vector<double> values_;
    mutable std::optional<Coefficients> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);
/// Pointwise product on the collocation nodes (no dealiasing).
SpectralField pointwise_product(const SpectralField& a, const SpectralField& b);

/// Real, even symbol sampled at the grid's non-negative wavenumbers.
struct MultiplierOp {
    PeriodicGrid grid;
    std::vector<double> symbol;  // length N/2+1, symbol[j] at K_j
    std::string description;

    static MultiplierOp from_symbol(const PeriodicGrid& grid, const std::function<double(double)>& m,
                                    std::string description);
};

SpectralField apply_multiplier(const MultiplierOp& op, const SpectralField& f);

/// Multiplier K -> eps^2 / (nu_eps - m(eps K)). Throws NumericalError naming
/// the wavenumber if a denominator is <= 1e-14.
MultiplierOp resolvent_R_eps(const SymbolModel& model, double eps, const PeriodicGrid& grid);

/// sup over grid wavenumbers of |eps^2/(nu_eps - m(eps K)) + 1/(m''(0)(1+K^2)/2)|.
double hinge_gap(const SymbolModel& model, double eps, const PeriodicGrid& grid);

/// (1 - d^2/dx^2)^{-1}.
SpectralField helmholtz_inverse(const SpectralField& f);
/// (1 - d^2/dx^2).
SpectralField helmholtz(const SpectralField& f);
/// Multiplier iK with the Nyquist mode zeroed.
SpectralField ddx(const SpectralField& f);

double l2_inner(const SpectralField& f, const SpectralField& g);
double l2_norm(const SpectralField& f);
double h1_norm(const SpectralField& f);
double sup_norm(const SpectralField& f);

SpectralField even_projection(const SpectralField& f);
SpectralField odd_projection(const SpectralField& f);
/// sup |f(x) - f(-x)| / 2.
double parity_defect(const SpectralField& f);

// --- real trigonometric basis -------------------------------------------

namespace trig {

/// Wavenumber attached to each basis index (length N).
Eigen::VectorXd basis_wavenumbers(const PeriodicGrid& grid);

Eigen::VectorXd coordinates(const SpectralField& f);
SpectralField from_coordinates(const PeriodicGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& c);

/// Cosine block only (length N/2+1).
Eigen::VectorXd cosine_coordinates(const SpectralField& f);
SpectralField from_cosine_coordinates(const PeriodicGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& c);

/// Matrix of f -> V*f (nodal product) in the full basis, assembled from the
/// discrete Fourier coefficients of V: Toeplitz-plus-Hankel in the mode index.
Eigen::MatrixXd potential_matrix(const SpectralField& V);
/// Cosine-cosine block of potential_matrix.
Eigen::MatrixXd potential_cosine_block(const SpectralField& V);

/// Antisymmetric matrix of ddx in the full basis.
Eigen::MatrixXd derivative_matrix(const PeriodicGrid& grid);

} // namespace trig

} // namespace whitwave
