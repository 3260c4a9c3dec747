#pragma once

// Dispersive symbol m, nonlinearity n, and the hypotheses the wave
// construction relies on.
//
// A model describes the family  u_t + (L u + n(u))_x = 0  where L is the
// Fourier multiplier with even symbol m. Everything downstream uses the
// derived constants m(0), m''(0), n''(0) and gamma = -n''(0)/m''(0).

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace whitwave {

using ScalarFn = std::function<double(double)>;

struct Nonlinearity {
    std::string name;
    ScalarFn eval;
    ScalarFn deriv1;  // empty: centered finite differences
    ScalarFn deriv2;  // empty: centered finite differences
    double delta_star = 1e6;

    double value(double u) const { return eval(u); }
    double first_derivative(double u) const;
    double second_derivative(double u) const;
};

struct Multiplier {
    std::string name;
    ScalarFn eval;
    ScalarFn deriv2;  // empty: centered finite differences
    double k_star = 1.0;
    double k_max = 200.0;
    // User promise that m decreases on [k_max, inf); lets the tail check
    // stop at k_max.
    bool monotone_tail = false;
    // Tabulated symbols: smoothness on [-k_star, k_star] cannot be verified.
    bool tabulated = false;

    double value(double k) const { return eval(k); }
    double second_derivative(double k) const;
};

class SymbolModel {
public:
    SymbolModel(Multiplier multiplier, Nonlinearity nonlinearity);

    const Multiplier& multiplier() const { return multiplier_; }
    const Nonlinearity& nonlinearity() const { return nonlinearity_; }
    std::string name() const { return multiplier_.name + "/" + nonlinearity_.name; }

    double m0() const { return m0_; }
    double mpp0() const { return mpp0_; }
    double npp0() const { return npp0_; }
    // NaN when m''(0) >= 0; use gamma_of() for the checked accessor.
    double gamma() const { return gamma_; }

private:
    Multiplier multiplier_;
    Nonlinearity nonlinearity_;
    double m0_;
    double mpp0_;
    double npp0_;
    double gamma_;
};

/// sqrt(tanh(k)/k), even, with the removable singularity at k = 0 handled by
/// its Taylor series for |k| < 1e-4.
double whitham_symbol(double k);
/// Analytic second derivative of whitham_symbol.
double whitham_symbol_deriv2(double k);

Multiplier whitham_multiplier(double k_star = 1.0, double k_max = 200.0);
/// m(k) = 1 - k^2/2, the symbol for which the rescaled problem is exactly KdV.
Multiplier kdv_multiplier(double k_star = 1.0, double k_max = 200.0);
/// m(k) = 1 + k^2; violates m'' < 0 and serves as a negative example.
Multiplier convex_multiplier(double k_star = 1.0, double k_max = 200.0);

Nonlinearity quadratic_nonlinearity(double delta_star = 1e6);
Nonlinearity quadratic_cubic_nonlinearity(double delta_star = 1.0);

SymbolModel whitham_model();
SymbolModel kdv_model();

struct HypothesisCheck {
    std::string name;
    bool passed = false;
    double witness = 0.0;
    std::string detail;
};

struct VerificationReport {
    std::vector<HypothesisCheck> checks;
    double m0 = 0.0;
    double m2 = 0.0;  // max of m'' over sampled |k| <= k_star
    double m1 = 0.0;  // sup of m over sampled [k_star, k_max]
    double mpp0 = 0.0;
    double npp0 = 0.0;
    double gamma = 0.0;
    int samples = 0;
    double n_sample_radius = 0.0;
    std::string tail_path;   // "sampled" or "sampled+declared_monotone"
    std::string regularity;  // "verified_analytic_or_fd" or "assumed (tabulated)"

    bool passed() const;
};

/// Samples each structural hypothesis on uniform grids. Never throws on a
/// failed hypothesis; throws NumericalError if an evaluator returns a
/// non-finite value and InputError if samples < 100.
VerificationReport verify_model(const SymbolModel& model, int samples = 400);

/// -n''(0)/m''(0); throws NumericalError when m''(0) >= 0.
double gamma_of(const SymbolModel& model);

/// Wave speed of the rescaled branch, m(0) - m''(0) eps^2 / 2.
double nu_of_eps(const SymbolModel& model, double eps);

/// Rescaled nonlinearity eps^-4 n(eps^2 W) evaluated pointwise.
/// Throws InputError when eps^2 max|W| >= delta_star.
std::vector<double> g_eps(const SymbolModel& model, double eps, std::span<const double> W);

/// Pointwise eps^-2 n'(eps^2 W): the potential of the linearization.
std::vector<double> linearized_potential(const SymbolModel& model, double eps,
                                         std::span<const double> W);

} // namespace whitwave
