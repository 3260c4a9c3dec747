#include "whitwave/model.hpp"

#include "whitwave/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace whitwave {

namespace {

constexpr double kZeroTol = 1e-12;

double fd_step(double x) { return 1e-5 * (1.0 + std::fabs(x)); }

double centered_first(const ScalarFn& f, double x) {
    const double h = fd_step(x);
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

double centered_second(const ScalarFn& f, double x) {
    const double h = fd_step(x);
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

double checked(double v, const std::string& what, double at) {
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os << what << " returned a non-finite value at " << at;
        throw NumericalError(os.str());
    }
    return v;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

} // namespace

double Nonlinearity::first_derivative(double u) const {
    return deriv1 ? deriv1(u) : centered_first(eval, u);
}

double Nonlinearity::second_derivative(double u) const {
    return deriv2 ? deriv2(u) : centered_second(eval, u);
}

double Multiplier::second_derivative(double k) const {
    return deriv2 ? deriv2(k) : centered_second(eval, k);
}

SymbolModel::SymbolModel(Multiplier multiplier, Nonlinearity nonlinearity)
    : multiplier_(std::move(multiplier)), nonlinearity_(std::move(nonlinearity)) {
    if (!multiplier_.eval || !nonlinearity_.eval)
        throw InputError("symbol model needs both m and n evaluators");
    m0_ = multiplier_.value(0.0);
    mpp0_ = multiplier_.second_derivative(0.0);
    npp0_ = nonlinearity_.second_derivative(0.0);
    gamma_ = mpp0_ < 0.0 ? -npp0_ / mpp0_ : std::numeric_limits<double>::quiet_NaN();
}

double whitham_symbol(double k) {
    const double a = std::fabs(k);
    if (a < 1e-4) {
        const double k2 = a * a;
        return 1.0 - k2 / 6.0 + 19.0 * k2 * k2 / 360.0;
    }
    return std::sqrt(std::tanh(a) / a);
}

double whitham_symbol_deriv2(double k) {
    const double a = std::fabs(k);
    if (a < 0.05) {
        // Taylor series of d^2/dk^2 sqrt(tanh k / k) through k^8.
        const double k2 = a * a;
        return -1.0 / 3.0 +
               k2 * (19.0 / 30.0 +
                     k2 * (-275.0 / 504.0 + k2 * (11813.0 / 32400.0 - k2 * 2117.0 / 9856.0)));
    }
    // m = sqrt(f), f = tanh(k)/k.
    const double t = std::tanh(a);
    const double s2 = 1.0 - t * t;
    const double f = t / a;
    const double f1 = s2 / a - t / (a * a);
    const double f2 = -2.0 * s2 * t / a - 2.0 * s2 / (a * a) + 2.0 * t / (a * a * a);
    const double r = std::sqrt(f);
    return f2 / (2.0 * r) - f1 * f1 / (4.0 * f * r);
}

Multiplier whitham_multiplier(double k_star, double k_max) {
    Multiplier m;
    m.name = "whitham";
    m.eval = whitham_symbol;
    m.deriv2 = whitham_symbol_deriv2;
    m.k_star = k_star;
    m.k_max = k_max;
    return m;
}

Multiplier kdv_multiplier(double k_star, double k_max) {
    Multiplier m;
    m.name = "kdv";
    m.eval = [](double k) { return 1.0 - 0.5 * k * k; };
    m.deriv2 = [](double) { return -1.0; };
    m.k_star = k_star;
    m.k_max = k_max;
    return m;
}

Multiplier convex_multiplier(double k_star, double k_max) {
    Multiplier m;
    m.name = "convex";
    m.eval = [](double k) { return 1.0 + k * k; };
    m.deriv2 = [](double) { return 2.0; };
    m.k_star = k_star;
    m.k_max = k_max;
    return m;
}

Nonlinearity quadratic_nonlinearity(double delta_star) {
    Nonlinearity n;
    n.name = "quadratic";
    n.eval = [](double u) { return u * u; };
    n.deriv1 = [](double u) { return 2.0 * u; };
    n.deriv2 = [](double) { return 2.0; };
    n.delta_star = delta_star;
    return n;
}

Nonlinearity quadratic_cubic_nonlinearity(double delta_star) {
    Nonlinearity n;
    n.name = "quadratic_cubic";
    n.eval = [](double u) { return u * u * (1.0 + u); };
    n.deriv1 = [](double u) { return u * (2.0 + 3.0 * u); };
    n.deriv2 = [](double u) { return 2.0 + 6.0 * u; };
    n.delta_star = delta_star;
    return n;
}

SymbolModel whitham_model() { return SymbolModel(whitham_multiplier(), quadratic_nonlinearity()); }

SymbolModel kdv_model() { return SymbolModel(kdv_multiplier(), quadratic_nonlinearity()); }

bool VerificationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

VerificationReport verify_model(const SymbolModel& model, int samples) {
    if (samples < 100) throw InputError("verify_model needs at least 100 samples");

    const Multiplier& mult = model.multiplier();
    const Nonlinearity& nl = model.nonlinearity();
    VerificationReport r;
    r.samples = samples;
    r.mpp0 = model.mpp0();
    r.npp0 = model.npp0();
    r.gamma = model.gamma();

    // Nonlinearity: n(0) = n'(0) = 0, n''(0) > 0, derivative consistency.
    const double n0 = checked(nl.value(0.0), "n", 0.0);
    const double n1 = checked(nl.first_derivative(0.0), "n'", 0.0);
    r.checks.push_back({"n(0)=0", std::fabs(n0) <= kZeroTol, n0, "|n(0)| <= 1e-12"});
    r.checks.push_back({"n'(0)=0", std::fabs(n1) <= kZeroTol, n1, "|n'(0)| <= 1e-12"});
    r.checks.push_back({"n''(0)>0", r.npp0 > 0.0, r.npp0, ""});

    // Sample strictly inside the validity radius; beyond |u| ~ 1 polynomial
    // nonlinearities lose finite-difference accuracy for no added insight.
    const double radius = 0.9 * std::min(nl.delta_star, 1.0);
    r.n_sample_radius = radius;
    double worst_rel = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double u = -radius + 2.0 * radius * i / (samples - 1);
        const ScalarFn d1 = [&nl](double v) { return nl.first_derivative(v); };
        const double fd1 = centered_first(nl.eval, u);
        const double fd2 = centered_first(d1, u);
        const double a1 = checked(nl.first_derivative(u), "n'", u);
        const double a2 = checked(nl.second_derivative(u), "n''", u);
        worst_rel = std::max(worst_rel, std::fabs(a1 - fd1) / (1.0 + std::fabs(a1)));
        worst_rel = std::max(worst_rel, std::fabs(a2 - fd2) / (1.0 + std::fabs(a2)));
    }
    r.checks.push_back({"n derivatives consistent", worst_rel <= 1e-6, worst_rel,
                        "sampled on (-" + fmt(radius) + ", " + fmt(radius) + ")"});

    // Multiplier.
    double worst_even = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double k = mult.k_max * i / (samples - 1);
        const double mp = checked(mult.value(k), "m", k);
        const double mm = checked(mult.value(-k), "m", -k);
        worst_even = std::max(worst_even, std::fabs(mp - mm) / (1.0 + std::fabs(mp)));
    }
    r.checks.push_back({"m even", worst_even <= 1e-12, worst_even,
                        "sampled on [0, " + fmt(mult.k_max) + "]"});

    r.m0 = checked(mult.value(0.0), "m", 0.0);
    r.checks.push_back({"m(0)>0", r.m0 > 0.0, r.m0, ""});

    r.m2 = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        const double k = -mult.k_star + 2.0 * mult.k_star * i / (samples - 1);
        r.m2 = std::max(r.m2, checked(mult.second_derivative(k), "m''", k));
    }
    r.checks.push_back({"m2<0", r.m2 < 0.0, r.m2,
                        "max m'' over |k| <= " + fmt(mult.k_star)});

    r.m1 = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        const double k = mult.k_star + (mult.k_max - mult.k_star) * i / (samples - 1);
        r.m1 = std::max(r.m1, checked(mult.value(k), "m", k));
    }
    r.tail_path = mult.monotone_tail ? "sampled+declared_monotone" : "sampled";
    r.checks.push_back({"m1<m(0)", r.m1 < r.m0, r.m1,
                        "sup m over [" + fmt(mult.k_star) + ", " + fmt(mult.k_max) + "], " +
                            r.tail_path});

    r.regularity = mult.tabulated ? "assumed (tabulated)" : "analytic or finite-difference";
    r.checks.push_back({"gamma>0", std::isfinite(r.gamma) && r.gamma > 0.0, r.gamma,
                        "gamma = -n''(0)/m''(0)"});
    return r;
}

double gamma_of(const SymbolModel& model) {
    if (!(model.mpp0() < 0.0))
        throw NumericalError("gamma undefined: m''(0) = " + fmt(model.mpp0()) + " is not negative");
    return -model.npp0() / model.mpp0();
}

double nu_of_eps(const SymbolModel& model, double eps) {
    return model.m0() - 0.5 * model.mpp0() * eps * eps;
}

namespace {

double amplitude_guard(const SymbolModel& model, double eps, std::span<const double> W) {
    double amax = 0.0;
    for (double w : W) amax = std::max(amax, std::fabs(w));
    const double scaled = eps * eps * amax;
    if (!(scaled < model.nonlinearity().delta_star)) {
        std::ostringstream os;
        os << "amplitude outside validity radius: eps^2 max|W| = " << scaled
           << " >= delta_star = " << model.nonlinearity().delta_star;
        throw InputError(os.str());
    }
    return scaled;
}

} // namespace

std::vector<double> g_eps(const SymbolModel& model, double eps, std::span<const double> W) {
    const double scaled = amplitude_guard(model, eps, W);
    std::vector<double> out(W.size());
    if (scaled < 1e-5 * model.nonlinearity().delta_star) {
        const double c = 0.5 * model.npp0();
        // c * (W * W): for n = u^2, c == 1 and this is the exact square.
        for (std::size_t i = 0; i < W.size(); ++i) out[i] = c * (W[i] * W[i]);
        return out;
    }
    const double e2 = eps * eps;
    const double inv4 = 1.0 / (e2 * e2);
    for (std::size_t i = 0; i < W.size(); ++i) out[i] = inv4 * model.nonlinearity().value(e2 * W[i]);
    return out;
}

std::vector<double> linearized_potential(const SymbolModel& model, double eps,
                                         std::span<const double> W) {
    const double scaled = amplitude_guard(model, eps, W);
    std::vector<double> out(W.size());
    if (scaled < 1e-5 * model.nonlinearity().delta_star) {
        for (std::size_t i = 0; i < W.size(); ++i) out[i] = model.npp0() * W[i];
        return out;
    }
    const double e2 = eps * eps;
    for (std::size_t i = 0; i < W.size(); ++i)
        out[i] = model.nonlinearity().first_derivative(e2 * W[i]) / e2;
    return out;
}

} // namespace whitwave
