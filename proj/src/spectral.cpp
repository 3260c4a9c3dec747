#include "whitwave/spectral.hpp"

#include "whitwave/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace whitwave {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface
// is. Plans are created once per size under a lock and never destroyed.
struct PlanPair {
    fftw_plan r2c;
    fftw_plan c2r;
};

const PlanPair& plans_for(int n) {
    static std::mutex mutex;
    static std::map<int, PlanPair> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<double> real(static_cast<std::size_t>(n));
    std::vector<std::complex<double>> spec(static_cast<std::size_t>(n / 2 + 1));
    auto* cplx = reinterpret_cast<fftw_complex*>(spec.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair p{fftw_plan_dft_r2c_1d(n, real.data(), cplx, flags),
               fftw_plan_dft_c2r_1d(n, cplx, real.data(), flags | FFTW_DESTROY_INPUT)};
    return cache.emplace(n, p).first->second;
}

Coefficients forward(std::span<const double> values) {
    const int n = static_cast<int>(values.size());
    std::vector<double> in(values.begin(), values.end());
    Coefficients out(static_cast<std::size_t>(n / 2 + 1));
    fftw_execute_dft_r2c(plans_for(n).r2c, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / n;
    for (std::size_t k = 0; k < out.size(); ++k) {
        // exp(-i K_k x_j) = (-1)^k exp(-2 pi i jk/N) because x_0 = -P.
        out[k] *= (k % 2 == 0) ? scale : -scale;
    }
    return out;
}

std::vector<double> inverse(const Coefficients& half, int n) {
    Coefficients buf(half);
    for (std::size_t k = 1; k < buf.size(); k += 2) buf[k] = -buf[k];
    buf.front().imag(0.0);
    buf.back().imag(0.0);
    std::vector<double> out(static_cast<std::size_t>(n));
    fftw_execute_dft_c2r(plans_for(n).c2r, reinterpret_cast<fftw_complex*>(buf.data()), out.data());
    return out;
}

void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b, const char* what) {
    if (!(a == b)) throw InputError(std::string(what) + ": grid mismatch");
}

SpectralField map_coefficients(const SpectralField& f,
                               const std::function<std::complex<double>(int, double)>& fn) {
    const auto& c = f.coefficients();
    Coefficients out(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) {
        const int jj = static_cast<int>(j);
        out[j] = fn(jj, f.grid().wavenumber(jj)) * c[j];
    }
    return SpectralField::from_coefficients(f.grid(), out);
}

} // namespace

// --- PeriodicGrid ---------------------------------------------------------

PeriodicGrid::PeriodicGrid(double half_period, int n_points) : half_period_(half_period), n_(n_points) {
    if (!(half_period > 0.0) || !std::isfinite(half_period))
        throw InputError("grid half-period must be positive and finite");
    if (n_points < 16 || n_points % 2 != 0)
        throw InputError("grid size must be even and at least 16, got " + std::to_string(n_points));
}

std::vector<double> PeriodicGrid::nodes() const {
    std::vector<double> x(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) x[static_cast<std::size_t>(j)] = node(j);
    return x;
}

double PeriodicGrid::wavenumber(int j) const { return j * std::numbers::pi / half_period_; }

// --- SpectralField --------------------------------------------------------

SpectralField::SpectralField(PeriodicGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != grid_.size())
        throw InputError("field has " + std::to_string(values_.size()) + " values for a grid of " +
                         std::to_string(grid_.size()));
}

SpectralField SpectralField::zeros(const PeriodicGrid& grid) {
    return SpectralField(grid, std::vector<double>(static_cast<std::size_t>(grid.size()), 0.0));
}

SpectralField SpectralField::from_function(const PeriodicGrid& grid, const std::function<double(double)>& f) {
    std::vector<double> v(static_cast<std::size_t>(grid.size()));
    for (int j = 0; j < grid.size(); ++j) v[static_cast<std::size_t>(j)] = f(grid.node(j));
    return SpectralField(grid, std::move(v));
}

SpectralField SpectralField::from_coefficients(const PeriodicGrid& grid, const Coefficients& half) {
    if (static_cast<int>(half.size()) != grid.mode_count())
        throw InputError("coefficient array does not match grid");
    SpectralField f(grid, inverse(half, grid.size()));
    Coefficients cached(half);
    cached.front().imag(0.0);
    cached.back().imag(0.0);
    f.coeffs_ = std::move(cached);
    return f;
}

void SpectralField::set_values(std::vector<double> values) {
    if (static_cast<int>(values.size()) != grid_.size()) throw InputError("set_values: size mismatch");
    values_ = std::move(values);
    coeffs_.reset();
}

const Coefficients& SpectralField::coefficients() const {
    if (!coeffs_) coeffs_ = forward(values_);
    return *coeffs_;
}

std::complex<double> SpectralField::coefficient(int j) const {
    const int half = grid_.size() / 2;
    if (j <= -half || j > half) throw InputError("mode index outside the symmetric set");
    const auto& c = coefficients();
    return j >= 0 ? c[static_cast<std::size_t>(j)] : std::conj(c[static_cast<std::size_t>(-j)]);
}

double SpectralField::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::fabs(v));
    return m;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    require_same_grid(grid_, other.grid_, "field addition");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    coeffs_.reset();
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
    require_same_grid(grid_, other.grid_, "field subtraction");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    coeffs_.reset();
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (double& v : values_) v *= s;
    coeffs_.reset();
    return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

SpectralField pointwise_product(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a.grid(), b.grid(), "pointwise product");
    std::vector<double> v(static_cast<std::size_t>(a.size()));
    for (int j = 0; j < a.size(); ++j) v[static_cast<std::size_t>(j)] = a[j] * b[j];
    return SpectralField(a.grid(), std::move(v));
}

// --- multipliers ----------------------------------------------------------

MultiplierOp MultiplierOp::from_symbol(const PeriodicGrid& grid, const std::function<double(double)>& m,
                                       std::string description) {
    MultiplierOp op{grid, std::vector<double>(static_cast<std::size_t>(grid.mode_count())),
                    std::move(description)};
    for (int j = 0; j < grid.mode_count(); ++j) op.symbol[static_cast<std::size_t>(j)] = m(grid.wavenumber(j));
    return op;
}

SpectralField apply_multiplier(const MultiplierOp& op, const SpectralField& f) {
    require_same_grid(op.grid, f.grid(), "apply_multiplier");
    return map_coefficients(f, [&op](int j, double) { return op.symbol[static_cast<std::size_t>(j)]; });
}

MultiplierOp resolvent_R_eps(const SymbolModel& model, double eps, const PeriodicGrid& grid) {
    if (!(eps > 0.0)) throw InputError("resolvent needs eps > 0");
    const double nu = nu_of_eps(model, eps);
    const double e2 = eps * eps;
    MultiplierOp op{grid, std::vector<double>(static_cast<std::size_t>(grid.mode_count())),
                    "eps^2/(nu_eps - m(eps K))"};
    for (int j = 0; j < grid.mode_count(); ++j) {
        const double K = grid.wavenumber(j);
        const double denom = nu - model.multiplier().value(eps * K);
        if (!(denom > 1e-14)) {
            std::ostringstream os;
            os << "resolvent denominator vanishes: nu_eps - m(eps K) = " << denom << " at K = " << K
               << " (eps = " << eps << ")";
            throw NumericalError(os.str());
        }
        op.symbol[static_cast<std::size_t>(j)] = e2 / denom;
    }
    return op;
}

double hinge_gap(const SymbolModel& model, double eps, const PeriodicGrid& grid) {
    const MultiplierOp R = resolvent_R_eps(model, eps, grid);
    const double half_mpp0 = 0.5 * model.mpp0();
    double gap = 0.0;
    for (int j = 0; j < grid.mode_count(); ++j) {
        const double K = grid.wavenumber(j);
        gap = std::max(gap, std::fabs(R.symbol[static_cast<std::size_t>(j)] + 1.0 / (half_mpp0 * (1.0 + K * K))));
    }
    return gap;
}

SpectralField helmholtz_inverse(const SpectralField& f) {
    return map_coefficients(f, [](int, double K) { return 1.0 / (1.0 + K * K); });
}

SpectralField helmholtz(const SpectralField& f) {
    return map_coefficients(f, [](int, double K) { return 1.0 + K * K; });
}

SpectralField ddx(const SpectralField& f) {
    const int nyquist = f.size() / 2;
    return map_coefficients(f, [nyquist](int j, double K) {
        return j == nyquist ? std::complex<double>(0.0) : std::complex<double>(0.0, K);
    });
}

// --- norms ----------------------------------------------------------------

double l2_inner(const SpectralField& f, const SpectralField& g) {
    require_same_grid(f.grid(), g.grid(), "l2_inner");
    double s = 0.0;
    for (int j = 0; j < f.size(); ++j) s += f[j] * g[j];
    return s * f.grid().spacing();
}

double l2_norm(const SpectralField& f) { return std::sqrt(l2_inner(f, f)); }

double h1_norm(const SpectralField& f) {
    const SpectralField df = ddx(f);
    return std::sqrt(l2_inner(f, f) + l2_inner(df, df));
}

double sup_norm(const SpectralField& f) { return f.max_abs(); }

SpectralField even_projection(const SpectralField& f) {
    std::vector<double> v(static_cast<std::size_t>(f.size()));
    for (int j = 0; j < f.size(); ++j) v[static_cast<std::size_t>(j)] = 0.5 * (f[j] + f[f.grid().mirror(j)]);
    return SpectralField(f.grid(), std::move(v));
}

SpectralField odd_projection(const SpectralField& f) {
    std::vector<double> v(static_cast<std::size_t>(f.size()));
    for (int j = 0; j < f.size(); ++j) v[static_cast<std::size_t>(j)] = 0.5 * (f[j] - f[f.grid().mirror(j)]);
    return SpectralField(f.grid(), std::move(v));
}

double parity_defect(const SpectralField& f) {
    double d = 0.0;
    for (int j = 0; j < f.size(); ++j) d = std::max(d, 0.5 * std::fabs(f[j] - f[f.grid().mirror(j)]));
    return d;
}

// --- trigonometric basis --------------------------------------------------

namespace trig {

namespace {

double weight(int a, int n) {
    return (a == 0 || a == n / 2) ? 1.0 / std::sqrt(double(n)) : std::sqrt(2.0 / n);
}

// Discrete coefficient for any integer mode index, using N-periodicity.
struct ModeTable {
    const Coefficients& half;
    int n;
    std::complex<double> operator()(int m) const {
        m %= n;
        if (m < 0) m += n;
        if (m <= n / 2) return half[static_cast<std::size_t>(m)];
        return std::conj(half[static_cast<std::size_t>(n - m)]);
    }
};

} // namespace

Eigen::VectorXd basis_wavenumbers(const PeriodicGrid& grid) {
    const int n = grid.size();
    Eigen::VectorXd K(n);
    for (int a = 0; a <= n / 2; ++a) K(a) = grid.wavenumber(a);
    for (int b = 1; b < n / 2; ++b) K(n / 2 + b) = grid.wavenumber(b);
    return K;
}

Eigen::VectorXd coordinates(const SpectralField& f) {
    const int n = f.size();
    const auto& c = f.coefficients();
    Eigen::VectorXd out(n);
    for (int a = 0; a <= n / 2; ++a) out(a) = weight(a, n) * n * c[static_cast<std::size_t>(a)].real();
    for (int b = 1; b < n / 2; ++b) out(n / 2 + b) = -weight(b, n) * n * c[static_cast<std::size_t>(b)].imag();
    return out;
}

SpectralField from_coordinates(const PeriodicGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& c) {
    const int n = grid.size();
    if (c.size() != n) throw InputError("trig coordinates: length mismatch");
    Coefficients half(static_cast<std::size_t>(n / 2 + 1));
    half[0] = c(0) * weight(0, n);
    half[static_cast<std::size_t>(n / 2)] = c(n / 2) * weight(n / 2, n);
    for (int a = 1; a < n / 2; ++a) {
        const double w = 0.5 * weight(a, n);
        half[static_cast<std::size_t>(a)] = {c(a) * w, -c(n / 2 + a) * w};
    }
    return SpectralField::from_coefficients(grid, half);
}

Eigen::VectorXd cosine_coordinates(const SpectralField& f) {
    const int n = f.size();
    const auto& c = f.coefficients();
    Eigen::VectorXd out(n / 2 + 1);
    for (int a = 0; a <= n / 2; ++a) out(a) = weight(a, n) * n * c[static_cast<std::size_t>(a)].real();
    return out;
}

SpectralField from_cosine_coordinates(const PeriodicGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& c) {
    const int n = grid.size();
    if (c.size() != n / 2 + 1) throw InputError("cosine coordinates: length mismatch");
    Coefficients half(static_cast<std::size_t>(n / 2 + 1));
    for (int a = 0; a <= n / 2; ++a) {
        const double w = (a == 0 || a == n / 2) ? weight(a, n) : 0.5 * weight(a, n);
        half[static_cast<std::size_t>(a)] = c(a) * w;
    }
    return SpectralField::from_coefficients(grid, half);
}

Eigen::MatrixXd potential_matrix(const SpectralField& V) {
    const int n = V.size();
    const int h = n / 2;
    const ModeTable v{V.coefficients(), n};
    Eigen::MatrixXd M(n, n);
    const double s = 0.5 * n;
    for (int a = 0; a <= h; ++a) {
        for (int b = 0; b <= h; ++b) {
            M(a, b) = s * (v(a - b).real() + v(a + b).real()) * weight(a, n) * weight(b, n);
        }
    }
    for (int a = 1; a < h; ++a) {
        for (int b = 1; b < h; ++b) {
            M(h + a, h + b) = s * (v(a - b).real() - v(a + b).real()) * weight(a, n) * weight(b, n);
        }
    }
    // sum V cos(K_a x) sin(K_b x) = (N/2) [-Im v(a+b) - Im v(b-a)]
    for (int a = 0; a <= h; ++a) {
        for (int b = 1; b < h; ++b) {
            const double val = s * (-v(a + b).imag() - v(b - a).imag()) * weight(a, n) * weight(b, n);
            M(a, h + b) = val;
            M(h + b, a) = val;
        }
    }
    return M;
}

Eigen::MatrixXd potential_cosine_block(const SpectralField& V) {
    const int n = V.size();
    const int h = n / 2;
    const ModeTable v{V.coefficients(), n};
    Eigen::MatrixXd M(h + 1, h + 1);
    const double s = 0.5 * n;
    for (int a = 0; a <= h; ++a)
        for (int b = 0; b <= h; ++b)
            M(a, b) = s * (v(a - b).real() + v(a + b).real()) * weight(a, n) * weight(b, n);
    return M;
}

Eigen::MatrixXd derivative_matrix(const PeriodicGrid& grid) {
    const int n = grid.size();
    const int h = n / 2;
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (int a = 1; a < h; ++a) {
        const double K = grid.wavenumber(a);
        D(h + a, a) = -K;  // cos -> -K sin
        D(a, h + a) = K;   // sin -> K cos
    }
    return D;
}

} // namespace trig

} // namespace whitwave
