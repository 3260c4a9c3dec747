#include "whitwave/kdv.hpp"

#include "whitwave/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace whitwave {

std::string to_string(ProfileKind kind) { return kind == ProfileKind::Solitary ? "solitary" : "cnoidal"; }

double limit_residual(const SpectralField& W, double gamma) {
    // -W'' + W = (1 - d^2) W
    const SpectralField lin = helmholtz(W);
    double r = 0.0;
    for (int j = 0; j < W.size(); ++j) r = std::max(r, std::fabs(lin[j] - gamma * W[j] * W[j]));
    return r;
}

namespace {

void require_gamma(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InputError("gamma must be positive");
}

double sech2(double y) {
    const double c = std::cosh(y);
    return 1.0 / (c * c);
}

} // namespace

LimitProfile sigma(double gamma, const PeriodicGrid& grid) {
    require_gamma(gamma);
    const double amp = 1.5 / gamma;
    SpectralField f = SpectralField::from_function(grid, [amp](double x) { return amp * sech2(0.5 * x); });
    const double res = limit_residual(f, gamma);
    return LimitProfile{ProfileKind::Solitary, gamma, std::move(f), res, 0};
}

SpectralField sigma_prime(double gamma, const PeriodicGrid& grid) {
    require_gamma(gamma);
    const double amp = 1.5 / gamma;
    return SpectralField::from_function(grid, [amp](double x) {
        return -amp * sech2(0.5 * x) * std::tanh(0.5 * x);
    });
}

LimitProfile solve_cnoidal(double gamma, const PeriodicGrid& grid, double tol, int max_iter) {
    require_gamma(gamma);
    const double P = grid.half_period();
    const double amp = 1.5 / gamma;
    SpectralField W = SpectralField::from_function(grid, [amp, P](double x) {
        double s = 0.0;
        for (int n = -2; n <= 2; ++n) s += amp * sech2(0.5 * (x + 2.0 * P * n));
        return s;
    });

    const int m = grid.mode_count();
    Eigen::VectorXd hinv(m);
    for (int a = 0; a < m; ++a) {
        const double K = grid.wavenumber(a);
        hinv(a) = 1.0 / (1.0 + K * K);
    }

    auto fixed_point_residual = [&](const SpectralField& w) {
        SpectralField sq = pointwise_product(w, w);
        return w - gamma * helmholtz_inverse(sq);
    };

    double res = limit_residual(W, gamma);
    int it = 0;
    while (res > tol) {
        if (it >= max_iter) {
            std::ostringstream os;
            os << "Newton diverged for the cnoidal profile at P = " << P << " (residual " << res
               << " after " << it << " iterations); P is likely below the working range";
            throw NumericalError(os.str());
        }
        const Eigen::VectorXd F = trig::cosine_coordinates(fixed_point_residual(W));
        Eigen::MatrixXd J = -2.0 * gamma * (hinv.asDiagonal() * trig::potential_cosine_block(W));
        J.diagonal().array() += 1.0;
        const Eigen::VectorXd step = J.partialPivLu().solve(-F);
        W += trig::from_cosine_coordinates(grid, step);
        res = limit_residual(W, gamma);
        ++it;
        if (!std::isfinite(res) || res > 1e6) {
            std::ostringstream os;
            os << "Newton diverged for the cnoidal profile at P = " << P;
            throw NumericalError(os.str());
        }
    }

    W = even_projection(W);
    const auto [lo, hi] = std::minmax_element(W.values().begin(), W.values().end());
    if (*hi - *lo < 1e-8 * (1.0 + std::fabs(*hi))) {
        std::ostringstream os;
        os << "cnoidal solve converged to the constant state " << *hi << " at P = " << P;
        throw NumericalError(os.str());
    }
    if (std::abs(W.coefficient(1)) < 1e-12 * W.max_abs()) {
        std::ostringstream os;
        os << "cnoidal solve lost the principal period 2P at P = " << P;
        throw NumericalError(os.str());
    }
    return LimitProfile{ProfileKind::Cnoidal, gamma, std::move(W), res, it};
}

Eigen::MatrixXd LimitOperator::even_block() const {
    const int h = grid.size() / 2;
    return matrix.topLeftCorner(h + 1, h + 1);
}

Eigen::MatrixXd LimitOperator::odd_block() const {
    const int h = grid.size() / 2;
    return matrix.bottomRightCorner(h - 1, h - 1);
}

SpectralField LimitOperator::apply(const SpectralField& f) const {
    return trig::from_coordinates(grid, matrix * trig::coordinates(f));
}

LimitOperator limit_operator(const LimitProfile& profile) {
    const PeriodicGrid& grid = profile.field.grid();
    const SpectralField V = 2.0 * profile.gamma * profile.field;
    Eigen::MatrixXd M = -trig::potential_matrix(V);
    const Eigen::VectorXd K = trig::basis_wavenumbers(grid);
    M.diagonal().array() += 1.0 + K.array().square();
    return LimitOperator{grid, std::move(M)};
}

LimitSpectrum limit_spectrum(const LimitOperator& op, int count, bool vectors) {
    const int n = op.grid.size();
    const int h = n / 2;
    const auto opts = vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> even(op.even_block(), opts);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> odd(op.odd_block(), opts);
    if (even.info() != Eigen::Success || odd.info() != Eigen::Success)
        throw NumericalError("symmetric eigensolver did not converge");

    struct Entry {
        double value;
        bool is_even;
        int index;
    };
    std::vector<Entry> all;
    for (int i = 0; i < even.eigenvalues().size(); ++i) all.push_back({even.eigenvalues()(i), true, i});
    for (int i = 0; i < odd.eigenvalues().size(); ++i) all.push_back({odd.eigenvalues()(i), false, i});
    std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.value < b.value; });
    count = std::min<int>(count, static_cast<int>(all.size()));

    LimitSpectrum out;
    if (vectors) out.eigenvectors = Eigen::MatrixXd::Zero(n, count);
    for (int c = 0; c < count; ++c) {
        const Entry& e = all[static_cast<std::size_t>(c)];
        out.eigenvalues.push_back(e.value);
        out.even.push_back(e.is_even);
        if (vectors) {
            if (e.is_even) out.eigenvectors.col(c).head(h + 1) = even.eigenvectors().col(e.index);
            else out.eigenvectors.col(c).tail(h - 1) = odd.eigenvectors().col(e.index);
        }
    }
    return out;
}

SpectralField linv_sigma_closed_form(double gamma, const PeriodicGrid& grid) {
    const LimitProfile s = sigma(gamma, grid);
    const SpectralField sp = sigma_prime(gamma, grid);
    std::vector<double> v(static_cast<std::size_t>(grid.size()));
    for (int j = 0; j < grid.size(); ++j)
        v[static_cast<std::size_t>(j)] = -0.5 * (2.0 * s.field[j] + grid.node(j) * sp[j]);
    return SpectralField(grid, std::move(v));
}

double limit_vk_numeric(const LimitProfile& profile) {
    const LimitOperator op = limit_operator(profile);
    const Eigen::VectorXd rhs = trig::cosine_coordinates(profile.field);
    const Eigen::VectorXd u = op.even_block().partialPivLu().solve(rhs);
    return profile.field.grid().spacing() * u.dot(rhs);
}

double limit_vk_closed_form(double gamma) {
    require_gamma(gamma);
    return -4.5 / (gamma * gamma);
}

Eigen::MatrixXd k_operator_even_block(const LimitProfile& profile) {
    const PeriodicGrid& grid = profile.field.grid();
    const int m = grid.mode_count();
    Eigen::VectorXd hinv(m);
    for (int a = 0; a < m; ++a) {
        const double K = grid.wavenumber(a);
        hinv(a) = 1.0 / (1.0 + K * K);
    }
    Eigen::MatrixXd Kop = -2.0 * profile.gamma * (hinv.asDiagonal() * trig::potential_cosine_block(profile.field));
    Kop.diagonal().array() += 1.0;
    return Kop;
}

SpectralField apply_k_operator(const LimitProfile& profile, const SpectralField& f) {
    return f - 2.0 * profile.gamma * helmholtz_inverse(pointwise_product(profile.field, f));
}

double k_operator_min_singular(const LimitProfile& profile) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(k_operator_even_block(profile));
    return svd.singularValues().minCoeff();
}

} // namespace whitwave
