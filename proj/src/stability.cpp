#include "whitwave/stability.hpp"

#include "whitwave/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace whitwave {

// --- LinearizedOp ---------------------------------------------------------

Eigen::MatrixXd LinearizedOp::even_block() const {
    const int h = grid.size() / 2;
    return matrix.topLeftCorner(h + 1, h + 1);
}

Eigen::MatrixXd LinearizedOp::odd_block() const {
    const int h = grid.size() / 2;
    return matrix.bottomRightCorner(h - 1, h - 1);
}

double LinearizedOp::offblock_norm() const {
    const int h = grid.size() / 2;
    return matrix.topRightCorner(h + 1, h - 1).cwiseAbs().maxCoeff();
}

double LinearizedOp::symmetry_defect() const {
    const double scale = matrix.cwiseAbs().maxCoeff();
    return (matrix - matrix.transpose()).cwiseAbs().maxCoeff() / scale;
}

SpectralField LinearizedOp::apply(const SpectralField& f) const {
    return trig::from_coordinates(grid, matrix * trig::coordinates(f));
}

LinearizedOp assemble_linearized(const SymbolModel& model, const WaveSolution& solution) {
    const PeriodicGrid& grid = solution.W.grid();
    const double eps = solution.eps;
    const double inv2 = 1.0 / (eps * eps);
    const SpectralField V(grid, linearized_potential(model, eps, solution.W.values()));

    Eigen::MatrixXd M = -trig::potential_matrix(V);
    const Eigen::VectorXd K = trig::basis_wavenumbers(grid);
    for (Eigen::Index i = 0; i < K.size(); ++i) {
        const double m = model.multiplier().value(eps * K(i));
        if (!std::isfinite(m)) {
            std::ostringstream os;
            os << "symbol is not finite at K = " << K(i) << " (eps K = " << eps * K(i) << ")";
            throw NumericalError(os.str());
        }
        M(i, i) += inv2 * (solution.nu - m);
    }
    return LinearizedOp{grid, eps, std::move(M)};
}

// --- eigen structure ------------------------------------------------------

EigenStructure eigen_structure(const LinearizedOp& op, int count) {
    const int n = op.grid.size();
    const int h = n / 2;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> even(op.even_block());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> odd(op.odd_block());
    if (even.info() != Eigen::Success || odd.info() != Eigen::Success)
        throw NumericalError("symmetric eigensolver did not converge");

    struct Entry {
        double value;
        bool is_even;
        Eigen::Index index;
    };
    std::vector<Entry> all;
    all.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < even.eigenvalues().size(); ++i) all.push_back({even.eigenvalues()(i), true, i});
    for (Eigen::Index i = 0; i < odd.eigenvalues().size(); ++i) all.push_back({odd.eigenvalues()(i), false, i});
    std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.value < b.value; });

    EigenStructure out;
    out.op_norm = std::max(std::fabs(all.front().value), std::fabs(all.back().value));
    count = std::min<int>(count, static_cast<int>(all.size()));
    out.eigenvectors = Eigen::MatrixXd::Zero(n, count);
    for (int c = 0; c < count; ++c) {
        const Entry& e = all[static_cast<std::size_t>(c)];
        out.eigenvalues.push_back(e.value);
        out.even.push_back(e.is_even);
        if (e.is_even) out.eigenvectors.col(c).head(h + 1) = even.eigenvectors().col(e.index);
        else out.eigenvectors.col(c).tail(h - 1) = odd.eigenvectors().col(e.index);
    }
    return out;
}

// --- Vakhitov-Kolokolov -----------------------------------------------------

VkResult vk_quantity(const LinearizedOp& op, const WaveSolution& solution) {
    const Eigen::MatrixXd A = op.even_block();
    const Eigen::VectorXd rhs = trig::cosine_coordinates(solution.W);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    if (lu.rcond() < 1e-13) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
        std::ostringstream os;
        os << "even-block numerically singular (smallest singular value " << svd.singularValues().minCoeff()
           << ")";
        throw NumericalError(os.str());
    }
    const Eigen::VectorXd u = lu.solve(rhs);
    const double dx = op.grid.spacing();
    VkResult r;
    r.scaled = dx * u.dot(rhs);
    r.value = r.scaled / (op.eps * op.eps);
    r.residual = std::sqrt(dx) * (A * u - rhs).norm();
    return r;
}

VkResult vk_quantity(const SymbolModel& model, const WaveSolution& solution) {
    return vk_quantity(assemble_linearized(model, solution), solution);
}

double vk_asymptote(const SymbolModel& model, const WaveSolution& solution) {
    const double gamma = gamma_of(model);
    const double limit = solution.mode == WaveMode::Solitary
                             ? limit_vk_closed_form(gamma)
                             : limit_vk_numeric(solve_cnoidal(gamma, solution.W.grid()));
    return -(2.0 / model.mpp0()) * limit / (solution.eps * solution.eps);
}

// --- resolvent asymptotics -----------------------------------------------

double resolvent_asymptotic_check(const SymbolModel& model, const WaveSolution& solution, double mu,
                                  std::uint64_t seed, int batch) {
    if (!(mu > 0.0)) throw InputError("mu must be positive");
    const PeriodicGrid& grid = solution.W.grid();
    const int n = grid.size();

    Eigen::MatrixXd A = assemble_linearized(model, solution).matrix;
    A.diagonal().array() += mu;
    const LimitProfile limit = limit_profile_for(model, solution.mode, grid);
    Eigen::MatrixXd B = (-0.5 * model.mpp0()) * limit_operator(limit).matrix;
    B.diagonal().array() += mu;

    Eigen::LLT<Eigen::MatrixXd> la(A);
    Eigen::LLT<Eigen::MatrixXd> lb(B);
    if (la.info() != Eigen::Success || lb.info() != Eigen::Success) {
        std::ostringstream os;
        os << "non-positive-definite shift: mu = " << mu << " does not make both operators positive";
        throw NumericalError(os.str());
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const double dx = grid.spacing();
    double worst = 0.0;
    for (int s = 0; s < batch; ++s) {
        Eigen::VectorXd f(n);
        for (int i = 0; i < n; ++i) f(i) = normal(rng);
        f /= std::sqrt(dx) * f.norm();  // unit L2 norm
        const Eigen::VectorXd diff = la.solve(f) - lb.solve(f);
        worst = std::max(worst, std::sqrt(dx) * diff.norm());
    }
    return worst;
}

// --- verdict --------------------------------------------------------------

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::SpectrallyStable: return "spectrally_stable";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::IndexViolation: return "index_violation";
    }
    return "inconclusive";
}

StabilityReport index_verdict(const IndexInputs& in) {
    StabilityReport r;
    r.eps = in.eps;
    r.eigenvalues = in.eigenvalues;
    r.morse_index = in.morse_index;
    r.kernel_dim = in.kernel_dim;
    r.kernel_alignment = in.kernel_alignment;
    r.vk_value = in.vk_value;

    const int k0 = in.vk_value < 0.0 ? 1 : 0;
    r.k_unstable_bound = std::max(0, in.morse_index - k0);

    std::ostringstream diag;
    if (in.morse_index != 1 || in.kernel_dim != 1) {
        r.verdict = Verdict::IndexViolation;
        diag << "expected one negative eigenvalue and a one-dimensional kernel, found morse = "
             << in.morse_index << ", kernel = " << in.kernel_dim
             << "; eps may be too large or the model violates the hypotheses";
    } else if (in.kernel_alignment > 0.999 && in.vk_value < 0.0) {
        r.verdict = Verdict::SpectrallyStable;
        diag << "n^- = 1, kernel spanned by W', <Lc^-1 W, W> < 0";
    } else {
        r.verdict = Verdict::Inconclusive;
        if (!(in.kernel_alignment > 0.999)) diag << "kernel vector alignment with W' is " << in.kernel_alignment << ". ";
        if (!(in.vk_value < 0.0)) diag << "VK quantity is not negative; the index count gives no certificate.";
    }
    r.diagnostics = diag.str();
    return r;
}

// --- full spectrum ----------------------------------------------------------

FullSpectrum product_spectrum(const PeriodicGrid& grid, const Eigen::MatrixXd& op, Subspace subspace) {
    Eigen::MatrixXd A = trig::derivative_matrix(grid) * op;
    if (subspace == Subspace::ZeroMean) {
        const Eigen::Index n = A.rows();
        A = A.bottomRightCorner(n - 1, n - 1).eval();
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    if (es.info() != Eigen::Success) throw NumericalError("nonsymmetric eigensolver did not converge");

    FullSpectrum out;
    const auto& ev = es.eigenvalues();
    out.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    out.max_real = -std::numeric_limits<double>::infinity();
    for (const auto& l : out.eigenvalues) out.max_real = std::max(out.max_real, l.real());

    auto nearest = [&out](std::complex<double> target) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& l : out.eigenvalues) best = std::min(best, std::abs(l - target));
        return best;
    };
    for (const auto& l : out.eigenvalues) {
        const double scale = std::max(1.0, std::abs(l));
        out.quadruple_defect = std::max(out.quadruple_defect, nearest(-l) / scale);
        out.quadruple_defect = std::max(out.quadruple_defect, nearest(std::conj(l)) / scale);
    }
    return out;
}

FullSpectrum full_spectrum_check(const SymbolModel& model, const WaveSolution& solution, Subspace subspace) {
    const LinearizedOp op = assemble_linearized(model, solution);
    return product_spectrum(op.grid, op.matrix, subspace);
}

// --- full analysis ----------------------------------------------------------

StabilityReport analyze_stability(const SymbolModel& model, const WaveSolution& solution,
                                  const StabilityOptions& options) {
    const LinearizedOp op = assemble_linearized(model, solution);
    const EigenStructure es = eigen_structure(op, options.eigen_count);
    const double eps = solution.eps;

    const double kernel_tol =
        std::max(1e-6, 10.0 * solution.newton_tol * es.op_norm / (eps * eps));
    IndexInputs in;
    in.eps = eps;
    in.eigenvalues = es.eigenvalues;

    const SpectralField dW = ddx(solution.W);
    const Eigen::VectorXd dWc = trig::coordinates(dW);
    for (std::size_t i = 0; i < es.eigenvalues.size(); ++i) {
        const double l = es.eigenvalues[i];
        if (l < -1e-6) {
            ++in.morse_index;
        } else if (l <= kernel_tol) {
            ++in.kernel_dim;
            const double c = std::fabs(es.eigenvectors.col(static_cast<Eigen::Index>(i)).dot(dWc)) / dWc.norm();
            in.kernel_alignment = std::max(in.kernel_alignment, c);
        }
    }

    const VkResult vk = vk_quantity(op, solution);
    in.vk_value = vk.value;

    StabilityReport r = index_verdict(in);
    r.kernel_tolerance = kernel_tol;
    r.vk_scaled = vk.scaled;
    r.vk_residual = vk.residual;
    r.vk_asymptote = vk_asymptote(model, solution);
    r.symmetry_defect = op.symmetry_defect();
    r.parity_offblock = op.offblock_norm();
    r.kernel_residual = l2_norm(op.apply(dW)) / l2_norm(dW);
    if (options.resolvent_check) r.resolvent_gap = resolvent_asymptotic_check(model, solution, options.mu, options.seed);
    if (options.full_spectrum) {
        r.full_spectrum = product_spectrum(op.grid, op.matrix,
                                           solution.mode == WaveMode::Periodic ? Subspace::ZeroMean : Subspace::Whole);
    }
    return r;
}

} // namespace whitwave
