#include "whitwave/solver.hpp"

#include "whitwave/errors.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/IterativeSolvers>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace whitwave {
class JacobianAction;
}

namespace Eigen::internal {
template <>
struct traits<whitwave::JacobianAction> : public traits<Eigen::SparseMatrix<double>> {};
} // namespace Eigen::internal

namespace whitwave {

// Matrix-free Jacobian v -> v - R_eps[V v] on cosine coordinates, for GMRES.
class JacobianAction : public Eigen::EigenBase<JacobianAction> {
public:
    using Scalar = double;
    using RealScalar = double;
    using StorageIndex = int;
    enum {
        ColsAtCompileTime = Eigen::Dynamic,
        MaxColsAtCompileTime = Eigen::Dynamic,
        IsRowMajor = false
    };

    JacobianAction(const MultiplierOp& R, SpectralField V) : R_(R), V_(std::move(V)) {}

    Eigen::Index rows() const { return R_.grid.mode_count(); }
    Eigen::Index cols() const { return R_.grid.mode_count(); }

    template <typename Rhs>
    Eigen::Product<JacobianAction, Rhs, Eigen::AliasFreeProduct> operator*(const Eigen::MatrixBase<Rhs>& x) const {
        return Eigen::Product<JacobianAction, Rhs, Eigen::AliasFreeProduct>(*this, x.derived());
    }

    Eigen::VectorXd apply(const Eigen::VectorXd& c) const {
        const SpectralField v = trig::from_cosine_coordinates(R_.grid, c);
        const SpectralField Rv = apply_multiplier(R_, pointwise_product(V_, v));
        return c - trig::cosine_coordinates(Rv);
    }

private:
    const MultiplierOp& R_;
    SpectralField V_;
};

} // namespace whitwave

namespace Eigen::internal {
template <typename Rhs>
struct generic_product_impl<whitwave::JacobianAction, Rhs, SparseShape, DenseShape, GemvProduct>
    : generic_product_impl_base<whitwave::JacobianAction, Rhs,
                                generic_product_impl<whitwave::JacobianAction, Rhs>> {
    using Scalar = typename Product<whitwave::JacobianAction, Rhs>::Scalar;
    template <typename Dest>
    static void scaleAndAddTo(Dest& dst, const whitwave::JacobianAction& lhs, const Rhs& rhs, const Scalar& alpha) {
        dst.noalias() += alpha * lhs.apply(rhs);
    }
};
} // namespace Eigen::internal

namespace whitwave {

std::string to_string(WaveMode mode) { return mode == WaveMode::Solitary ? "solitary" : "periodic"; }

WaveMode parse_wave_mode(const std::string& s) {
    if (s == "solitary") return WaveMode::Solitary;
    if (s == "periodic") return WaveMode::Periodic;
    throw InputError("mode must be 'solitary' or 'periodic', got '" + s + "'");
}

void SolveConfig::validate() const {
    if (!(eps > 0.0 && eps < 1.0)) throw InputError("eps must lie in (0, 1)");
    if (!(half_period > 0.0) || !std::isfinite(half_period)) throw InputError("half-period must be positive");
    if (n_points < 16 || n_points % 2 != 0) throw InputError("modes N must be even and >= 16");
    if (!(newton_tol > 0.0)) throw InputError("newton_tol must be positive");
    if (max_iter < 1) throw InputError("max_iter must be at least 1");
    if (!(damping > 0.0 && damping <= 1.0)) throw InputError("damping must lie in (0, 1]");
}

SpectralField phi_residual(const SymbolModel& model, double eps, const SpectralField& W) {
    const MultiplierOp R = resolvent_R_eps(model, eps, W.grid());
    SpectralField g(W.grid(), g_eps(model, eps, W.values()));
    return W - apply_multiplier(R, g);
}

namespace {

double residual_sup(const MultiplierOp& R, const SymbolModel& model, double eps, const SpectralField& W) {
    SpectralField g(W.grid(), g_eps(model, eps, W.values()));
    return sup_norm(W - apply_multiplier(R, g));
}

Eigen::VectorXd dense_step(const MultiplierOp& R, const SpectralField& V, const Eigen::VectorXd& rhs) {
    const int m = R.grid.mode_count();
    Eigen::Map<const Eigen::VectorXd> r(R.symbol.data(), m);
    Eigen::MatrixXd J = -(r.asDiagonal() * trig::potential_cosine_block(V));
    J.diagonal().array() += 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    if (lu.rcond() < 1e-13) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(J);
        std::ostringstream os;
        os << "Jacobian numerically singular (smallest singular value " << svd.singularValues().minCoeff()
           << ")";
        throw NumericalError(os.str());
    }
    return lu.solve(rhs);
}

Eigen::VectorXd krylov_step(const MultiplierOp& R, const SpectralField& V, const Eigen::VectorXd& rhs) {
    JacobianAction J(R, V);
    Eigen::GMRES<JacobianAction, Eigen::IdentityPreconditioner> gmres;
    gmres.compute(J);
    gmres.setTolerance(1e-14);
    gmres.setMaxIterations(4 * R.grid.mode_count());
    gmres.set_restart(200);
    Eigen::VectorXd x = gmres.solve(rhs);
    if (gmres.info() != Eigen::Success && gmres.error() > 1e-10) {
        std::ostringstream os;
        os << "GMRES failed to converge (relative residual " << gmres.error() << ")";
        throw NumericalError(os.str());
    }
    return x;
}

} // namespace

WaveSolution newton_solve(const SymbolModel& model, const SolveConfig& config, const SpectralField& initial_guess) {
    config.validate();
    const PeriodicGrid grid = config.grid();
    if (!(initial_guess.grid() == grid)) throw InputError("initial guess does not live on the configured grid");
    const double eps = config.eps;

    try {
        const MultiplierOp R = resolvent_R_eps(model, eps, grid);
        SpectralField W = even_projection(initial_guess);
        double res = residual_sup(R, model, eps, W);
        int it = 0;
        while (!(res <= config.newton_tol)) {
            if (!std::isfinite(res)) throw NumericalError("Newton residual became non-finite");
            if (it >= config.max_iter) {
                std::ostringstream os;
                os << "max iterations exceeded (" << config.max_iter << ") at eps = " << eps
                   << ", residual " << res;
                throw NumericalError(os.str());
            }
            const SpectralField V(grid, linearized_potential(model, eps, W.values()));
            SpectralField g(grid, g_eps(model, eps, W.values()));
            const Eigen::VectorXd F = trig::cosine_coordinates(W - apply_multiplier(R, g));
            const Eigen::VectorXd delta = config.linear_solver == LinearSolver::Dense
                                              ? dense_step(R, V, -F)
                                              : krylov_step(R, V, -F);
            const SpectralField dW = trig::from_cosine_coordinates(grid, delta);

            double step = config.damping;
            SpectralField trial = W + step * dW;
            double trial_res = residual_sup(R, model, eps, trial);
            for (int halving = 0; halving < 5 && !(trial_res < res); ++halving) {
                step *= 0.5;
                trial = W + step * dW;
                trial_res = residual_sup(R, model, eps, trial);
            }
            W = std::move(trial);
            res = trial_res;
            ++it;
        }

        WaveSolution sol{model.name(), config.mode, eps, nu_of_eps(model, eps), W, res, it,
                         parity_defect(W), config.newton_tol};
        return sol;
    } catch (const InputError& e) {
        // Amplitude left the validity radius of n during the iteration.
        throw NumericalError(std::string("Newton failed: ") + e.what());
    }
}

LimitProfile limit_profile_for(const SymbolModel& model, WaveMode mode, const PeriodicGrid& grid) {
    const double gamma = gamma_of(model);
    return mode == WaveMode::Solitary ? sigma(gamma, grid) : solve_cnoidal(gamma, grid);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InputError("slope needs at least two points");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ContinuationRun continue_in_eps(const SymbolModel& model, const std::vector<double>& eps_ladder,
                                const SolveConfig& base) {
    if (eps_ladder.empty()) throw InputError("eps ladder is empty");
    for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
        if (!(eps_ladder[i] > 0.0)) throw InputError("eps ladder entries must be positive");
        if (i > 0 && !(eps_ladder[i] > eps_ladder[i - 1]))
            throw InputError("eps ladder must be strictly increasing");
    }
    SolveConfig cfg = base;
    cfg.eps = eps_ladder.front();
    cfg.validate();
    const PeriodicGrid grid = cfg.grid();
    const LimitProfile limit = limit_profile_for(model, cfg.mode, grid);

    ContinuationRun run;
    SpectralField guess = limit.field;
    for (double eps : eps_ladder) {
        cfg.eps = eps;
        try {
            WaveSolution sol = newton_solve(model, cfg, guess);
            run.deviations.push_back(h1_norm(sol.W - limit.field));
            guess = sol.W;
            run.solutions.push_back(std::move(sol));
        } catch (const Error& e) {
            run.complete = false;
            std::ostringstream os;
            os << "rung eps = " << eps << ": " << e.what();
            run.failure = os.str();
            break;
        }
    }
    if (run.solutions.size() >= 2) {
        std::vector<double> eps_done;
        for (const auto& s : run.solutions) eps_done.push_back(s.eps);
        run.slope = loglog_slope(eps_done, run.deviations);
    }
    return run;
}

PhysicalWave unscale(const WaveSolution& solution) {
    const double eps = solution.eps;
    const PeriodicGrid& grid = solution.W.grid();
    PhysicalWave w;
    w.half_period = grid.half_period() / eps;
    w.period = 2.0 * w.half_period;
    w.speed = solution.nu;
    const PeriodicGrid phys(w.half_period, grid.size());
    w.x = phys.nodes();
    w.u.resize(static_cast<std::size_t>(grid.size()));
    for (int j = 0; j < grid.size(); ++j) w.u[static_cast<std::size_t>(j)] = eps * eps * solution.W[j];
    w.amplitude = *std::max_element(w.u.begin(), w.u.end());
    return w;
}

double physical_residual(const SymbolModel& model, const PhysicalWave& wave) {
    const PeriodicGrid grid(wave.half_period, static_cast<int>(wave.u.size()));
    const SpectralField u(grid, wave.u);
    const MultiplierOp L = MultiplierOp::from_symbol(
        grid, [&model](double k) { return model.multiplier().value(k); }, "m(k)");
    const SpectralField Lu = apply_multiplier(L, u);
    double r = 0.0;
    for (int j = 0; j < grid.size(); ++j)
        r = std::max(r, std::fabs(wave.speed * u[j] - Lu[j] - model.nonlinearity().value(u[j])));
    return r;
}

double decay_check(const WaveSolution& solution) {
    if (solution.mode != WaveMode::Solitary)
        throw InputError("decay_check applies to solitary solutions only");
    const PeriodicGrid& grid = solution.W.grid();
    const double cut = 0.9 * grid.half_period();
    double m = 0.0;
    for (int j = 0; j < grid.size(); ++j)
        if (std::fabs(grid.node(j)) >= cut) m = std::max(m, std::fabs(solution.W[j]));
    return m;
}

} // namespace whitwave
