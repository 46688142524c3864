#include "pfdyn/stepper.hpp"

#include "pfdyn/detail/banded_lu.hpp"
#include "pfdyn/errors.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace pfdyn {

void StepConfig::validate() const {
    std::vector<std::string> v;
    if (!(dt > 0.0) || !std::isfinite(dt)) v.push_back("step.dt must be positive");
    if (!(newton_tol > 0.0)) v.push_back("step.newton_tol must be positive");
    if (newton_max_iters < 1) v.push_back("step.newton_max_iters must be at least 1");
    if (!(theta_floor > 0.0)) v.push_back("step.theta_floor must be positive");
    if (max_dt_halvings < 0) v.push_back("step.max_dt_halvings must be >= 0");
    if (!(dt_cap > 0.0)) v.push_back("step.dt_cap must be positive");
    if (!v.empty()) throw ConfigError(std::move(v));
}

double Residual::max_norm() const {
    const double a = theta.size() ? theta.cwiseAbs().maxCoeff() : 0.0;
    const double b = chi.size() ? chi.cwiseAbs().maxCoeff() : 0.0;
    return std::max(a, b);
}

namespace detail {

// Unknowns are interleaved per full-grid node p: chi_p at 2p, theta_p at 2p + 1.
// Boundary nodes keep a theta slot with an identity row so the layout is uniform;
// in 1D this gives a matrix with two sub- and two super-diagonals.
class JacobianSolver {
public:
    virtual ~JacobianSolver() = default;
    virtual bool factorize(const std::vector<Eigen::Triplet<double>>& entries) = 0;
    virtual void solve(Eigen::VectorXd& rhs) = 0;
};

namespace {

class BandedJacobianSolver final : public JacobianSolver {
public:
    explicit BandedJacobianSolver(int size) : lu_(size, 2, 2) {}

    bool factorize(const std::vector<Eigen::Triplet<double>>& entries) override {
        lu_.set_zero();
        for (const auto& e : entries) lu_.add(e.row(), e.col(), e.value());
        return lu_.factorize();
    }
    void solve(Eigen::VectorXd& rhs) override { lu_.solve(rhs); }

private:
    BandedLU lu_;
};

class SparseJacobianSolver final : public JacobianSolver {
public:
    explicit SparseJacobianSolver(int size) : matrix_(size, size) {}

    bool factorize(const std::vector<Eigen::Triplet<double>>& entries) override {
        matrix_.setFromTriplets(entries.begin(), entries.end());
        if (!analyzed_) {
            lu_.analyzePattern(matrix_);
            analyzed_ = true;
        }
        lu_.factorize(matrix_);
        return lu_.info() == Eigen::Success;
    }
    void solve(Eigen::VectorXd& rhs) override { rhs = lu_.solve(rhs); }

private:
    SparseMatrix matrix_;
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
    bool analyzed_ = false;
};

}  // namespace
}  // namespace detail

struct Stepper::Attempt {
    State state;
    StepStats stats;
    double last_residual = 0.0;
    double min_theta = 0.0;
};

namespace {

double row_abs_max(const SparseMatrix& m) {
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(m.rows());
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) sums[it.row()] += std::abs(it.value());
    }
    return sums.size() ? sums.maxCoeff() : 0.0;
}

std::vector<Eigen::Triplet<double>> jacobian_entries(const Discretization& d, const State& next,
                                                     double dt, const Potential& potential) {
    const Grid& g = d.grid();
    const auto& interior = g.interior_nodes();
    const double inv_dt = 1.0 / dt;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(d.matrix_a().nonZeros() + d.matrix_neumann_laplacian().nonZeros() +
              4 * g.node_count());

    Eigen::VectorXd inv_theta2 = next.theta.cwiseInverse().cwiseAbs2();

    // theta rows: I/dt + A diag(1/theta²) and I/dt coupling to chi.
    const SparseMatrix& a = d.matrix_a();
    for (int col = 0; col < a.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
            const int row = static_cast<int>(it.row());
            t.emplace_back(2 * interior[row] + 1, 2 * interior[col] + 1,
                           it.value() * inv_theta2[col]);
        }
    }
    for (std::size_t k = 0; k < interior.size(); ++k) {
        const int p = interior[k];
        t.emplace_back(2 * p + 1, 2 * p + 1, inv_dt);
        t.emplace_back(2 * p + 1, 2 * p, inv_dt);
        t.emplace_back(2 * p, 2 * p + 1, -inv_theta2[static_cast<Eigen::Index>(k)]);
    }
    for (int p : g.boundary_nodes()) t.emplace_back(2 * p + 1, 2 * p + 1, 1.0);

    // chi rows: I/dt + B + diag(W'' - 1) = I/dt + Laplacian_N + diag(W'').
    const SparseMatrix& l = d.matrix_neumann_laplacian();
    for (int col = 0; col < l.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(l, col); it; ++it) {
            t.emplace_back(2 * static_cast<int>(it.row()), 2 * col, it.value());
        }
    }
    for (Eigen::Index p = 0; p < next.chi.size(); ++p) {
        const int i = static_cast<int>(p);
        t.emplace_back(2 * i, 2 * i, inv_dt + potential.second_derivative(next.chi[p]));
    }
    return t;
}

}  // namespace

Stepper::Stepper(std::shared_ptr<const Discretization> disc, Potential potential,
                 StepConfig config)
    : disc_(std::move(disc)), potential_(std::move(potential)), config_(config) {
    config_.validate();
    a_row_abs_max_ = row_abs_max(disc_->matrix_a());
    l_row_abs_max_ = row_abs_max(disc_->matrix_neumann_laplacian());
    const int size = 2 * static_cast<int>(disc_->grid().node_count());
    if (disc_->grid().dim() == 1) {
        solver_ = std::make_unique<detail::BandedJacobianSolver>(size);
    } else {
        solver_ = std::make_unique<detail::SparseJacobianSolver>(size);
    }
}

Stepper::~Stepper() = default;
Stepper::Stepper(Stepper&&) noexcept = default;
Stepper& Stepper::operator=(Stepper&&) noexcept = default;

double Stepper::effective_dt() const noexcept {
    const double lambda = potential_.lambda();
    if (lambda <= 0.0) return config_.dt;
    return std::min(config_.dt, config_.dt_cap * 2.0 / lambda);
}

Residual Stepper::residual(const State& next, const State& prev, double dt) const {
    require_same_grid(next, prev, "residual");
    next.validate();
    prev.validate();
    const Grid& g = disc_->grid();
    const Field u = next.flux_potential();
    const Field chi_rate = (next.chi - prev.chi) / dt;

    Residual r;
    r.theta = (next.theta - prev.theta) / dt + g.restrict_to_interior(chi_rate) +
              disc_->matrix_a() * u;
    // Laplacian_N chi is B chi - chi; using it directly keeps constants exact.
    r.chi = chi_rate + disc_->matrix_neumann_laplacian() * next.chi +
            potential_.derivative(next.chi) - g.extend_from_interior(u, 0.0);
    return r;
}

Residual Stepper::jacobian_apply(const State& next, double dt, const Field& d_theta,
                                 const Field& d_chi) const {
    next.validate();
    const Grid& g = disc_->grid();
    if (!g.is_interior_field(d_theta) || !g.is_full_field(d_chi)) {
        throw DimensionError("jacobian_apply: direction sizes do not match the grid");
    }
    const Field scaled = d_theta.cwiseQuotient(next.theta.cwiseAbs2());
    Residual out;
    out.theta = d_theta / dt + disc_->matrix_a() * scaled + g.restrict_to_interior(d_chi) / dt;
    out.chi = d_chi / dt + disc_->matrix_neumann_laplacian() * d_chi +
              potential_.second_derivative(next.chi).cwiseProduct(d_chi) -
              g.extend_from_interior(scaled, 0.0);
    return out;
}

// Accept when the residual is below newton_tol * (1 + |state|) or at the level
// where cancellation in the stiff operator terms makes further progress impossible.
double Stepper::convergence_threshold(const State& next, const State& prev, const Field& u,
                                      double dt) const {
    const double state_norm = std::max(next.theta.cwiseAbs().maxCoeff(),
                                       next.chi.cwiseAbs().maxCoeff());
    const double u_max = u.size() ? u.cwiseAbs().maxCoeff() : 0.0;
    const double chi_max = next.chi.cwiseAbs().maxCoeff();
    double w_max = 0.0;
    for (Eigen::Index i = 0; i < next.chi.size(); ++i) {
        w_max = std::max(w_max, std::abs(potential_.derivative(next.chi[i])));
    }
    const double rate_scale =
        (next.theta.cwiseAbs().maxCoeff() + prev.theta.cwiseAbs().maxCoeff() + chi_max +
         prev.chi.cwiseAbs().maxCoeff()) /
        dt;
    const double magnitude =
        rate_scale + a_row_abs_max_ * u_max + l_row_abs_max_ * chi_max + w_max + u_max;
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * magnitude;
    return std::max(config_.newton_tol * (1.0 + state_norm), floor);
}

bool Stepper::newton(const State& prev, double dt, Attempt& out) {
    const Grid& g = disc_->grid();
    const auto& interior = g.interior_nodes();
    const auto n_full = static_cast<Eigen::Index>(g.node_count());

    State x = prev;
    x.time = prev.time + dt;
    Residual r = residual(x, prev, dt);
    double merit = std::hypot(r.theta.norm(), r.chi.norm());

    out.stats = StepStats{};
    out.stats.dt_used = dt;
    out.stats.min_theta_seen = x.theta.minCoeff();
    out.last_residual = r.max_norm();
    out.min_theta = x.theta.minCoeff();

    Eigen::VectorXd rhs(2 * n_full);
    for (int iter = 1; iter <= config_.newton_max_iters; ++iter) {
        if (!solver_->factorize(jacobian_entries(*disc_, x, dt, potential_))) return false;

        rhs.setZero();
        for (Eigen::Index p = 0; p < n_full; ++p) rhs[2 * p] = -r.chi[p];
        for (std::size_t k = 0; k < interior.size(); ++k) {
            rhs[2 * interior[k] + 1] = -r.theta[static_cast<Eigen::Index>(k)];
        }
        solver_->solve(rhs);
        if (!rhs.allFinite()) return false;

        Field d_theta(x.theta.size());
        Field d_chi(n_full);
        for (Eigen::Index p = 0; p < n_full; ++p) d_chi[p] = rhs[2 * p];
        for (std::size_t k = 0; k < interior.size(); ++k) {
            d_theta[static_cast<Eigen::Index>(k)] = rhs[2 * interior[k] + 1];
        }

        // Backtrack until theta stays above the floor and the residual decreases.
        double alpha = 1.0;
        bool accepted = false;
        State trial = x;
        Residual r_trial;
        double merit_trial = 0.0;
        double threshold_trial = 0.0;
        for (int halving = 0; halving < 40; ++halving) {
            trial.theta = x.theta + alpha * d_theta;
            trial.chi = x.chi + alpha * d_chi;
            if (trial.theta.allFinite() && trial.chi.allFinite() &&
                trial.theta.minCoeff() > config_.theta_floor) {
                r_trial = residual(trial, prev, dt);
                merit_trial = std::hypot(r_trial.theta.norm(), r_trial.chi.norm());
                threshold_trial =
                    convergence_threshold(trial, prev, trial.flux_potential(), dt);
                if (std::isfinite(merit_trial) &&
                    (merit_trial < merit || r_trial.max_norm() <= threshold_trial)) {
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
            ++out.stats.damping_events;
        }
        if (!accepted) return false;

        x = std::move(trial);
        r = std::move(r_trial);
        merit = merit_trial;
        out.stats.newton_iterations = iter;
        out.stats.min_theta_seen = std::min(out.stats.min_theta_seen, x.theta.minCoeff());
        out.last_residual = r.max_norm();
        out.min_theta = x.theta.minCoeff();
        if (out.last_residual <= threshold_trial) {
            out.stats.final_residual = out.last_residual;
            out.state = std::move(x);
            return true;
        }
    }
    return false;
}

Stepper::Result Stepper::step(const State& state, std::optional<double> dt) {
    state.validate();
    if (state.disc != disc_ && !(state.grid() == disc_->grid())) {
        throw DimensionError("step: state grid does not match the stepper grid");
    }
    const double dt0 = dt.value_or(effective_dt());
    if (!(dt0 > 0.0)) throw DomainError("step: dt must be positive");

    Attempt attempt;
    double last_residual = 0.0;
    double min_theta = state.theta.minCoeff();
    for (int halvings = 0; halvings <= config_.max_dt_halvings; ++halvings) {
        const double h = std::ldexp(dt0, -halvings);
        if (newton(state, h, attempt)) {
            attempt.stats.dt_halvings = halvings;
            return Result{std::move(attempt.state), attempt.stats};
        }
        last_residual = attempt.last_residual;
        min_theta = attempt.min_theta;
    }
    std::ostringstream os;
    os << "step failed at t = " << state.time << " after " << config_.max_dt_halvings
       << " dt halvings; last residual " << last_residual << ", min theta " << min_theta;
    throw StepFailure(os.str(), state.time, last_residual, min_theta);
}

State run(Stepper& stepper, const State& state0, double t_end, const RowSink& sink,
          const RunOptions& options) {
    State current = state0;
    long step = options.first_step;
    long taken = 0;
    double integral = options.dissipation_integral;
    const double dt = stepper.effective_dt();
    const double eps_t = 1e-12 * std::max(1.0, std::abs(t_end));
    while (t_end - current.time > eps_t) {
        if (options.max_steps >= 0 && taken >= options.max_steps) break;
        const double remaining = t_end - current.time;
        const double h = remaining < dt + eps_t ? remaining : dt;
        Stepper::Result res = stepper.step(current, h);
        if (remaining < dt + eps_t && std::ldexp(h, -res.stats.dt_halvings) == h) {
            res.state.time = t_end;
        }
        ++step;
        ++taken;
        const DiagnosticsRow row = step_row(current, res.state, res.stats, stepper.potential(),
                                            options.lp_exponent, step, integral);
        integral = row.dissipation_integral;
        if (sink) sink(row, res.state);
        current = std::move(res.state);
    }
    return current;
}

}  // namespace pfdyn
