#pragma once

#include "pfdyn/diagnostics.hpp"

#include <functional>
#include <memory>
#include <optional>

namespace pfdyn {

namespace detail {
class JacobianSolver;
}

struct StepConfig {
    double dt = 0.0625;  // 0.25 / lambda for the default double well
    double newton_tol = 1e-10;
    int newton_max_iters = 50;
    double theta_floor = 1e-8;
    int max_dt_halvings = 10;
    /// Upper bound on dt as a multiple of 2/lambda (ignored when lambda = 0).
    double dt_cap = 1.0;

    /// Throws ConfigError listing every violated constraint.
    void validate() const;
};

/// Residual of the implicit Euler equations, split by unknown.
struct Residual {
    Field theta;  // interior nodes
    Field chi;    // all nodes

    double max_norm() const;
};

/// Fully implicit Euler for
///
///     theta_t + chi_t + A(1 - 1/theta) = 0,
///     chi_t + B chi + W'(chi) - chi = 1 - 1/theta,
///
/// with a damped Newton solve on the coupled system and dt halving as fallback.
/// Owns its factorization scratch: one instance per worker thread.
class Stepper {
public:
    Stepper(std::shared_ptr<const Discretization> disc, Potential potential, StepConfig config);
    ~Stepper();
    Stepper(Stepper&&) noexcept;
    Stepper& operator=(Stepper&&) noexcept;

    const Discretization& discretization() const noexcept { return *disc_; }
    const std::shared_ptr<const Discretization>& discretization_ptr() const noexcept {
        return disc_;
    }
    const Potential& potential() const noexcept { return potential_; }
    const StepConfig& config() const noexcept { return config_; }

    /// min(config.dt, dt_cap * 2 / lambda).
    double effective_dt() const noexcept;

    /// r_theta = (theta - theta_n)/dt + (chi - chi_n)/dt + A(1 - 1/theta)   (interior)
    /// r_chi   = (chi - chi_n)/dt + B chi + W'(chi) - chi - (1 - 1/theta)   (all nodes,
    ///           with 1 - 1/theta = 0 on the boundary)
    Residual residual(const State& next, const State& prev, double dt) const;

    /// Jacobian of `residual` with respect to `next`, applied to a direction:
    /// [I/dt + A diag(1/theta²), I/dt ; -diag(1/theta²), I/dt + B + diag(W''(chi) - 1)].
    Residual jacobian_apply(const State& next, double dt, const Field& d_theta,
                            const Field& d_chi) const;

    struct Result {
        State state;
        StepStats stats;
    };

    /// One step of size effective_dt() (or `dt` when given), halving on Newton failure.
    /// Throws StepFailure after max_dt_halvings unsuccessful attempts.
    Result step(const State& state, std::optional<double> dt = std::nullopt);

private:
    struct Attempt;
    bool newton(const State& prev, double dt, Attempt& out);
    double convergence_threshold(const State& next, const State& prev, const Field& u,
                                 double dt) const;

    std::shared_ptr<const Discretization> disc_;
    Potential potential_;
    StepConfig config_;
    double a_row_abs_max_ = 0.0;
    double l_row_abs_max_ = 0.0;
    std::unique_ptr<detail::JacobianSolver> solver_;
};

struct RunOptions {
    double lp_exponent = 4.0;
    /// Index of the last completed step of state0 (nonzero when resuming).
    long first_step = 0;
    /// Dissipation integral accumulated up to state0.
    double dissipation_integral = 0.0;
    /// Stop after this many steps even if t_end is not reached (< 0: no limit).
    long max_steps = -1;
};

/// Receives each step row together with the state it describes.
using RowSink = std::function<void(const DiagnosticsRow&, const State&)>;

/// Steps from state0 to t_end (the last step is shortened to land on t_end),
/// emitting one row per accepted step. Returns the final state. StepFailure
/// propagates with the time of failure.
State run(Stepper& stepper, const State& state0, double t_end, const RowSink& sink,
          const RunOptions& options = {});

}  // namespace pfdyn
