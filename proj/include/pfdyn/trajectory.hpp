#pragma once

#include "pfdyn/stepper.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pfdyn {

struct Snapshot {
    long step = 0;
    State state;
};

/// Context of a step that could not be completed.
struct FailureRecord {
    long step = 0;  // index of the step that failed
    double time = 0.0;
    double last_residual = 0.0;
    double min_theta = 0.0;
    std::string message;
};

/// Diagnostics stream of one trajectory plus periodic state snapshots.
/// A failed run keeps everything computed before the failure.
struct TrajectoryRecord {
    DiagnosticsRow initial;
    std::vector<DiagnosticsRow> rows;
    std::vector<Snapshot> snapshots;  // ascending in step, first one is step 0
    std::optional<FailureRecord> failure;

    /// initial followed by rows.
    std::vector<DiagnosticsRow> all_rows() const;
    double end_time() const { return rows.empty() ? initial.t : rows.back().t; }
};

struct TrajectoryOptions {
    double t_end = 1.0;
    /// Snapshot every k steps (0: initial and final state only).
    long snapshot_every = 0;
    double lp_exponent = 4.0;
};

TrajectoryRecord run_trajectory(Stepper& stepper, const State& state0,
                                const TrajectoryOptions& options);

}  // namespace pfdyn
