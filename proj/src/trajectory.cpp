#include "pfdyn/trajectory.hpp"

#include "pfdyn/errors.hpp"

namespace pfdyn {

std::vector<DiagnosticsRow> TrajectoryRecord::all_rows() const {
    std::vector<DiagnosticsRow> out;
    out.reserve(rows.size() + 1);
    out.push_back(initial);
    out.insert(out.end(), rows.begin(), rows.end());
    return out;
}

TrajectoryRecord run_trajectory(Stepper& stepper, const State& state0,
                                const TrajectoryOptions& options) {
    state0.validate();
    TrajectoryRecord rec;
    rec.initial = initial_row(state0, stepper.potential(), options.lp_exponent);
    rec.snapshots.push_back(Snapshot{0, state0});

    State last = state0;
    long last_step = 0;
    RunOptions ro;
    ro.lp_exponent = options.lp_exponent;
    auto sink = [&](const DiagnosticsRow& row, const State& s) {
        rec.rows.push_back(row);
        last = s;
        last_step = row.step;
        if (options.snapshot_every > 0 && row.step % options.snapshot_every == 0) {
            rec.snapshots.push_back(Snapshot{row.step, s});
        }
    };
    try {
        run(stepper, state0, options.t_end, sink, ro);
    } catch (const StepFailure& f) {
        rec.failure = FailureRecord{last_step + 1, f.time(), f.last_residual(), f.min_theta(),
                                    f.what()};
    }
    if (rec.snapshots.back().step != last_step) rec.snapshots.push_back(Snapshot{last_step, last});
    return rec;
}

}  // namespace pfdyn
