#include "pfdyn/bundle.hpp"

#include "pfdyn/errors.hpp"
#include "pfdyn/recipes.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace pfdyn {

double bundle_radius(const std::vector<State>& members, const State& reference,
                     const Potential& potential, const MetricParams& params) {
    double r = 0.0;
    for (const auto& m : members) r = std::max(r, metric_dx(m, reference, potential, params));
    return r;
}

Bundle perturbed_bundle(const State& reference, int count, double target_radius,
                        std::uint64_t seed, const Potential& potential,
                        const MetricParams& params, int modes) {
    if (count < 1) throw DomainError("perturbed_bundle: count must be >= 1");
    if (!(target_radius > 0.0)) throw DomainError("perturbed_bundle: radius must be positive");
    reference.validate();
    const Grid& g = reference.grid();
    std::mt19937_64 rng(seed);
    std::vector<Field> dir_theta, dir_chi;
    for (int i = 0; i < count; ++i) {
        dir_theta.push_back(random_smooth_field(g, modes, rng, true));
        dir_chi.push_back(random_smooth_field(g, modes, rng, false));
    }
    auto build = [&](double s) {
        std::vector<State> out;
        for (int i = 0; i < count; ++i) {
            Field theta = reference.theta.cwiseProduct((s * dir_theta[i]).array().exp().matrix());
            Field chi = reference.chi + s * dir_chi[i];
            out.push_back(make_state(reference.disc, std::move(theta), std::move(chi), reference.time));
        }
        return out;
    };
    auto radius = [&](double s) { return bundle_radius(build(s), reference, potential, params); };

    double lo = 0.0, hi = 1e-3;
    while (radius(hi) < target_radius) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e3) throw NumericalError("perturbed_bundle: radius target unreachable", hi);
    }
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double r = radius(mid);
        if (std::abs(r - target_radius) <= 1e-7 * target_radius) {
            lo = hi = mid;
            break;
        }
        (r < target_radius ? lo : hi) = mid;
    }
    Bundle b;
    b.reference = reference;
    b.members = build(hi);
    b.radius = bundle_radius(b.members, reference, potential, params);
    return b;
}

std::vector<TrajectoryRecord> run_bundle(const std::vector<State>& members,
                                         const Potential& potential, const StepConfig& config,
                                         const TrajectoryOptions& options, int workers) {
    for (const auto& m : members) require_same_grid(m, members.front(), "run_bundle");
    std::vector<TrajectoryRecord> records(members.size());
    if (members.empty()) return records;
    const int nthreads =
        std::max(1, std::min<int>(workers, static_cast<int>(members.size())));

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        try {
            Stepper stepper(members.front().disc, potential, config);
            for (std::size_t i = next++; i < members.size(); i = next++) {
                records[i] = run_trajectory(stepper, members[i], options);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return records;
}

}  // namespace pfdyn
