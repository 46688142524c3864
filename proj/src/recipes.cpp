#include "pfdyn/recipes.hpp"

#include "pfdyn/errors.hpp"
#include "pfdyn/snapshot.hpp"

#include <cmath>

namespace pfdyn {

namespace {
constexpr double kPi = 3.14159265358979323846;

Field axis_profile(const Grid& g, bool interior, int axis, auto&& f) {
    const Field x = interior ? g.interior_coordinates(axis) : g.coordinates(axis);
    return x.unaryExpr([&](double v) { return f(v / g.extent()); });
}
}  // namespace

std::vector<std::string> InitialRecipe::validate() const {
    std::vector<std::string> v;
    auto finite = [&](double x, const char* key) {
        if (!std::isfinite(x)) v.push_back(std::string("initial.") + key + " must be finite");
    };
    finite(chi, "chi");
    finite(chi_amplitude, "chi_amplitude");
    finite(noise, "noise");
    if (noise < 0.0) v.push_back("initial.noise must be >= 0");
    if (kind == "constant") {
        if (!(theta > 0.0) || !std::isfinite(theta)) {
            v.push_back("initial.theta must be positive (temperature is strictly positive)");
        }
    } else if (kind == "mode") {
        if (!(theta > 0.0) || !std::isfinite(theta)) {
            v.push_back("initial.theta must be positive (temperature is strictly positive)");
        }
        if (!(std::abs(theta_amplitude) < 1.0)) {
            v.push_back("initial.theta_amplitude must satisfy |a| < 1 to keep theta positive");
        }
        if (mode < 1) v.push_back("initial.mode must be >= 1");
    } else if (kind == "random_smooth") {
        if (!(theta_min > 0.0)) {
            v.push_back("initial.theta_min must be positive (temperature is strictly positive)");
        }
        if (!(theta_max >= theta_min) || !std::isfinite(theta_max)) {
            v.push_back("initial.theta_max must be finite and >= theta_min");
        }
        if (modes < 1) v.push_back("initial.modes must be >= 1");
    } else if (kind == "file") {
        if (path.empty()) v.push_back("initial.path is required for the file recipe");
    } else {
        v.push_back("initial.recipe '" + kind +
                    "' is not one of constant, mode, random_smooth, file");
    }
    return v;
}

Field random_smooth_field(const Grid& g, int modes, std::mt19937_64& rng, bool interior) {
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    const auto size = interior ? g.interior_count() : g.node_count();
    Field f = Field::Zero(static_cast<Eigen::Index>(size));
    if (g.dim() == 1) {
        for (int k = 1; k <= modes; ++k) {
            const double a = amp(rng) / k;
            const double p = phase(rng);
            f += a * axis_profile(g, interior, 0, [&](double x) { return std::cos(k * kPi * x + p); });
        }
    } else {
        for (int k1 = 0; k1 <= modes; ++k1) {
            for (int k2 = 0; k2 <= modes; ++k2) {
                if (k1 == 0 && k2 == 0) continue;
                const double a = amp(rng) / (1 + k1 * k1 + k2 * k2);
                const double p1 = phase(rng);
                const double p2 = phase(rng);
                const Field fx = axis_profile(g, interior, 0,
                                              [&](double x) { return std::cos(k1 * kPi * x + p1); });
                const Field fy = axis_profile(g, interior, 1,
                                              [&](double y) { return std::cos(k2 * kPi * y + p2); });
                f += a * fx.cwiseProduct(fy);
            }
        }
    }
    const double lo = f.minCoeff();
    const double hi = f.maxCoeff();
    if (hi - lo <= 0.0) return Field::Zero(f.size());
    return ((f.array() - lo) * (2.0 / (hi - lo)) - 1.0).matrix();
}

State make_initial_state(std::shared_ptr<const Discretization> disc, const InitialRecipe& recipe,
                         std::uint64_t seed) {
    auto violations = recipe.validate();
    if (!violations.empty()) throw ConfigError(std::move(violations));
    const Grid& g = disc->grid();
    const auto m = static_cast<Eigen::Index>(g.interior_count());
    const auto n = static_cast<Eigen::Index>(g.node_count());
    std::mt19937_64 rng(seed);

    Field theta, chi;
    if (recipe.kind == "constant") {
        theta = Field::Constant(m, recipe.theta);
        chi = Field::Constant(n, recipe.chi);
    } else if (recipe.kind == "mode") {
        const int k = recipe.mode;
        Field s = Field::Ones(m);
        Field c = Field::Ones(n);
        for (int axis = 0; axis < g.dim(); ++axis) {
            s = s.cwiseProduct(axis_profile(g, true, axis, [&](double x) { return std::sin(k * kPi * x); }));
            c = c.cwiseProduct(axis_profile(g, false, axis, [&](double x) { return std::cos(k * kPi * x); }));
        }
        theta = recipe.theta * (Field::Ones(m) + recipe.theta_amplitude * s);
        chi = Field::Constant(n, recipe.chi) + recipe.chi_amplitude * c;
    } else if (recipe.kind == "random_smooth") {
        const Field f = random_smooth_field(g, recipe.modes, rng, true);
        const double l0 = std::log(recipe.theta_min);
        const double l1 = std::log(recipe.theta_max);
        theta = (l0 + (l1 - l0) * 0.5 * (f.array() + 1.0)).exp().matrix();
        chi = Field::Constant(n, recipe.chi) +
              recipe.chi_amplitude * random_smooth_field(g, recipe.modes, rng, false);
    } else {
        LoadedState loaded = read_state_file(recipe.path, disc);
        theta = std::move(loaded.state.theta);
        chi = std::move(loaded.state.chi);
    }
    if (recipe.noise > 0.0) {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (Eigen::Index i = 0; i < chi.size(); ++i) chi[i] += recipe.noise * u(rng);
    }
    return make_state(std::move(disc), std::move(theta), std::move(chi), 0.0);
}

}  // namespace pfdyn
