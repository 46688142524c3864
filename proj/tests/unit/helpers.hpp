#pragma once

#include "pfdyn/state.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

namespace testing {

inline constexpr double pi = 3.14159265358979323846;

inline pfdyn::Field uniform_field(std::size_t size, std::mt19937_64& rng, double lo = -1.0,
                                  double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    pfdyn::Field f(static_cast<Eigen::Index>(size));
    for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = u(rng);
    return f;
}

/// Random positive temperature on interior nodes and random chi on all nodes.
inline pfdyn::State random_state(const std::shared_ptr<const pfdyn::Discretization>& d,
                                 std::mt19937_64& rng, double theta_lo = 0.5,
                                 double theta_hi = 2.0, double chi_amp = 1.0) {
    const auto& g = d->grid();
    return pfdyn::make_state(d, uniform_field(g.interior_count(), rng, theta_lo, theta_hi),
                             uniform_field(g.node_count(), rng, -chi_amp, chi_amp));
}

/// Scratch directory removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("pfdyn_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace testing
