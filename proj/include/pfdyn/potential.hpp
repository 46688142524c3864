#pragma once

#include "pfdyn/grid.hpp"

#include <string>
#include <vector>

namespace pfdyn {

/// Polynomial potential W(r) = sum_k c_k r^k entering the phase equation as
///
///     chi_t - Laplacian(chi) + W'(chi) = 1 - 1/theta.
///
/// W is taken literally here: the mass term of B = -Laplacian + I is added and
/// subtracted inside the stepper. In the B-form of the equations the
/// effective potential is W(r) - r^2/2, which is what the energy uses.
/// `lambda` is the semiconvexity constant of W (W'' >= -lambda).
class Potential {
public:
    /// W(r) = (r^2 - 1)^2 with lambda = 4 (W'' = 12 r^2 - 4 >= -4).
    static Potential double_well();
    static Potential polynomial(std::vector<double> coefficients, double lambda,
                                std::string name = "polynomial");

    double value(double r) const noexcept;
    double derivative(double r) const noexcept;
    double second_derivative(double r) const noexcept;

    /// beta(r) = W'(r) + lambda r, monotone nondecreasing.
    double beta(double r) const noexcept { return derivative(r) + lambda_ * r; }
    Field beta(const Field& r) const;

    Field derivative(const Field& r) const;
    Field second_derivative(const Field& r) const;

    double lambda() const noexcept { return lambda_; }
    const std::string& name() const noexcept { return name_; }
    const std::vector<double>& coefficients() const noexcept { return coefficients_; }

    /// Sampled checks of W'(0) = 0, coercivity W'(r) r -> +inf, and W'' >= -lambda
    /// on [-range, range]. Returns one message per violated hypothesis.
    std::vector<std::string> check_hypotheses(double range = 10.0, int samples = 4001) const;

    /// Real roots of W' in [-range, range], located by sign scan plus bisection.
    std::vector<double> derivative_roots(double range = 10.0, int samples = 20001) const;

private:
    Potential(std::vector<double> coefficients, double lambda, std::string name);

    std::vector<double> coefficients_;
    std::vector<double> d1_;
    std::vector<double> d2_;
    double lambda_;
    std::string name_;
};

}  // namespace pfdyn
