#include "pfdyn/potential.hpp"

#include "pfdyn/errors.hpp"

#include <cmath>
#include <sstream>

namespace pfdyn {

namespace {

double horner(const std::vector<double>& c, double r) noexcept {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * r + *it;
    return acc;
}

std::vector<double> differentiate(const std::vector<double>& c) {
    std::vector<double> d;
    for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
    return d;
}

std::vector<double> trim(std::vector<double> c) {
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    return c;
}

}  // namespace

Potential::Potential(std::vector<double> coefficients, double lambda, std::string name)
    : coefficients_(trim(std::move(coefficients))), lambda_(lambda), name_(std::move(name)) {
    d1_ = differentiate(coefficients_);
    d2_ = differentiate(d1_);
}

Potential Potential::double_well() {
    return Potential({1.0, 0.0, -2.0, 0.0, 1.0}, 4.0, "double_well");
}

Potential Potential::polynomial(std::vector<double> coefficients, double lambda,
                                std::string name) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw ConfigError("potential lambda must be a finite number >= 0");
    }
    for (double c : coefficients) {
        if (!std::isfinite(c)) throw ConfigError("potential coefficients must be finite");
    }
    return Potential(std::move(coefficients), lambda, std::move(name));
}

double Potential::value(double r) const noexcept { return horner(coefficients_, r); }
double Potential::derivative(double r) const noexcept { return horner(d1_, r); }
double Potential::second_derivative(double r) const noexcept { return horner(d2_, r); }

Field Potential::beta(const Field& r) const {
    return r.unaryExpr([this](double x) { return beta(x); });
}

Field Potential::derivative(const Field& r) const {
    return r.unaryExpr([this](double x) { return derivative(x); });
}

Field Potential::second_derivative(const Field& r) const {
    return r.unaryExpr([this](double x) { return second_derivative(x); });
}

std::vector<std::string> Potential::check_hypotheses(double range, int samples) const {
    std::vector<std::string> violations;
    if (std::abs(derivative(0.0)) > 1e-12) {
        std::ostringstream os;
        os << "potential '" << name_ << "': W'(0) = " << derivative(0.0) << " must vanish";
        violations.push_back(os.str());
    }
    // W'(r) r -> +inf holds for polynomials iff W has even degree >= 2 with a
    // positive leading coefficient.
    const std::size_t degree = coefficients_.empty() ? 0 : coefficients_.size() - 1;
    if (degree < 2 || degree % 2 != 0 || coefficients_.back() <= 0.0) {
        violations.push_back("potential '" + name_ +
                             "': W'(r) r must tend to +infinity (even degree >= 2 with "
                             "positive leading coefficient)");
    }
    double worst = 0.0;
    double worst_at = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double r = -range + 2.0 * range * i / (samples - 1);
        const double gap = second_derivative(r) + lambda_;
        if (gap < worst) {
            worst = gap;
            worst_at = r;
        }
    }
    if (worst < -1e-12) {
        std::ostringstream os;
        os << "potential '" << name_ << "': W''(" << worst_at << ") = "
           << second_derivative(worst_at) << " < -lambda = " << -lambda_;
        violations.push_back(os.str());
    }
    return violations;
}

std::vector<double> Potential::derivative_roots(double range, int samples) const {
    std::vector<double> roots;
    double prev_r = -range;
    double prev_v = derivative(prev_r);
    for (int i = 1; i < samples; ++i) {
        const double r = -range + 2.0 * range * i / (samples - 1);
        const double v = derivative(r);
        if (prev_v == 0.0) {
            roots.push_back(prev_r);
        } else if (prev_v * v < 0.0) {
            double lo = prev_r;
            double hi = r;
            double flo = prev_v;
            for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = derivative(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_r = r;
        prev_v = v;
    }
    if (prev_v == 0.0) roots.push_back(prev_r);
    return roots;
}

}  // namespace pfdyn
