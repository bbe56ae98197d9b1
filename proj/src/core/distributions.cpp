#include "core/distributions.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "core/quadrature.hpp"

namespace qrtc {

FirstPassageModel FirstPassageModel::exponential(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("FirstPassageModel: rate must be positive");
    return FirstPassageModel(PassageLaw::Exponential, rate, 1.0, 1.0 / rate);
}

FirstPassageModel FirstPassageModel::weibull(double rate, double shape) {
    if (!(rate > 0.0)) throw std::invalid_argument("FirstPassageModel: rate must be positive");
    if (!(shape > 0.0)) throw std::invalid_argument("FirstPassageModel: shape must be positive");
    // scale chosen so the mean scale*Gamma(1 + 1/shape) equals 1/rate
    const double scale = 1.0 / (rate * std::tgamma(1.0 + 1.0 / shape));
    return FirstPassageModel(PassageLaw::Weibull, rate, shape, scale);
}

double FirstPassageModel::density(double d) const {
    if (d < 0.0) return 0.0;
    if (law_ == PassageLaw::Exponential) return rate_ * std::exp(-rate_ * d);
    const double x = d / scale_;
    if (x == 0.0) {
        if (shape_ < 1.0) return std::numeric_limits<double>::infinity();
        return shape_ == 1.0 ? shape_ / scale_ : 0.0;
    }
    return (shape_ / scale_) * std::pow(x, shape_ - 1.0) * std::exp(-std::pow(x, shape_));
}

double FirstPassageModel::cdf(double d) const {
    if (d <= 0.0) return 0.0;
    if (law_ == PassageLaw::Exponential) return -std::expm1(-rate_ * d);
    return -std::expm1(-std::pow(d / scale_, shape_));
}

double FirstPassageModel::ccdf(double d) const {
    if (d <= 0.0) return 1.0;
    if (law_ == PassageLaw::Exponential) return std::exp(-rate_ * d);
    return std::exp(-std::pow(d / scale_, shape_));
}

double FirstPassageModel::quantile(double q) const {
    if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("quantile: q must lie in [0, 1)");
    const double u = -std::log1p(-q);
    if (law_ == PassageLaw::Exponential) return u / rate_;
    return scale_ * std::pow(u, 1.0 / shape_);
}

double FirstPassageModel::sample(RngStream& rng) const { return quantile(rng.uniform01()); }

EmissionMarginal EmissionMarginal::deadline_optimal(double rate, double tau) {
    if (!(rate > 0.0)) throw std::invalid_argument("EmissionMarginal: rate must be positive");
    if (!(tau > 0.0)) throw std::invalid_argument("EmissionMarginal: tau must be positive");
    EmissionMarginal m(Kind::DeadlineOptimal, rate, tau);
    const auto masses = m.deadline_masses();
    m.atoms_ = {{0.0, masses.at_zero}, {tau, masses.at_deadline}};
    return m;
}

EmissionMarginal EmissionMarginal::uniform(double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("EmissionMarginal: tau must be positive");
    return EmissionMarginal(Kind::Uniform, 0.0, tau);
}

EmissionMarginal EmissionMarginal::point(double location) {
    if (!(location >= 0.0)) throw std::invalid_argument("EmissionMarginal: location must be >= 0");
    EmissionMarginal m(Kind::Point, 0.0, location);
    m.atoms_ = {{location, 1.0}};
    return m;
}

DeadlineMasses EmissionMarginal::deadline_masses() const {
    if (kind_ != Kind::DeadlineOptimal)
        throw std::domain_error("deadline_masses: not a deadline-optimal marginal");
    const double lt = rate_ * tau_;
    const double denom = M_E + lt;
    return {1.0 / denom, lt / denom, (M_E - 1.0) / denom};
}

double EmissionMarginal::cdf(double t) const {
    switch (kind_) {
    case Kind::DeadlineOptimal: {
        if (t < 0.0) return 0.0;
        if (t >= tau_) return 1.0;
        const auto m = deadline_masses();
        return m.at_zero + m.uniform * (t / tau_);
    }
    case Kind::Uniform:
        if (t <= 0.0) return 0.0;
        return t >= tau_ ? 1.0 : t / tau_;
    case Kind::Point:
        return t >= tau_ ? 1.0 : 0.0;
    }
    return 0.0;
}

double EmissionMarginal::density(double t) const {
    switch (kind_) {
    case Kind::DeadlineOptimal:
        return (t > 0.0 && t < tau_) ? rate_ / (M_E + rate_ * tau_) : 0.0;
    case Kind::Uniform:
        return (t > 0.0 && t < tau_) ? 1.0 / tau_ : 0.0;
    case Kind::Point:
        return 0.0;
    }
    return 0.0;
}

double EmissionMarginal::sample(RngStream& rng) const {
    switch (kind_) {
    case Kind::DeadlineOptimal: {
        const auto m = deadline_masses();
        const double u = rng.uniform01();
        if (u < m.at_zero) return 0.0;
        if (u < m.at_zero + m.uniform) return rng.uniform01() * tau_;
        return tau_;
    }
    case Kind::Uniform:
        return rng.uniform01() * tau_;
    case Kind::Point:
        return tau_;
    }
    return 0.0;
}

double EmissionMarginal::phi(double t, const FirstPassageModel& model) const {
    if (t < 0.0) return 0.0;
    if (kind_ == Kind::DeadlineOptimal && model.is_exponential() && model.rate() == rate_) {
        const double denom = M_E + rate_ * tau_;
        if (t <= tau_) return 1.0 / denom;
        return (M_E / denom) * std::exp(-rate_ * (t - tau_));
    }
    double acc = 0.0;
    for (const auto& atom : atoms_)
        if (atom.location <= t) acc += atom.mass * model.ccdf(t - atom.location);
    const double hi = std::min(t, tau_);
    if (hi > 0.0 && kind_ != Kind::Point)
        acc += integrate([&](double x) { return density(x) * model.ccdf(t - x); }, 0.0, hi);
    return acc;
}

double EmissionMarginal::phi_below(double t, const FirstPassageModel& model) const {
    if (t <= 0.0) return 0.0;
    double acc = 0.0;
    for (const auto& atom : atoms_)
        if (atom.location < t) acc += atom.mass * model.ccdf(t - atom.location);
    const double hi = std::min(t, tau_);
    if (hi > 0.0 && kind_ != Kind::Point)
        acc += integrate([&](double x) { return density(x) * model.ccdf(t - x); }, 0.0, hi);
    return acc;
}

double EmissionMarginal::expect(const std::function<double(double, double, double)>& h,
                                const FirstPassageModel& model, int fold_points) const {
    double acc = 0.0;
    // Atom folds: sweep the atom's own mass linearly through both F and phi.
    for (const auto& atom : atoms_) {
        const double f_below = cdf(atom.location) - atom.mass;
        const double p_below = phi_below(atom.location, model);
        const double w = atom.mass;
        acc += w * gauss_legendre01(
                       [&](double u) { return h(atom.location, f_below + w * u, p_below + w * u); },
                       fold_points);
    }
    // Absolutely continuous part.
    if (kind_ != Kind::Point)
        acc += integrate(
            [&](double t) { return density(t) * h(t, cdf(t), phi_below(t, model)); }, 0.0, tau_);
    return acc;
}

EmissionSchedule sample_emissions(const EmissionMarginal& marginal, int m, RngStream& rng) {
    if (m < 1) throw std::invalid_argument("sample_emissions: need at least one emission");
    EmissionSchedule schedule;
    schedule.deadline = marginal.deadline();
    schedule.times.resize(static_cast<std::size_t>(m));
    for (auto& t : schedule.times) t = marginal.sample(rng);
    return schedule;
}

double expected_phi_pow(const EmissionMarginal& marginal, int k) {
    if (k < 0) throw std::invalid_argument("expected_phi_pow: k must be >= 0");
    if (marginal.kind() != EmissionMarginal::Kind::DeadlineOptimal)
        throw std::domain_error("expected_phi_pow: closed form requires the deadline-optimal marginal");
    const double lt = marginal.lambda_tau();
    const double b = 1.0 / (M_E + lt);
    return std::pow(b, k + 1) * (lt + std::exp(static_cast<double>(k + 1)) / (k + 1));
}

double order_stat_density_iid(const EmissionMarginal& marginal, int m_total, int m, double t) {
    if (m < 0 || m > m_total - 1)
        throw std::invalid_argument("order_stat_density_iid: index out of range");
    const double f = marginal.cdf(t);
    return (m + 1) * binomial(m_total, m + 1) * marginal.density(t) * std::pow(f, m) *
           std::pow(1.0 - f, m_total - m - 1);
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    if (k > n - k) k = n - k;
    double result = 1.0;
    for (int i = 1; i <= k; ++i) result = result * (n - k + i) / i;
    return result;
}

} // namespace qrtc
