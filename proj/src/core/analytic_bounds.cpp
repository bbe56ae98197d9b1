#include "core/analytic_bounds.hpp"

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace qrtc {

namespace {

double ipow(double x, int n) {
    double acc = 1.0;
    for (int i = 0; i < n; ++i) acc *= x;
    return acc;
}

double log_factorial(double k) { return std::lgamma(k + 1.0); }

/// Kahan-compensated accumulator.
struct Accumulator {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

// E[w(K) log K!] with w(k) = 1 or k, binomial or Poisson-limit path.
double binom_expect_weighted(std::int64_t trials, double p, bool weight_k) {
    if (trials < 0) throw std::invalid_argument("binom_expect: trials must be >= 0");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("binom_expect: p must lie in [0, 1]");
    if (p == 0.0 || trials == 0) return 0.0;
    if (p == 1.0) {
        const double lf = log_factorial(static_cast<double>(trials));
        return weight_k ? trials * lf : lf;
    }
    Accumulator acc;
    if (trials <= 100000) {
        const double n = static_cast<double>(trials);
        const double lg_n = std::lgamma(n + 1.0);
        const double lp = std::log(p);
        const double lq = std::log1p(-p);
        const double mode = n * p;
        for (std::int64_t k = 0; k <= trials; ++k) {
            const double kd = static_cast<double>(k);
            const double lpmf = lg_n - std::lgamma(kd + 1.0) - std::lgamma(n - kd + 1.0) +
                                kd * lp + (n - kd) * lq;
            if (k > 1) {
                const double term = std::exp(lpmf) * log_factorial(kd) * (weight_k ? kd : 1.0);
                acc.add(term);
                if (kd > mode + 1.0 && term < 1e-18 * std::abs(acc.sum) && term > 0.0) break;
            }
        }
        return acc.sum;
    }
    // Poisson limit with mean mu = trials * p, valid since p*trials is held
    // fixed as trials grows in every caller.
    const double mu = static_cast<double>(trials) * p;
    const double lmu = std::log(mu);
    const std::int64_t cap = static_cast<std::int64_t>(mu + 60.0 * std::sqrt(mu + 1.0) + 200.0);
    for (std::int64_t k = 2; k <= cap; ++k) {
        const double kd = static_cast<double>(k);
        const double lpmf = -mu + kd * lmu - std::lgamma(kd + 1.0);
        const double term = std::exp(lpmf) * log_factorial(kd) * (weight_k ? kd : 1.0);
        acc.add(term);
        if (kd > mu && term < 1e-18 * std::abs(acc.sum)) break;
    }
    return acc.sum;
}

// Moments E[phi^k] for k = 0..max_k via the fold-aware quadrature path.
std::vector<double> phi_moments(const EmissionMarginal& marginal, const FirstPassageModel& model,
                                int max_k) {
    std::vector<double> moments(static_cast<std::size_t>(max_k) + 1);
    for (int k = 0; k <= max_k; ++k) {
        moments[static_cast<std::size_t>(k)] = marginal.expect(
            [k](double, double, double phi) { return ipow(phi, k); }, model);
    }
    return moments;
}

double delta_gamma_from_moments(int m_total, int ell, std::span<const double> moments) {
    Accumulator acc;
    for (int r = 0; r <= m_total - ell - 1; ++r) {
        const double sign = (r % 2 == 0) ? 1.0 : -1.0;
        acc.add(sign * binomial(m_total - ell - 1, r) * (ell + r + 1) *
                moments[static_cast<std::size_t>(r + ell)]);
    }
    return binomial(m_total, ell + 1) * acc.sum;
}

void check_ell(int m_total, int ell) {
    if (m_total < 2) throw std::invalid_argument("need at least two quanta (M >= 2)");
    if (ell < 1 || ell > m_total - 1)
        throw std::invalid_argument("ell must lie in [1, M-1]");
}

} // namespace

BinomialMixture BinomialMixture::from_lambda_tau(std::int64_t m_total, double lambda_tau) {
    if (m_total < 1) throw std::invalid_argument("BinomialMixture: M must be >= 1");
    if (!(lambda_tau > 0.0)) throw std::invalid_argument("BinomialMixture: lambda*tau must be positive");
    return {m_total, M_E / (M_E + lambda_tau), 1.0 / (M_E + lambda_tau)};
}

double binom_expect_log_factorial(std::int64_t trials, double p) {
    return binom_expect_weighted(trials, p, false);
}

double binom_expect_k_log_factorial(std::int64_t trials, double p) {
    return binom_expect_weighted(trials, p, true);
}

double theta_bar_iid(const EmissionMarginal& marginal, const FirstPassageModel& model,
                     int m_total, int m, int ell) {
    check_ell(m_total, ell);
    if (m < ell || m > m_total - 1) throw std::invalid_argument("theta_bar_iid: need ell <= m <= M-1");
    const double coeff =
        m_total * binomial(m_total - 1, ell) * binomial(m_total - ell - 1, m - ell);
    const int tail = m_total - m - 1;
    const int mid = m - ell;
    return coeff * marginal.expect(
                       [&](double, double f, double phi) {
                           return ipow(1.0 - f, tail) * ipow(phi, ell) * ipow(f - phi, mid);
                       },
                       model);
}

double gamma_bar(const EmissionMarginal& marginal, const FirstPassageModel& model, int m_total,
                 int ell) {
    if (ell == m_total) return 0.0;
    check_ell(m_total, ell);
    const double coeff = m_total * binomial(m_total - 1, ell);
    const int tail = m_total - 1 - ell;
    return coeff * marginal.expect(
                       [&](double, double, double phi) {
                           return ipow(phi, ell) * ipow(1.0 - phi, tail);
                       },
                       model);
}

double delta_gamma_general(const EmissionMarginal& marginal, const FirstPassageModel& model,
                           int m_total, int ell) {
    check_ell(m_total, ell);
    const auto moments = phi_moments(marginal, model, m_total - 1);
    return delta_gamma_from_moments(m_total, ell, moments);
}

double delta_gamma_deadline(std::int64_t m_total, double lambda_tau, std::int64_t k) {
    if (m_total < 2) throw std::invalid_argument("delta_gamma_deadline: M must be >= 2");
    if (!(lambda_tau > 0.0))
        throw std::invalid_argument("delta_gamma_deadline: lambda*tau must be positive");
    if (k < 1 || k > m_total) throw std::invalid_argument("delta_gamma_deadline: k must lie in [1, M]");
    const auto mix = BinomialMixture::from_lambda_tau(m_total, lambda_tau);
    const double n = static_cast<double>(m_total);
    const double kd = static_cast<double>(k);
    const double lg = std::lgamma(n + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(n - kd + 1.0);
    const double lpmf1 = lg + kd * std::log(mix.p1) + (n - kd) * std::log1p(-mix.p1);
    const double lpmf2 = lg + kd * std::log(mix.p2) + (n - kd) * std::log1p(-mix.p2);
    return std::exp(lpmf1) +
           (lambda_tau / (1.0 - mix.p2)) * (kd - n * mix.p2) * std::exp(lpmf2);
}

double h_up(const EmissionMarginal& marginal, const FirstPassageModel& model, int m_total) {
    if (m_total < 1) throw std::invalid_argument("h_up: M must be >= 1");
    if (m_total == 1) return 0.0;
    const auto moments = phi_moments(marginal, model, m_total - 1);
    Accumulator acc;
    for (int ell = 1; ell <= m_total - 1; ++ell)
        acc.add(delta_gamma_from_moments(m_total, ell, moments) * log_factorial(ell + 1.0));
    return acc.sum;
}

double h_omega_exponential(std::int64_t m_total, double lambda_tau) {
    if (m_total < 1) throw std::invalid_argument("h_omega_exponential: M must be >= 1");
    if (!(lambda_tau > 0.0))
        throw std::invalid_argument("h_omega_exponential: lambda*tau must be positive");
    if (m_total == 1) return 0.0;
    const auto mix = BinomialMixture::from_lambda_tau(m_total, lambda_tau);
    const double mp2 = static_cast<double>(m_total) * mix.p2;
    return binom_expect_log_factorial(m_total, mix.p1) +
           (lambda_tau / (1.0 - mix.p2)) *
               (binom_expect_k_log_factorial(m_total, mix.p2) -
                mp2 * binom_expect_log_factorial(m_total, mix.p2));
}

double mi_ordered_lower(std::int64_t m_total, double lambda_tau) {
    if (m_total < 1) throw std::invalid_argument("mi_ordered_lower: M must be >= 1");
    if (!(lambda_tau > 0.0))
        throw std::invalid_argument("mi_ordered_lower: lambda*tau must be positive");
    const double n = static_cast<double>(m_total);
    return n * std::log1p(lambda_tau / M_E) - std::lgamma(n + 1.0) +
           h_omega_exponential(m_total, lambda_tau);
}

double cq_finite(std::int64_t m_total, double chi) {
    if (!(chi > 0.0)) throw std::invalid_argument("cq_finite: chi must be positive");
    if (m_total < 1) throw std::invalid_argument("cq_finite: M must be >= 1");
    return mi_ordered_lower(m_total, chi * static_cast<double>(m_total)) /
           static_cast<double>(m_total);
}

double cq_simple(double chi) {
    if (!(chi > 0.0)) throw std::invalid_argument("cq_simple: chi must be positive");
    return std::max(std::log(chi), 0.0);
}

SeriesBound cq_series(double chi, double rel_tol) {
    if (!(chi > 0.0)) throw std::invalid_argument("cq_series: chi must be positive");
    const double log_inv_chi = -std::log(chi);
    // terms only decay factorially beyond both the Poisson bulk at 1/chi and
    // the (k chi - 1) sign change; never truncate before that
    const int tail_start = static_cast<int>(std::ceil(1.0 / chi)) + 2;
    Accumulator acc;
    int k = 2;
    int tiny_run = 0;
    for (; k < 10000; ++k) {
        const double kd = static_cast<double>(k);
        const double lf = log_factorial(kd);
        // chi^{-k} (k chi - 1) log k! / k!, assembled in logs to dodge overflow
        const double magnitude =
            std::exp(kd * log_inv_chi + std::log(std::abs(kd * chi - 1.0)) + std::log(lf) - lf);
        const double term = (kd * chi >= 1.0) ? magnitude : -magnitude;
        acc.add(term);
        tiny_run = std::abs(term) < rel_tol * std::max(std::abs(acc.sum), 1e-300) ? tiny_run + 1
                                                                                  : 0;
        if (k > 4 && k >= tail_start && tiny_run >= 2) break;
    }
    const double raw = std::log(chi) + std::exp(-1.0 / chi) * acc.sum;
    return {raw, std::max(raw, 0.0), k};
}

double ct_bound(double lambda, double chi, CtVariant variant) {
    if (!(lambda > 0.0)) throw std::invalid_argument("ct_bound: lambda must be positive");
    if (!(chi > 0.0)) throw std::invalid_argument("ct_bound: chi must be positive");
    const double rho = lambda / chi;
    const double cq = variant == CtVariant::Simple ? cq_simple(chi) : cq_series(chi).clamped;
    return rho * cq;
}

BoundPoint evaluate_bound_point(double chi, std::int64_t quanta, double lambda,
                                CtVariant variant) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("evaluate_bound_point: lambda must be positive");
    BoundPoint point{chi, quanta, 0.0, 0.0};
    if (quanta == 0)
        point.cq = variant == CtVariant::Simple ? cq_simple(chi) : cq_series(chi).clamped;
    else
        point.cq = std::max(cq_finite(quanta, chi), 0.0);
    point.ct = (lambda / chi) * point.cq;
    return point;
}

} // namespace qrtc
