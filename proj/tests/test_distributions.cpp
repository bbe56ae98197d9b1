#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "core/distributions.hpp"
#include "core/quadrature.hpp"
#include "core/rng.hpp"

using namespace qrtc;

namespace {

double sample_mean(std::vector<double>& values, double& stderr_out) {
    double s = 0.0, s2 = 0.0;
    for (double v : values) {
        s += v;
        s2 += v * v;
    }
    const double n = static_cast<double>(values.size());
    const double mean = s / n;
    stderr_out = std::sqrt(std::max(0.0, s2 / n - mean * mean) / n);
    return mean;
}

// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                                 static_cast<double>(j) / b.size()));
    }
    return d;
}

} // namespace

TEST_CASE("first-passage laws: causality and distribution identities") {
    const auto models = {FirstPassageModel::exponential(2.0), FirstPassageModel::weibull(1.0, 2.0),
                         FirstPassageModel::weibull(0.5, 3.0)};
    for (const auto& model : models) {
        CHECK(model.density(-1.0) == 0.0);
        CHECK(model.cdf(0.0) == 0.0);
        CHECK(model.ccdf(0.0) == 1.0);
        CHECK(model.cdf(1e6 / model.rate()) == doctest::Approx(1.0).epsilon(1e-12));
        double prev = 0.0;
        for (double d = 0.0; d <= 8.0; d += 0.25) {
            const double f = model.cdf(d);
            CHECK(f >= prev);
            CHECK(std::abs(model.ccdf(d) - (1.0 - f)) < 1e-12);
            prev = f;
        }
    }
}

TEST_CASE("inverse CDF round trip and the q = 0 edge") {
    for (const auto& model :
         {FirstPassageModel::exponential(2.0), FirstPassageModel::weibull(1.0, 2.0),
          FirstPassageModel::weibull(0.5, 3.0)}) {
        CHECK(model.quantile(0.0) == 0.0);
        for (double q = 0.05; q < 1.0; q += 0.05)
            CHECK(std::abs(model.cdf(model.quantile(q)) - q) < 1e-10);
        CHECK_THROWS_AS(model.quantile(1.0), std::invalid_argument);
        CHECK_THROWS_AS(model.quantile(-0.1), std::invalid_argument);
    }
}

TEST_CASE("exponential sampler mean at rate 2") {
    const auto model = FirstPassageModel::exponential(2.0);
    RngStream rng(17);
    std::vector<double> draws(1000000);
    for (auto& d : draws) d = model.sample(rng);
    double se = 0.0;
    const double mean = sample_mean(draws, se);
    CHECK(std::abs(mean - 0.5) < 3.0 * se);
    CHECK(*std::min_element(draws.begin(), draws.end()) >= 0.0);
}

TEST_CASE("weibull shape 1 reduces to the exponential law") {
    const auto wb = FirstPassageModel::weibull(1.0, 1.0);
    const auto ex = FirstPassageModel::exponential(1.0);
    RngStream rng(99);
    std::vector<double> a(100000), b(100000);
    for (auto& v : a) v = wb.sample(rng);
    for (auto& v : b) v = ex.sample(rng);
    CHECK(ks_distance(a, b) < 0.01);
}

TEST_CASE("mean by quadrature of the CCDF matches the analytic mean") {
    for (const auto& model :
         {FirstPassageModel::exponential(0.7), FirstPassageModel::weibull(2.0, 2.0),
          FirstPassageModel::weibull(1.0, 1.5)}) {
        const double upper = model.quantile(1.0 - 1e-12);
        const double mean =
            integrate([&](double x) { return model.ccdf(x); }, 0.0, upper);
        CHECK(std::abs(mean - model.mean()) / model.mean() < 1e-6);
    }
}

TEST_CASE("deadline-optimal masses: identity and positivity across the lambda*tau grid") {
    for (int i = 0; i <= 64; ++i) {
        const double lt = std::pow(10.0, -3.0 + 6.0 * i / 64.0);
        const auto marginal = EmissionMarginal::deadline_optimal(1.0, lt);
        const auto m = marginal.deadline_masses();
        CHECK(m.at_zero > 0.0);
        CHECK(m.uniform > 0.0);
        CHECK(m.at_deadline > 0.0);
        CHECK(std::abs(m.at_zero + m.uniform + m.at_deadline - 1.0) < 1e-15);
    }
    // large tau sends the deadline atom to zero
    CHECK(EmissionMarginal::deadline_optimal(1.0, 1e9).deadline_masses().at_deadline < 2e-9);
}

TEST_CASE("sample_emissions: support, atom frequency, M = 0 rejected") {
    const auto marginal = EmissionMarginal::deadline_optimal(1.0, M_E);  // lambda*tau = e
    RngStream rng(5);
    CHECK_THROWS_AS(sample_emissions(marginal, 0, rng), std::invalid_argument);
    const int n = 1000000;
    int at_zero = 0;
    for (int i = 0; i < n; ++i) {
        const double t = marginal.sample(rng);
        REQUIRE(t >= 0.0);
        REQUIRE(t <= marginal.deadline());
        at_zero += t == 0.0;
    }
    const double p_hat = static_cast<double>(at_zero) / n;
    const double p0 = 1.0 / (2.0 * M_E);
    const double se = std::sqrt(p0 * (1.0 - p0) / n);
    CHECK(std::abs(p_hat - p0) < 3.0 * se);

    const auto schedule = sample_emissions(marginal, 16, rng);
    CHECK(schedule.times.size() == 16);
    CHECK(schedule.deadline == marginal.deadline());
}

TEST_CASE("phi: closed-form branches against the defining convolution") {
    const double lt = 1.0;
    const auto marginal = EmissionMarginal::deadline_optimal(1.0, lt);
    const auto model = FirstPassageModel::exponential(1.0);
    const double tau = marginal.deadline();
    const auto masses = marginal.deadline_masses();

    CHECK(marginal.phi(tau / 2.0, model) == doctest::Approx(1.0 / (M_E + 1.0)).epsilon(1e-15));
    CHECK(marginal.phi(-1.0, model) == 0.0);

    // quadrature oracle over the mixed measure at interior grid points
    auto convolution = [&](double t) {
        double acc = 0.0;
        for (const auto& atom : marginal.atoms())
            if (atom.location < t) acc += atom.mass * model.ccdf(t - atom.location);
        acc += integrate([&](double x) { return marginal.density(x) * model.ccdf(t - x); }, 0.0,
                         std::min(t, tau));
        return acc;
    };
    for (int i = 0; i < 20; ++i) {
        const double t = (i + 0.5) * tau / 20.0;
        CHECK(std::abs(marginal.phi(t, model) - convolution(t)) < 1e-9);
    }
    for (double t : {1.2 * tau, 2.0 * tau, 5.0 * tau})
        CHECK(std::abs(marginal.phi(t, model) - convolution(t)) < 1e-9);

    // The t > tau branch exp(-lambda (t - tau)) continues the atom-inclusive
    // convolution from the right; the jump at tau is exactly the deadline atom.
    const double just_above = tau * (1.0 + 1e-12);
    CHECK(marginal.phi(just_above, model) ==
          doctest::Approx(M_E / (M_E + lt)).epsilon(1e-9));
    CHECK(marginal.phi(just_above, model) - marginal.phi(tau, model) ==
          doctest::Approx(masses.at_deadline).epsilon(1e-9));
}

TEST_CASE("expected_phi_pow: normalization, paper point, Monte Carlo oracle") {
    for (double lt : {1e-3, 0.5, 1.0, M_E, 10.0, 1e3}) {
        const auto marginal = EmissionMarginal::deadline_optimal(1.0, lt);
        CHECK(expected_phi_pow(marginal, 0) == doctest::Approx(1.0).epsilon(1e-14));
    }
    {
        const auto marginal = EmissionMarginal::deadline_optimal(1.0, 1.0);
        const double want = std::pow(1.0 / (M_E + 1.0), 2) * (1.0 + M_E * M_E / 2.0);
        CHECK(expected_phi_pow(marginal, 1) == doctest::Approx(want).epsilon(1e-15));
        CHECK_THROWS_AS(expected_phi_pow(marginal, -1), std::invalid_argument);
    }

    // MC with the folded value at each atom: the average of phi^k along the jump.
    const double lt = M_E;
    const auto marginal = EmissionMarginal::deadline_optimal(1.0, lt);
    const auto masses = marginal.deadline_masses();
    const double b = 1.0 / (M_E + lt);
    RngStream rng(31);
    for (int k : {1, 2, 3}) {
        auto folded = [&](double lo, double hi) {
            return (std::pow(hi, k + 1) - std::pow(lo, k + 1)) / ((k + 1) * (hi - lo));
        };
        const double v0 = folded(0.0, b);
        const double vt = folded(b, M_E * b);
        const double vu = std::pow(b, k);
        std::vector<double> vals(1000000);
        for (auto& v : vals) {
            const double u = rng.uniform01();
            v = u < masses.at_zero ? v0 : (u < masses.at_zero + masses.uniform ? vu : vt);
        }
        double se = 0.0;
        const double mean = sample_mean(vals, se);
        CHECK(std::abs(mean - expected_phi_pow(marginal, k)) < 3.0 * se);
    }
}

TEST_CASE("order-statistic density: examples, normalization, distinct-order identity") {
    const auto uniform01 = EmissionMarginal::uniform(1.0);
    // single draw: the marginal itself
    CHECK(order_stat_density_iid(uniform01, 1, 0, 0.3) ==
          doctest::Approx(uniform01.density(0.3)).epsilon(1e-15));
    // min of two uniforms on [0,1]: density 2(1-t)
    CHECK(order_stat_density_iid(uniform01, 2, 0, 0.5) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(order_stat_density_iid(uniform01, 2, 2, 0.5), std::invalid_argument);

    for (int m = 0; m < 5; ++m) {
        const double total = integrate(
            [&](double t) { return order_stat_density_iid(uniform01, 5, m, t); }, 0.0, 1.0);
        CHECK(std::abs(total - 1.0) < 1e-6);
    }
    for (double t : {0.1, 0.37, 0.9}) {
        double sum = 0.0;
        for (int m = 0; m < 5; ++m) sum += order_stat_density_iid(uniform01, 5, m, t);
        CHECK(std::abs(sum - 5.0 * uniform01.density(t)) < 1e-9);
    }
    // identity also holds on the continuous part of the deadline marginal
    const auto deadline = EmissionMarginal::deadline_optimal(1.0, 2.0);
    for (double t : {0.5, 1.0, 1.7}) {
        double sum = 0.0;
        for (int m = 0; m < 4; ++m) sum += order_stat_density_iid(deadline, 4, m, t);
        CHECK(std::abs(sum - 4.0 * deadline.density(t)) < 1e-9);
    }
}

TEST_CASE("marginal constructors reject bad parameters") {
    CHECK_THROWS_AS(FirstPassageModel::exponential(0.0), std::invalid_argument);
    CHECK_THROWS_AS(FirstPassageModel::weibull(1.0, -2.0), std::invalid_argument);
    CHECK_THROWS_AS(EmissionMarginal::deadline_optimal(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(EmissionMarginal::uniform(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(EmissionMarginal::point(-0.5), std::invalid_argument);
}
