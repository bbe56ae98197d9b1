#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "core/permutation.hpp"
#include "core/rng.hpp"

using namespace qrtc;

namespace {

std::vector<double> random_vec(RngStream& rng, int m, double scale) {
    std::vector<double> v(static_cast<std::size_t>(m));
    for (auto& x : v) x = rng.uniform01() * scale;
    return v;
}

std::vector<double> arrivals_for(const std::vector<double>& t, RngStream& rng, double rate,
                                 double shift) {
    std::vector<double> s(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        s[i] = t[i] - std::log1p(-rng.uniform01()) / rate - shift;
    return s;
}

} // namespace

TEST_CASE("count_admissible: worked instances") {
    CHECK(count_admissible(std::vector{0.0}, std::vector{0.5}).exact == 1);
    // identical emissions admit every permutation
    CHECK(count_admissible(std::vector{0.0, 0.0, 0.0}, std::vector{0.5, 1.5, 2.5}).exact == 6);
    // staggered emissions force the unique causal matching
    CHECK(count_admissible(std::vector{0.0, 1.0, 2.0}, std::vector{0.5, 1.5, 2.5}).exact == 1);
    // no arrival can serve the emission at 3: no causal matching at all
    const auto none = count_admissible(std::vector{0.0, 3.0}, std::vector{1.0, 2.0});
    CHECK(none.exact == 0);
    CHECK(std::isinf(none.log_count));
    CHECK(none.log_count < 0.0);
    // arrival tied with an emission counts as causal (u(0) = 1)
    CHECK(count_admissible(std::vector{0.0, 1.0}, std::vector{1.0, 2.0}).exact == 2);
    CHECK_THROWS_AS(count_admissible(std::vector{0.0, 1.0}, std::vector{1.0}),
                    std::invalid_argument);
}

TEST_CASE("enumerate_admissible: worked instances, order, cap") {
    const auto both = enumerate_admissible(std::vector{0.0, 0.0}, std::vector{1.0, 2.0});
    REQUIRE(both.size() == 2);
    CHECK(both[0] == std::vector<int>{0, 1});  // lexicographic
    CHECK(both[1] == std::vector<int>{1, 0});
    CHECK(enumerate_admissible(std::vector{0.0, 3.0}, std::vector{1.0, 2.0}).empty());
    const std::vector<double> nine(9, 0.0);
    CHECK_THROWS_AS(enumerate_admissible(nine, nine), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_admissible(std::vector{0.0}, std::vector{1.0, 2.0}),
                    std::invalid_argument);
}

TEST_CASE("product formula equals exhaustive enumeration on random instances") {
    RngStream rng(101);
    for (int m = 2; m <= 7; ++m) {
        for (int i = 0; i < 300; ++i) {
            const auto t = random_vec(rng, m, 1.0);
            const auto s = arrivals_for(t, rng, 3.0, i % 2 == 0 ? 0.0 : 0.25);
            const auto counted = count_admissible(t, s);
            CHECK(counted.exact == enumerate_admissible(t, s).size());
        }
    }
}

TEST_CASE("count is invariant under shuffling of either input") {
    RngStream rng(477);
    for (int i = 0; i < 200; ++i) {
        const int m = 2 + static_cast<int>(rng.uniform01() * 5.0);
        auto t = random_vec(rng, m, 1.0);
        auto s = arrivals_for(t, rng, 2.0, 0.0);
        const auto reference = count_admissible(t, s).exact;
        for (int k = 0; k < 3; ++k) {
            // Fisher-Yates shuffle
            for (int j = m - 1; j > 0; --j) {
                std::swap(t[static_cast<std::size_t>(j)],
                          t[static_cast<std::size_t>(rng.uniform01() * (j + 1))]);
                std::swap(s[static_cast<std::size_t>(j)],
                          s[static_cast<std::size_t>(rng.uniform01() * (j + 1))]);
            }
            CHECK(count_admissible(t, s).exact == reference);
        }
    }
}

TEST_CASE("bin occupancy invariants") {
    const std::vector<double> t{0.0, 0.5, 1.5, 2.0};
    const std::vector<double> s{0.6, 0.7, 1.8, 3.0};
    const auto occ = BinOccupancy::from_sorted(t, s);
    CHECK(occ.below_first == 0);
    CHECK(std::accumulate(occ.sigma.begin(), occ.sigma.end(), 0) == 4);
    for (std::size_t m = 1; m < occ.eta.size(); ++m) CHECK(occ.eta[m] >= occ.eta[m - 1]);
    CHECK(occ.eta.back() == 4);
    CHECK(occ.admissible());
    // an arrival before every emission is inadmissible
    const auto bad = BinOccupancy::from_sorted(std::vector{1.0, 2.0}, std::vector{0.5, 2.5});
    CHECK(bad.below_first == 1);
    CHECK(!bad.admissible());
}

TEST_CASE("exponential passage: conditional PMF is uniform over the support") {
    const auto model = FirstPassageModel::exponential(1.3);
    RngStream rng(2029);
    double worst = 0.0;
    for (int i = 0; i < 400; ++i) {
        const int m = 2 + i % 5;
        auto t = random_vec(rng, m, 2.0);
        if (i % 3 == 0) t[0] = t[1];  // duplicated emissions stay fine
        auto s = arrivals_for(t, rng, 1.3, 0.0);
        std::sort(s.begin(), s.end());
        const auto pmf = perm_pmf(model, t, s);
        const auto [lo, hi] = std::minmax_element(pmf.probs.begin(), pmf.probs.end());
        worst = std::max(worst, *hi - *lo);
        const double total = std::accumulate(pmf.probs.begin(), pmf.probs.end(), 0.0);
        CHECK(std::abs(total - 1.0) < 1e-12);

        auto ts = t;
        std::sort(ts.begin(), ts.end());
        const auto counted = count_admissible(ts, s);
        CHECK(pmf.support.size() == counted.exact);
        CHECK(std::abs(perm_entropy(model, t, s) - counted.log_count) < 1e-12);
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("single quantum: one permutation with probability one, zero entropy") {
    const auto model = FirstPassageModel::exponential(1.0);
    const auto pmf = perm_pmf(model, std::vector{0.2}, std::vector{0.9});
    REQUIRE(pmf.probs.size() == 1);
    CHECK(pmf.probs[0] == 1.0);
    CHECK(perm_entropy(model, std::vector{0.2}, std::vector{0.9}) == 0.0);
}

TEST_CASE("coincident emissions: uniform over all 3! permutations, entropy log 6") {
    const auto model = FirstPassageModel::exponential(1.0);
    const std::vector<double> t{0.0, 0.0, 0.0};
    const std::vector<double> s{0.5, 1.5, 2.5};
    CHECK(perm_entropy(model, t, s) == doctest::Approx(std::log(6.0)).epsilon(1e-12));
}

TEST_CASE("PMF support equals the admissible set on continuous instances") {
    // away from exact arrival/emission ties, every admissible matching has a
    // strictly positive density product, for any of the laws
    RngStream rng(5150);
    for (const auto& model :
         {FirstPassageModel::exponential(1.0), FirstPassageModel::weibull(1.0, 2.0)}) {
        for (int i = 0; i < 150; ++i) {
            const int m = 2 + i % 4;
            const auto t = random_vec(rng, m, 1.5);
            auto s = arrivals_for(t, rng, 1.0, 0.0);
            std::sort(s.begin(), s.end());
            const auto pmf = perm_pmf(model, t, s);
            CHECK(pmf.support.size() == count_admissible(t, s).exact);
        }
    }
}

TEST_CASE("non-exponential PMF matches the direct density-product oracle") {
    const auto model = FirstPassageModel::weibull(1.0, 2.0);
    const std::vector<double> t{0.0, 0.5};
    const std::vector<double> s{1.0, 2.0};
    const auto pmf = perm_pmf(model, t, s);
    const double w_id = model.density(1.0 - 0.0) * model.density(2.0 - 0.5);
    const double w_sw = model.density(2.0 - 0.0) * model.density(1.0 - 0.5);
    REQUIRE(pmf.probs.size() == 2);
    CHECK(pmf.probs[0] == doctest::Approx(w_id / (w_id + w_sw)).epsilon(1e-12));
    CHECK(pmf.probs[1] == doctest::Approx(w_sw / (w_id + w_sw)).epsilon(1e-12));

    const double h = perm_entropy(model, t, s);
    const double cap = count_admissible(t, s).log_count;
    CHECK(h < cap);  // Theorem-3 strictness away from the exponential law
}

TEST_CASE("entropy chain 0 <= H <= log|Omega| <= log M! on random instances") {
    RngStream rng(8088);
    const auto weibull = FirstPassageModel::weibull(1.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        const int m = 2 + i % 4;
        const auto t = random_vec(rng, m, 1.5);
        auto s = arrivals_for(t, rng, 1.0, 0.0);
        std::sort(s.begin(), s.end());
        const double cap = count_admissible(t, s).log_count;
        const double h = perm_entropy(weibull, t, s);
        CHECK(h >= 0.0);
        CHECK(h <= cap + 1e-12);
        CHECK(cap <= std::lgamma(m + 1.0) + 1e-12);
    }
}

TEST_CASE("perm_pmf error paths") {
    const auto weibull = FirstPassageModel::weibull(1.0, 2.0);
    // the only admissible matching carries zero density (g(0) = 0 for shape > 1)
    CHECK_THROWS_AS(perm_pmf(weibull, std::vector{0.0}, std::vector{0.0}), std::domain_error);
    const auto expmod = FirstPassageModel::exponential(1.0);
    CHECK_THROWS_AS(perm_pmf(expmod, std::vector{0.0, 3.0}, std::vector{1.0, 2.0}),
                    std::domain_error);
    CHECK_THROWS_AS(perm_pmf(expmod, std::vector{0.0, 0.0}, std::vector{2.0, 1.0}),
                    std::invalid_argument);  // arrivals must arrive sorted
}

TEST_CASE("exact counts in 64 bits up to M = 20, log-space beyond") {
    const std::vector<double> t20(20, 0.0);
    std::vector<double> s20(20);
    for (int i = 0; i < 20; ++i) s20[static_cast<std::size_t>(i)] = i + 1.0;
    const auto twenty = count_admissible(t20, s20);
    CHECK(twenty.exact_valid);
    CHECK(twenty.exact == 2432902008176640000ULL);  // 20!
    CHECK(twenty.log_count == doctest::Approx(std::lgamma(21.0)).epsilon(1e-12));

    const std::vector<double> t25(25, 0.0);
    std::vector<double> s25(25);
    for (int i = 0; i < 25; ++i) s25[static_cast<std::size_t>(i)] = i + 1.0;
    const auto twenty_five = count_admissible(t25, s25);
    CHECK(!twenty_five.exact_valid);
    CHECK(twenty_five.log_count == doctest::Approx(std::lgamma(26.0)).epsilon(1e-12));
}
