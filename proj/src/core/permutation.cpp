#include "core/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qrtc {

namespace {

constexpr int kEnumerationCap = 8;  // 8! = 40320

std::vector<double> sorted_copy(std::span<const double> v) {
    std::vector<double> out(v.begin(), v.end());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

BinOccupancy BinOccupancy::from_sorted(std::span<const double> t_sorted,
                                       std::span<const double> s_sorted) {
    const int m_total = static_cast<int>(t_sorted.size());
    BinOccupancy occ;
    occ.sigma.assign(m_total, 0);
    occ.eta.assign(m_total, 0);
    for (double s : s_sorted) {
        if (s < t_sorted[0]) {
            ++occ.below_first;
            continue;
        }
        // bin index: largest m with t_m <= s; a tie s == t_m is causal (u(0) = 1)
        const int bin = static_cast<int>(std::upper_bound(t_sorted.begin(), t_sorted.end(), s) -
                                         t_sorted.begin()) - 1;
        ++occ.sigma[bin];
    }
    int cum = 0;
    for (int m = 0; m < m_total; ++m) {
        cum += occ.sigma[m];
        occ.eta[m] = cum;
    }
    return occ;
}

bool BinOccupancy::admissible() const {
    if (below_first > 0) return false;
    for (std::size_t m = 0; m + 1 < eta.size(); ++m)
        if (eta[m] > static_cast<int>(m) + 1) return false;
    return true;
}

AdmissibleCount count_admissible(std::span<const double> t, std::span<const double> s) {
    if (t.size() != s.size())
        throw std::invalid_argument("count_admissible: emission and arrival vectors differ in length");
    if (t.empty()) throw std::invalid_argument("count_admissible: need at least one quantum");
    const auto ts = sorted_copy(t);
    const auto ss = sorted_copy(s);
    const auto occ = BinOccupancy::from_sorted(ts, ss);
    const int m_total = static_cast<int>(ts.size());
    AdmissibleCount out{0.0, 1, m_total <= 20};
    if (!occ.admissible()) return {-std::numeric_limits<double>::infinity(), 0, true};
    for (int m = 1; m <= m_total - 1; ++m) {
        const int factor = m + 1 - occ.eta[m - 1];
        out.log_count += std::log(static_cast<double>(factor));
        if (out.exact_valid) out.exact *= static_cast<std::uint64_t>(factor);
    }
    if (!out.exact_valid) out.exact = 0;
    return out;
}

std::vector<std::vector<int>> enumerate_admissible(std::span<const double> t,
                                                   std::span<const double> s) {
    if (t.size() != s.size())
        throw std::invalid_argument("enumerate_admissible: emission and arrival vectors differ in length");
    const int m_total = static_cast<int>(t.size());
    if (m_total < 1) throw std::invalid_argument("enumerate_admissible: need at least one quantum");
    if (m_total > kEnumerationCap)
        throw std::invalid_argument("enumerate_admissible: exhaustive enumeration capped at M = 8");
    const auto ts = sorted_copy(t);
    const auto ss = sorted_copy(s);
    std::vector<int> perm(m_total);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        bool ok = true;
        for (int m = 0; m < m_total; ++m) {
            if (ss[perm[m]] < ts[m]) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

PermutationPMF perm_pmf(const FirstPassageModel& model, std::span<const double> t,
                        std::span<const double> s_sorted) {
    if (t.size() != s_sorted.size())
        throw std::invalid_argument("perm_pmf: emission and arrival vectors differ in length");
    const int m_total = static_cast<int>(t.size());
    if (m_total < 1) throw std::invalid_argument("perm_pmf: need at least one quantum");
    if (m_total > kEnumerationCap)
        throw std::invalid_argument("perm_pmf: exact enumeration capped at M = 8");
    if (!std::is_sorted(s_sorted.begin(), s_sorted.end()))
        throw std::invalid_argument("perm_pmf: arrivals must be sorted ascending");

    std::vector<int> perm(m_total);
    std::iota(perm.begin(), perm.end(), 0);
    PermutationPMF pmf;
    std::vector<double> log_weights;
    double max_log = -std::numeric_limits<double>::infinity();
    do {
        double lw = 0.0;
        for (int m = 0; m < m_total; ++m) {
            const double g = model.density(s_sorted[perm[m]] - t[m]);
            if (g <= 0.0) {
                lw = -std::numeric_limits<double>::infinity();
                break;
            }
            lw += std::log(g);
        }
        if (lw > -std::numeric_limits<double>::infinity()) {
            pmf.support.push_back(perm);
            log_weights.push_back(lw);
            max_log = std::max(max_log, lw);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    if (pmf.support.empty())
        throw std::domain_error("perm_pmf: no admissible permutation for this (t, s) pair");
    double total = 0.0;
    pmf.probs.resize(log_weights.size());
    for (std::size_t i = 0; i < log_weights.size(); ++i) {
        pmf.probs[i] = std::exp(log_weights[i] - max_log);
        total += pmf.probs[i];
    }
    for (auto& p : pmf.probs) p /= total;
    return pmf;
}

double perm_entropy(const FirstPassageModel& model, std::span<const double> t,
                    std::span<const double> s_sorted) {
    const auto pmf = perm_pmf(model, t, s_sorted);
    double h = 0.0;
    for (double p : pmf.probs)
        if (p > 0.0) h -= p * std::log(p);
    return h;
}

} // namespace qrtc
