#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/distributions.hpp"

namespace qrtc {

/// Per-bin arrival counts for sorted emissions t and arrivals s.
/// Bin m covers [t_m, t_{m+1}) with t_{M+1} = infinity; an arrival equal to an
/// emission time counts as causal (u(0) = 1), so it lands in the later bin.
struct BinOccupancy {
    std::vector<int> sigma;  // arrivals per bin
    std::vector<int> eta;    // cumulative counts, eta[m-1] = sum_{j<=m} sigma_j
    int below_first = 0;     // arrivals strictly before the earliest emission

    static BinOccupancy from_sorted(std::span<const double> t_sorted,
                                    std::span<const double> s_sorted);

    /// True when a causal matching exists: nothing arrives before every
    /// emission and eta_m <= m for all m.
    bool admissible() const;
};

struct AdmissibleCount {
    double log_count;          // log |Omega|; -inf when no matching exists
    std::uint64_t exact;       // exact count, valid for M <= 20
    bool exact_valid;
};

/// Number of causal permutations |Omega| = prod_{m=1}^{M-1} (m + 1 - eta_m).
/// Inputs may be given in any order; the count depends only on the multisets.
AdmissibleCount count_admissible(std::span<const double> t, std::span<const double> s);

/// Exhaustive list of causal assignments for M <= 8, in lexicographic order.
/// Entry p maps emission slot m to the arrival with sorted index p[m].
std::vector<std::vector<int>> enumerate_admissible(std::span<const double> t,
                                                   std::span<const double> s);

/// Conditional law of the sorting permutation given (s_sorted, t):
/// Prob(p) proportional to prod_m g(s_sorted[p[m]] - t[m]).
struct PermutationPMF {
    std::vector<std::vector<int>> support;  // lexicographic order
    std::vector<double> probs;
};

PermutationPMF perm_pmf(const FirstPassageModel& model, std::span<const double> t,
                        std::span<const double> s_sorted);

/// Shannon entropy (nats) of perm_pmf; equals log |Omega| iff passage is exponential.
double perm_entropy(const FirstPassageModel& model, std::span<const double> t,
                    std::span<const double> s_sorted);

} // namespace qrtc
