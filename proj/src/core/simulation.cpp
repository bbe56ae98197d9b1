#include "core/simulation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "core/analytic_bounds.hpp"
#include "core/permutation.hpp"

namespace qrtc {

namespace {

constexpr int kChunks = 64;  // fixed partitioning keeps means thread-count invariant

bool has_tie(const std::vector<double>& sorted) {
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
        if (sorted[i] == sorted[i + 1]) return true;
    return false;
}

/// Mean/stderr over n samples produced by a per-sample functor, accumulated in
/// kChunks fixed chunks with child streams so the result is independent of any
/// parallel execution of the chunks.
template <class PerSample>
EstimateReport chunked_estimate(std::int64_t n, std::uint64_t seed, PerSample&& per_sample) {
    std::array<double, kChunks> sums{}, sumsq{};
    std::array<std::int64_t, kChunks> counts{};
    for (int c = 0; c < kChunks; ++c) {
        const std::int64_t lo = n * c / kChunks;
        const std::int64_t hi = n * (c + 1) / kChunks;
        RngStream rng = RngStream::child(seed, static_cast<std::uint64_t>(c));
        double s = 0.0, s2 = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) {
            const double v = per_sample(rng);
            s += v;
            s2 += v * v;
        }
        sums[c] = s;
        sumsq[c] = s2;
        counts[c] = hi - lo;
    }
    double total = 0.0, total2 = 0.0;
    std::int64_t count = 0;
    for (int c = 0; c < kChunks; ++c) {
        total += sums[c];
        total2 += sumsq[c];
        count += counts[c];
    }
    EstimateReport report;
    report.samples = count;
    report.seed = seed;
    const double dn = static_cast<double>(count);
    report.mean = total / dn;
    if (count > 1) {
        const double var =
            std::max(0.0, (total2 - dn * report.mean * report.mean) / (dn - 1.0));
        report.std_error = std::sqrt(var / dn);
    }
    return report;
}

// ----- binned MI machinery for the M = 2 decomposition check -----

/// Equal-mass bin index for each value: edges at the (i*n/bins)-th order stats.
std::vector<int> equal_mass_bins(const std::vector<double>& values, int bins) {
    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    std::vector<double> edges;
    edges.reserve(static_cast<std::size_t>(bins) - 1);
    for (int b = 1; b < bins; ++b) edges.push_back(sorted[n * static_cast<std::size_t>(b) / bins]);
    std::vector<int> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = static_cast<int>(std::lower_bound(edges.begin(), edges.end(), values[i]) -
                                  edges.begin());
    return out;
}

struct BinnedMi {
    double plugin_mm = 0.0;              // Miller-Madow corrected estimate
    std::vector<double> per_sample;      // log(p_joint / (p_a p_b)) at each sample
};

/// Plug-in MI between integer labels with Miller-Madow correction.
BinnedMi binned_mi(const std::vector<int>& a, int na, const std::vector<int>& b, int nb) {
    const std::size_t n = a.size();
    std::vector<double> joint(static_cast<std::size_t>(na) * nb, 0.0);
    std::vector<double> pa(na, 0.0), pb(nb, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        joint[static_cast<std::size_t>(a[i]) * nb + b[i]] += 1.0;
        pa[a[i]] += 1.0;
        pb[b[i]] += 1.0;
    }
    const double dn = static_cast<double>(n);
    double mi = 0.0;
    int ka = 0, kb = 0, kab = 0;
    for (int i = 0; i < na; ++i) ka += pa[i] > 0.0;
    for (int j = 0; j < nb; ++j) kb += pb[j] > 0.0;
    for (int i = 0; i < na; ++i) {
        for (int j = 0; j < nb; ++j) {
            const double c = joint[static_cast<std::size_t>(i) * nb + j];
            if (c == 0.0) continue;
            ++kab;
            mi += (c / dn) * std::log(c * dn / (pa[i] * pb[j]));
        }
    }
    BinnedMi out;
    out.plugin_mm = mi + (ka + kb - kab - 1) / (2.0 * dn);
    out.per_sample.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = joint[static_cast<std::size_t>(a[i]) * nb + b[i]];
        out.per_sample[i] = std::log(c * dn / (pa[a[i]] * pb[b[i]]));
    }
    return out;
}

/// Product binning of a 2-d sample into g x g equal-mass cells per axis.
std::vector<int> grid_bins(const std::vector<double>& x, const std::vector<double>& y, int g) {
    const auto bx = equal_mass_bins(x, g);
    const auto by = equal_mass_bins(y, g);
    std::vector<int> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = bx[i] * g + by[i];
    return out;
}

template <class T>
std::vector<T> gather(const std::vector<T>& v, const std::vector<std::size_t>& idx) {
    std::vector<T> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(v[i]);
    return out;
}

} // namespace

ChannelUseSample simulate_channel_use(const EmissionMarginal& marginal,
                                      const FirstPassageModel& model, int m, RngStream& rng) {
    if (m < 1) throw std::invalid_argument("simulate_channel_use: need at least one quantum");
    ChannelUseSample use;
    use.t.resize(static_cast<std::size_t>(m));
    use.d.resize(static_cast<std::size_t>(m));
    use.s.resize(static_cast<std::size_t>(m));
    for (auto& t : use.t) t = marginal.sample(rng);
    do {
        for (int i = 0; i < m; ++i) {
            use.d[static_cast<std::size_t>(i)] = model.sample(rng);
            use.s[static_cast<std::size_t>(i)] =
                use.t[static_cast<std::size_t>(i)] + use.d[static_cast<std::size_t>(i)];
        }
        use.omega.resize(static_cast<std::size_t>(m));
        std::iota(use.omega.begin(), use.omega.end(), 0);
        std::sort(use.omega.begin(), use.omega.end(),
                  [&](int a, int b) { return use.s[static_cast<std::size_t>(a)] <
                                             use.s[static_cast<std::size_t>(b)]; });
        use.s_sorted.resize(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i)
            use.s_sorted[static_cast<std::size_t>(i)] =
                use.s[static_cast<std::size_t>(use.omega[static_cast<std::size_t>(i)])];
    } while (has_tie(use.s_sorted));
    return use;
}

EstimateReport estimate_h_omega(const EmissionMarginal& marginal, const FirstPassageModel& model,
                                int m, std::int64_t n, std::uint64_t seed) {
    if (m < 1 || m > 8)
        throw std::invalid_argument("estimate_h_omega: exact per-sample PMF caps M at 8");
    if (n < 1) throw std::invalid_argument("estimate_h_omega: need at least one sample");
    const bool exponential = model.is_exponential();
    return chunked_estimate(n, seed, [&](RngStream& rng) {
        const auto use = simulate_channel_use(marginal, model, m, rng);
        // Uniform conditional PMF under exponential passage: H = log |Omega|.
        if (exponential) return count_admissible(use.t, use.s_sorted).log_count;
        return perm_entropy(model, use.t, use.s_sorted);
    });
}

EstimateReport estimate_log_count(const EmissionMarginal& marginal,
                                  const FirstPassageModel& model, int m, std::int64_t n,
                                  std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("estimate_log_count: need at least one quantum");
    if (n < 1) throw std::invalid_argument("estimate_log_count: need at least one sample");
    return chunked_estimate(n, seed, [&](RngStream& rng) {
        const auto use = simulate_channel_use(marginal, model, m, rng);
        return count_admissible(use.t, use.s_sorted).log_count;
    });
}

MiDecompositionReport estimate_mi_decomposition(const EmissionMarginal& marginal,
                                                const FirstPassageModel& model, int m,
                                                std::int64_t n, std::uint64_t seed) {
    if (m != 2)
        throw std::invalid_argument(
            "estimate_mi_decomposition: histogram MI is only credible at M = 2");
    if (marginal.kind() != EmissionMarginal::Kind::DeadlineOptimal)
        throw std::invalid_argument(
            "estimate_mi_decomposition: requires the deadline-optimal marginal");
    if (!model.is_exponential() || model.rate() != marginal.rate())
        throw std::invalid_argument(
            "estimate_mi_decomposition: requires exponential passage at the marginal's rate");
    if (n < 1000) throw std::invalid_argument("estimate_mi_decomposition: n too small");

    const double tau = marginal.deadline();
    const double lt = marginal.lambda_tau();
    const std::size_t un = static_cast<std::size_t>(n);

    // Simulate in fixed chunks (same stream layout as the other estimators).
    std::vector<double> s1(un), s2(un), t1(un), t2(un);
    double tie_residual = 0.0;
    for (int c = 0; c < kChunks; ++c) {
        const std::int64_t lo = n * c / kChunks;
        const std::int64_t hi = n * (c + 1) / kChunks;
        RngStream rng = RngStream::child(seed, static_cast<std::uint64_t>(c));
        for (std::int64_t i = lo; i < hi; ++i) {
            const auto use = simulate_channel_use(marginal, model, 2, rng);
            const auto ui = static_cast<std::size_t>(i);
            t1[ui] = use.t[0];
            t2[ui] = use.t[1];
            s1[ui] = use.s_sorted[0];
            s2[ui] = use.s_sorted[1];
            // hyper-symmetric Q = sum of components: sorting never changes it
            tie_residual = std::max(
                tie_residual, std::abs((use.s_sorted[0] + use.s_sorted[1]) - (use.s[0] + use.s[1])));
        }
    }

    // Branch label per component: 0 = atom at zero, 1 = uniform, 2 = atom at tau.
    auto branch = [&](double t) { return t == 0.0 ? 0 : (t == tau ? 2 : 1); };
    // Unordered pair label in {0..5}: 00, 0u, 0t, uu, ut, tt.
    auto cell_of = [&](int b1, int b2) {
        static constexpr int lut[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
        return lut[b1][b2];
    };

    std::vector<int> cell(un);
    std::vector<std::size_t> members[6];
    for (std::size_t i = 0; i < un; ++i) {
        cell[i] = cell_of(branch(t1[i]), branch(t2[i]));
        members[cell[i]].push_back(i);
    }

    // Piece 1: I(S_sorted; Z) with S_sorted on a 64x64 equal-mass product grid.
    std::vector<double> per_sample(un, 0.0);
    const auto top = binned_mi(grid_bins(s1, s2, 64), 64 * 64, cell, 6);
    double mi_total = top.plugin_mm;
    for (std::size_t i = 0; i < un; ++i) per_sample[i] = top.per_sample[i];

    // Conditional pieces: cells with one continuous component (0u, ut) use
    // S_sorted 32x32 x U 32; the uu cell uses S_sorted 32x32 x sorted-U 12x12.
    auto add_conditional = [&](int c, const BinnedMi& mi, const std::vector<std::size_t>& idx) {
        (void)c;
        const double weight = static_cast<double>(idx.size()) / static_cast<double>(un);
        mi_total += weight * mi.plugin_mm;
        for (std::size_t j = 0; j < idx.size(); ++j) per_sample[idx[j]] += mi.per_sample[j];
    };

    for (int c : {1, 4}) {
        const auto& idx = members[c];
        if (idx.size() < 2000) continue;
        std::vector<double> u(idx.size());
        for (std::size_t j = 0; j < idx.size(); ++j) {
            const std::size_t i = idx[j];
            u[j] = branch(t1[i]) == 1 ? t1[i] : t2[i];
        }
        const auto mi = binned_mi(grid_bins(gather(s1, idx), gather(s2, idx), 32), 32 * 32,
                                  equal_mass_bins(u, 32), 32);
        add_conditional(c, mi, idx);
    }
    {
        const auto& idx = members[3];
        if (idx.size() >= 2000) {
            std::vector<double> ua(idx.size()), ub(idx.size());
            for (std::size_t j = 0; j < idx.size(); ++j) {
                const std::size_t i = idx[j];
                ua[j] = std::min(t1[i], t2[i]);
                ub[j] = std::max(t1[i], t2[i]);
            }
            const auto mi = binned_mi(grid_bins(gather(s1, idx), gather(s2, idx), 32), 32 * 32,
                                      grid_bins(ua, ub, 12), 12 * 12);
            add_conditional(3, mi, idx);
        }
    }

    MiDecompositionReport report;
    report.mi_histogram.mean = mi_total;
    report.mi_histogram.samples = n;
    report.mi_histogram.seed = seed;
    {
        // The composite estimate is the mean of per-sample log-ratio sums (up
        // to the deterministic Miller-Madow offsets), so its sampling error is
        // estimated from their spread.
        double s = 0.0, s2sum = 0.0;
        for (double v : per_sample) {
            s += v;
            s2sum += v * v;
        }
        const double meanv = s / static_cast<double>(un);
        const double var = std::max(0.0, s2sum / static_cast<double>(un) - meanv * meanv);
        report.mi_histogram.std_error = std::sqrt(var / static_cast<double>(un));
    }
    report.rhs_analytic =
        2.0 * std::log1p(lt / M_E) - std::log(2.0) + h_omega_exponential(2, lt);
    report.h_omega_mc = estimate_h_omega(marginal, model, 2, n, seed + 1);
    report.rhs_via_mc = 2.0 * std::log1p(lt / M_E) - std::log(2.0) + report.h_omega_mc.mean;
    report.gap_analytic = report.mi_histogram.mean - report.rhs_analytic;
    report.hyper_symmetric_residual = tie_residual;
    return report;
}

EpochDiagnostics epoch_feasibility(const FirstPassageModel& model, const EpochConfig& epoch) {
    if (epoch.m < 1) throw std::invalid_argument("epoch_feasibility: M must be >= 1");
    if (!(epoch.rho > 0.0)) throw std::invalid_argument("epoch_feasibility: rho must be positive");
    if (!(epoch.epsilon > 0.0))
        throw std::invalid_argument("epoch_feasibility: epsilon must be positive");
    EpochDiagnostics diag;
    const double g = model.cdf(epoch.guard());
    diag.cdf_bound = g > 0.0 ? std::exp(static_cast<double>(epoch.m) * std::log(g)) : 0.0;
    diag.m_gbar = static_cast<double>(epoch.m) * model.ccdf(epoch.guard());
    const EpochConfig doubled{2 * epoch.m, epoch.rho, epoch.epsilon};
    diag.m_gbar_doubled = static_cast<double>(doubled.m) * model.ccdf(doubled.guard());
    diag.feasible_trend = diag.m_gbar_doubled < diag.m_gbar;
    return diag;
}

} // namespace qrtc
