// qrtc command-line front end: capacity-bound curves, finite-M tables and the
// cross-validation report. Talks to the library exclusively through the C API.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qrtc.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvariantFailure = 1;
constexpr int kExitConfigError = 2;

struct Options {
    double chi_min = 0.25;
    double chi_max = 32.0;
    int chi_points = 64;
    std::vector<long long> m_list;
    double lambda = 1.0;
    double rho = 1.0;
    double epsilon = 0.1;
    long long samples = 100000;
    unsigned long long seed = 20260809ULL;
    std::string out;
    std::string format = "csv";
};

std::vector<double> chi_grid(const Options& opt) {
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(opt.chi_points));
    if (opt.chi_points == 1) {
        grid.push_back(opt.chi_min);
        return grid;
    }
    const double lmin = std::log(opt.chi_min);
    const double lmax = std::log(opt.chi_max);
    for (int i = 0; i < opt.chi_points; ++i)
        grid.push_back(std::exp(lmin + (lmax - lmin) * i / (opt.chi_points - 1)));
    return grid;
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

int write_output(const std::string& path, const std::string& body) {
    if (path.empty()) {
        std::cout << body;
        return kExitOk;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        std::cerr << "error: cannot open output file: " << path << "\n";
        return kExitConfigError;
    }
    file << body;
    if (!file.good()) {
        std::cerr << "error: write failed: " << path << "\n";
        return kExitConfigError;
    }
    return kExitOk;
}

int check(qrtc_status status, const char* what) {
    if (status == QRTC_OK) return kExitOk;
    std::cerr << "error: " << what << ": " << qrtc_status_name(status) << " ("
              << qrtc_last_error() << ")\n";
    return kExitConfigError;
}

struct Row {
    std::vector<std::pair<std::string, double>> cols;
};

std::string render(const std::vector<std::string>& header, const std::vector<Row>& rows,
                   const std::string& format) {
    std::ostringstream out;
    if (format == "csv") {
        for (std::size_t i = 0; i < header.size(); ++i)
            out << header[i] << (i + 1 < header.size() ? "," : "\n");
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.cols.size(); ++i)
                out << fmt17(row.cols[i].second) << (i + 1 < row.cols.size() ? "," : "\n");
        }
    } else {
        out << "[\n";
        for (std::size_t r = 0; r < rows.size(); ++r) {
            out << "  {";
            for (std::size_t i = 0; i < rows[r].cols.size(); ++i) {
                out << "\"" << rows[r].cols[i].first << "\": " << fmt17(rows[r].cols[i].second);
                if (i + 1 < rows[r].cols.size()) out << ", ";
            }
            out << "}" << (r + 1 < rows.size() ? "," : "") << "\n";
        }
        out << "]\n";
    }
    return out.str();
}

int cmd_bounds(const Options& opt) {
    std::vector<Row> rows;
    for (double chi : chi_grid(opt)) {
        double simple = 0.0, raw = 0.0, clamped = 0.0, ct_simple = 0.0, ct_series = 0.0;
        if (int rc = check(qrtc_cq_simple(chi, &simple), "cq_simple")) return rc;
        if (int rc = check(qrtc_cq_series(chi, 1e-12, &raw, &clamped), "cq_series")) return rc;
        if (int rc = check(qrtc_ct_bound(opt.lambda, chi, 0, &ct_simple), "ct_bound")) return rc;
        if (int rc = check(qrtc_ct_bound(opt.lambda, chi, 1, &ct_series), "ct_bound")) return rc;
        rows.push_back(Row{{{"chi", chi},
                            {"cq_simple", simple},
                            {"cq_series", clamped},
                            {"ct_simple", ct_simple},
                            {"ct_series", ct_series}}});
    }
    return write_output(
        opt.out, render({"chi", "cq_simple", "cq_series", "ct_simple", "ct_series"}, rows,
                        opt.format));
}

int cmd_finite_m(const Options& opt) {
    std::vector<Row> rows;
    for (long long m : opt.m_list) {
        if (m < 1) {
            std::cerr << "error: --m-list entries must be >= 1\n";
            return kExitConfigError;
        }
        for (double chi : chi_grid(opt)) {
            const double lt = chi * static_cast<double>(m);
            double mi = 0.0, cq = 0.0;
            if (int rc = check(qrtc_mi_ordered_lower(m, lt, &mi), "mi_ordered_lower")) return rc;
            if (int rc = check(qrtc_cq_finite(m, chi, &cq), "cq_finite")) return rc;
            rows.push_back(Row{{{"M", static_cast<double>(m)},
                                {"chi", chi},
                                {"lambda_tau", lt},
                                {"mi_ordered_lower", mi},
                                {"cq_finite", cq}}});
        }
    }
    return write_output(
        opt.out,
        render({"M", "chi", "lambda_tau", "mi_ordered_lower", "cq_finite"}, rows, opt.format));
}

int cmd_validate(const Options& opt) {
    if (opt.samples < 10000) {
        std::cerr << "error: validate needs --samples >= 10000\n";
        return kExitConfigError;
    }
    int all_passed = 0;
    char* json = nullptr;
    const qrtc_status status =
        qrtc_validate(opt.samples, opt.seed, opt.rho, opt.epsilon, &all_passed, &json);
    if (int rc = check(status, "validate")) return rc;
    const std::string body = std::string(json) + "\n";
    qrtc_string_free(json);
    if (int rc = write_output(opt.out, body)) return rc;
    return all_passed ? kExitOk : kExitInvariantFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"identical-quanta release-timing channel: capacity bounds and validation"};
    app.require_subcommand(1);

    Options opt;
    for (int k = 0; k <= 14; ++k) opt.m_list.push_back(1LL << k);

    auto add_common = [&](CLI::App* cmd, bool wants_grid) {
        if (wants_grid) {
            cmd->add_option("--chi-min", opt.chi_min, "smallest chi = lambda/rho")
                ->check(CLI::PositiveNumber);
            cmd->add_option("--chi-max", opt.chi_max, "largest chi")->check(CLI::PositiveNumber);
            cmd->add_option("--chi-points", opt.chi_points, "log-spaced grid size")
                ->check(CLI::PositiveNumber);
        }
        cmd->add_option("--lambda", opt.lambda, "first-passage rate")->check(CLI::PositiveNumber);
        cmd->add_option("--out", opt.out, "output path (default stdout)");
        cmd->add_option("--format", opt.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    auto* bounds = app.add_subcommand("bounds", "asymptotic C_q and C_t lower-bound curves");
    add_common(bounds, true);

    auto* finite = app.add_subcommand("finite-m", "finite-M ordered-MI bounds per (M, chi)");
    add_common(finite, true);
    finite->add_option("--m-list", opt.m_list, "comma-separated quanta counts")->delimiter(',');

    auto* validate = app.add_subcommand("validate", "run all cross-validation suites");
    validate->add_option("--samples", opt.samples, "Monte Carlo samples per suite");
    validate->add_option("--seed", opt.seed, "root seed")->envname("QRTC_SEED");
    validate->add_option("--rho", opt.rho, "emission rate for the epoch suite")
        ->check(CLI::PositiveNumber);
    validate->add_option("--epsilon", opt.epsilon, "guard fraction for the epoch suite")
        ->check(CLI::PositiveNumber);
    validate->add_option("--out", opt.out, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfigError;
    }

    if (opt.chi_min > opt.chi_max) {
        std::cerr << "error: --chi-min must not exceed --chi-max\n";
        return kExitConfigError;
    }
    if (bounds->parsed()) return cmd_bounds(opt);
    if (finite->parsed()) return cmd_finite_m(opt);
    return cmd_validate(opt);
}
