#pragma once

#include "chaleval/ranking.hpp"
#include "chaleval/results.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace chaleval {

/// Kendall's tau-b between two rankings of the same teams (lower = better;
/// ties allowed). Equals tau-a without ties. When one ranking is entirely
/// tied the coefficient is undefined; 1 is returned if both are, else 0.
double kendall_tau(std::span<const double> a, std::span<const double> b);
double kendall_tau(std::span<const int> a, std::span<const int> b);

/// Same, matching teams by id. Team sets must be equal.
double kendall_tau(const RankingOutcome& a, const RankingOutcome& b);

struct BootstrapOptions {
    std::size_t n_samples = 1000;
    std::uint64_t seed = 0;
    std::vector<std::string> metrics; // empty = all ranked metrics
    unsigned threads = 0;             // 0 = hardware concurrency
};

struct BootstrapSummary {
    std::string scheme;
    std::vector<std::string> metrics;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> teams;
    std::vector<int> reference_ranks;              // full-set ranking
    std::vector<double> taus;                      // per sample
    std::vector<double> distinct_fractions;        // per sample
    std::vector<std::vector<int>> sample_ranks;    // [sample][team]
    double tau_median = 0.0;
    double tau_q1 = 0.0;
    double tau_q3 = 0.0;
    double distinct_fraction_mean = 0.0;
};

/// Draws n_samples bootstrap case samples (N with replacement, N = |cases|),
/// ranks each, and correlates it with the full-set ranking. Sample i draws
/// from Substream(seed, i), so results are identical for any thread count.
BootstrapSummary bootstrap_stability(const ResultsTable& table, Scheme scheme, const BootstrapOptions& options);

/// bootstrap_stability once per metric subset, same seed for each.
std::vector<BootstrapSummary> metric_subset_stability(const ResultsTable& table, Scheme scheme,
                                                      const std::vector<std::vector<std::string>>& subsets,
                                                      const BootstrapOptions& options);

struct SchemeComparison {
    std::vector<std::string> teams;
    std::vector<std::string> schemes;
    std::vector<std::vector<int>> final_ranks;     // [scheme][team]
    std::vector<std::vector<double>> rank_scores;  // [scheme][team]
};

SchemeComparison compare_schemes(const ResultsTable& table);

} // namespace chaleval
