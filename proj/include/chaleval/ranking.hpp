#pragma once

#include "chaleval/manifest.hpp"
#include "chaleval/results.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chaleval {

enum class Scheme {
    rank_then_aggregate_mean, // the official scheme
    rank_then_aggregate_median,
    aggregate_then_rank_mean,
    aggregate_then_rank_median,
};

inline constexpr Scheme all_schemes[] = {Scheme::rank_then_aggregate_mean, Scheme::rank_then_aggregate_median,
                                         Scheme::aggregate_then_rank_mean, Scheme::aggregate_then_rank_median};

const char* to_string(Scheme scheme) noexcept;
Scheme parse_scheme(std::string_view name);

/// Competition ranking with ties at the best position: each entry's rank is
/// 1 + the number of strictly better entries.
std::vector<int> min_ranks(std::span<const double> values, Direction direction);

struct RankingOutcome {
    std::string scheme;
    std::vector<std::string> teams;  // table order
    std::vector<double> rank_scores; // lower is better
    std::vector<int> final_ranks;
    std::vector<std::string> cases;
    /// [team][case] mean per-cell rank; rank-then-aggregate schemes only.
    std::vector<std::vector<double>> per_case_cumulative;

    int rank_of(std::string_view team) const;
    double score_of(std::string_view team) const;
};

/// Ranks of every team for one (case, structure, metric) cell, table team order.
std::vector<int> per_cell_ranks(const ResultsTable& table, const std::string& case_id, const std::string& structure,
                                const std::string& metric);

/// Mean of a team's per-cell ranks over every ranked cell of one case.
double cumulative_rank(const ResultsTable& table, const std::string& team, const std::string& case_id);

struct RankOptions {
    /// Restrict ranking to these metric names (e.g. {"DSC"}); empty = all.
    std::vector<std::string> metrics;
};

/// Ranks a table under one scheme. Rank scores of the rank-then-aggregate
/// schemes are exact rationals of integer rank sums, so they do not depend on
/// case or team order; aggregate-then-rank means sum sorted values for the
/// same reason.
RankingOutcome rank_teams(const ResultsTable& table, Scheme scheme, const RankOptions& options = {});

/// Ascending MA-MAE with min-rank ties.
RankingOutcome rank_koos(const std::vector<std::pair<std::string, double>>& scores);

/// Reusable ranking of case multisets (bootstrap samples) drawn from one table.
/// Per-case ranks are computed once at construction.
class RankingEngine {
public:
    RankingEngine(const ResultsTable& table, Scheme scheme, const RankOptions& options = {});

    std::size_t case_count() const noexcept { return n_cases_; }
    std::size_t team_count() const noexcept { return n_teams_; }

    struct Scores {
        std::vector<double> rank_scores;
        std::vector<int> final_ranks;
    };

    /// Ranks over the given case indices; repeated indices count with multiplicity.
    Scores rank(std::span<const std::size_t> sample) const;

    /// [team][case] integer sum of per-cell ranks (rank-then-aggregate only).
    const std::vector<std::vector<long long>>& case_rank_sums() const noexcept { return rank_sums_; }
    std::size_t cell_count() const noexcept { return cells_.size(); }

private:
    const ResultsTable* table_;
    Scheme scheme_;
    std::vector<std::size_t> cells_;
    std::size_t n_cases_ = 0;
    std::size_t n_teams_ = 0;
    std::vector<std::vector<long long>> rank_sums_;
};

} // namespace chaleval
