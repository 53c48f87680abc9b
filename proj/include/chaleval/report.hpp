#pragma once

#include "chaleval/ranking.hpp"
#include "chaleval/results.hpp"
#include "chaleval/stability.hpp"
#include "chaleval/stats.hpp"

#include <string>
#include <vector>

namespace chaleval {

struct CellSummary {
    std::string structure;
    std::string metric;
    bool ranked = true;
    Quartiles quartiles;
};

struct LeaderboardRow {
    std::string team;
    int global_rank = 0;
    double rank_score = 0.0;
    std::vector<CellSummary> cells; // ranked cells first, then auxiliary, each in first-seen order
};

/// Rows sorted by global rank (then team id), with per-cell quartiles over cases.
std::vector<LeaderboardRow> build_leaderboard(const std::vector<ResultEntry>& entries, const RankingOutcome& ranking);

/// "m [q1 - q3]": DSC as a percentage with one decimal, ASSD in mm with two.
std::string format_summary(const std::string& metric, const Quartiles& q);

std::string leaderboard_text(const std::vector<LeaderboardRow>& rows);
std::string leaderboard_csv(const std::vector<LeaderboardRow>& rows);

/// Per-team distribution of one (structure, metric) over cases, teams in row order.
std::string box_plot_svg(const std::vector<ResultEntry>& entries, const std::string& structure,
                         const std::string& metric, const std::vector<LeaderboardRow>& rows);

/// Frequency of each rank per team across bootstrap samples; circle area is
/// proportional to frequency, crosses mark the full-set ranking.
std::string blob_plot_svg(const BootstrapSummary& summary);

/// One line per team across ranking schemes.
std::string line_plot_svg(const SchemeComparison& comparison);

} // namespace chaleval
