#pragma once

#include "chaleval/ranking.hpp"
#include "chaleval/stability.hpp"

#include <string>
#include <string_view>

namespace chaleval {

// Teams are listed by (final rank, team id) so output does not depend on input order.

std::string ranking_to_json(const RankingOutcome& ranking);
std::string ranking_to_csv(const RankingOutcome& ranking);
RankingOutcome ranking_from_json(std::string_view text);

/// Summary plus per-sample tau and distinct-case fraction.
std::string bootstrap_to_json(const BootstrapSummary& summary);
/// sample,team,rank rows: the blob-plot data.
std::string bootstrap_ranks_to_csv(const BootstrapSummary& summary);
/// Reads the JSON and (optionally empty) ranks CSV back.
BootstrapSummary bootstrap_from_text(std::string_view json_text, std::string_view ranks_csv);

std::string comparison_to_json(const SchemeComparison& comparison);
std::string comparison_to_csv(const SchemeComparison& comparison);
SchemeComparison comparison_from_json(std::string_view text);

} // namespace chaleval
