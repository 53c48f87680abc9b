#pragma once

#include "chaleval/manifest.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace chaleval {

/// One row of the long-form results file.
struct ResultEntry {
    std::string case_id;
    std::string team;
    std::string structure;
    std::string metric;
    double value = 0.0;
    bool ranked = true;
    bool penalized = false;
    bool both_empty = false;
};

/// A ranked (structure, metric) column of the table.
struct ResultCell {
    std::string structure;
    std::string metric;
    Direction direction = Direction::higher_better;
};

/// Per (case, team, structure, metric) values. Ranked cells must be complete:
/// every case has a value for every team. Unranked rows are kept verbatim for
/// reporting. Case, team and cell order is order of first appearance.
class ResultsTable {
public:
    ResultsTable() = default;
    explicit ResultsTable(std::vector<ResultEntry> entries);

    const std::vector<std::string>& cases() const noexcept { return cases_; }
    const std::vector<std::string>& teams() const noexcept { return teams_; }
    const std::vector<ResultCell>& cells() const noexcept { return cells_; }
    const std::vector<ResultEntry>& entries() const noexcept { return entries_; }

    double value(std::size_t cell, std::size_t case_index, std::size_t team) const noexcept
    {
        return values_[(cell * cases_.size() + case_index) * teams_.size() + team];
    }

    std::size_t case_index(const std::string& case_id) const;
    std::size_t team_index(const std::string& team) const;
    std::size_t cell_index(const std::string& structure, const std::string& metric) const;

private:
    std::vector<ResultEntry> entries_;
    std::vector<std::string> cases_;
    std::vector<std::string> teams_;
    std::vector<ResultCell> cells_;
    std::vector<double> values_;
};

/// Header: case_id,team,structure,metric,value,ranked,penalized,both_empty.
/// The reader also accepts the five leading columns alone.
std::string results_to_csv(const std::vector<ResultEntry>& entries);
std::vector<ResultEntry> parse_results_csv(std::string_view text);
ResultsTable read_results_csv(const std::filesystem::path& path);

} // namespace chaleval
