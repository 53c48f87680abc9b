#pragma once

#include "chaleval/results.hpp"

#include <string>
#include <vector>

/// values[case][team] for each (structure, metric) cell.
struct TableBuilder {
    std::vector<std::string> cases;
    std::vector<std::string> teams;
    std::vector<chaleval::ResultEntry> entries;

    TableBuilder(std::vector<std::string> c, std::vector<std::string> t) : cases(std::move(c)), teams(std::move(t)) {}

    TableBuilder& cell(const std::string& structure, const std::string& metric,
                       const std::vector<std::vector<double>>& values, bool ranked = true)
    {
        for (std::size_t c = 0; c < cases.size(); ++c)
            for (std::size_t t = 0; t < teams.size(); ++t)
                entries.push_back({cases[c], teams[t], structure, metric, values[c][t], ranked, false, false});
        return *this;
    }

    chaleval::ResultsTable table() const { return chaleval::ResultsTable(entries); }
};
