#include "chaleval/results.hpp"

#include "chaleval/csv.hpp"
#include "chaleval/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace chaleval {

namespace {

std::size_t intern(std::vector<std::string>& list, std::map<std::string, std::size_t>& index, const std::string& s)
{
    const auto [it, inserted] = index.emplace(s, list.size());
    if (inserted)
        list.push_back(s);
    return it->second;
}

std::string cell_name(const std::string& structure, const std::string& metric)
{
    return structure + "/" + metric;
}

bool parse_flag(const std::string& s)
{
    if (s == "1" || s == "true")
        return true;
    if (s == "0" || s == "false" || s.empty())
        return false;
    throw Error(ErrorCode::invalid_argument, "bad boolean '" + s + "' in results file");
}

} // namespace

ResultsTable::ResultsTable(std::vector<ResultEntry> entries) : entries_(std::move(entries))
{
    std::map<std::string, std::size_t> case_ix, team_ix, cell_ix;
    std::vector<std::string> cell_names;
    for (const auto& e : entries_) {
        if (!std::isfinite(e.value))
            throw Error(ErrorCode::invalid_argument, "non-finite value for " + e.case_id + "/" + e.team + "/" +
                                                         cell_name(e.structure, e.metric));
        const auto dir = known_metric_direction(e.metric);
        if (!dir)
            throw Error(ErrorCode::invalid_argument, "unknown metric '" + e.metric + "'");
        if (!e.ranked)
            continue;
        intern(cases_, case_ix, e.case_id);
        intern(teams_, team_ix, e.team);
        const auto before = cell_names.size();
        intern(cell_names, cell_ix, cell_name(e.structure, e.metric));
        if (cell_names.size() != before)
            cells_.push_back({e.structure, e.metric, *dir});
    }
    if (cells_.empty())
        throw Error(ErrorCode::incomplete_table, "no ranked entries");

    const std::size_t nc = cases_.size(), nt = teams_.size();
    values_.assign(cells_.size() * nc * nt, std::nan(""));
    std::vector<bool> filled(values_.size(), false);
    for (const auto& e : entries_) {
        if (!e.ranked)
            continue;
        const auto k = (cell_ix.at(cell_name(e.structure, e.metric)) * nc + case_ix.at(e.case_id)) * nt +
                       team_ix.at(e.team);
        if (filled[k])
            throw Error(ErrorCode::invalid_argument, "duplicate entry " + e.case_id + "/" + e.team + "/" +
                                                         cell_name(e.structure, e.metric));
        filled[k] = true;
        values_[k] = e.value;
    }
    for (std::size_t c = 0; c < cells_.size(); ++c)
        for (std::size_t i = 0; i < nc; ++i)
            for (std::size_t t = 0; t < nt; ++t)
                if (!filled[(c * nc + i) * nt + t])
                    throw Error(ErrorCode::incomplete_table, "missing " + cases_[i] + "/" + teams_[t] + "/" +
                                                                 cell_name(cells_[c].structure, cells_[c].metric));
}

std::size_t ResultsTable::case_index(const std::string& case_id) const
{
    const auto it = std::find(cases_.begin(), cases_.end(), case_id);
    if (it == cases_.end())
        throw Error(ErrorCode::invalid_argument, "unknown case '" + case_id + "'");
    return static_cast<std::size_t>(it - cases_.begin());
}

std::size_t ResultsTable::team_index(const std::string& team) const
{
    const auto it = std::find(teams_.begin(), teams_.end(), team);
    if (it == teams_.end())
        throw Error(ErrorCode::invalid_argument, "unknown team '" + team + "'");
    return static_cast<std::size_t>(it - teams_.begin());
}

std::size_t ResultsTable::cell_index(const std::string& structure, const std::string& metric) const
{
    for (std::size_t c = 0; c < cells_.size(); ++c)
        if (cells_[c].structure == structure && cells_[c].metric == metric)
            return c;
    throw Error(ErrorCode::incomplete_table, "no ranked values for " + cell_name(structure, metric));
}

std::string results_to_csv(const std::vector<ResultEntry>& entries)
{
    std::string out = "case_id,team,structure,metric,value,ranked,penalized,both_empty\n";
    for (const auto& e : entries) {
        out += e.case_id + "," + e.team + "," + e.structure + "," + e.metric + "," + format_double(e.value) + "," +
               (e.ranked ? "1" : "0") + "," + (e.penalized ? "1" : "0") + "," + (e.both_empty ? "1" : "0") + "\n";
    }
    return out;
}

std::vector<ResultEntry> parse_results_csv(std::string_view text)
{
    const auto rows = parse_csv(text);
    std::vector<ResultEntry> out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (r == 0 && !row.empty() && row[0] == "case_id")
            continue;
        if (row.size() < 5)
            throw Error(ErrorCode::invalid_argument, "results row " + std::to_string(r + 1) + " has fewer than 5 columns");
        const auto v = parse_double(row[4]);
        if (!v)
            throw Error(ErrorCode::invalid_argument, "results row " + std::to_string(r + 1) + ": bad value '" + row[4] + "'");
        ResultEntry e{row[0], row[1], row[2], row[3], *v};
        if (row.size() > 5)
            e.ranked = row[5].empty() ? true : parse_flag(row[5]);
        if (row.size() > 6)
            e.penalized = parse_flag(row[6]);
        if (row.size() > 7)
            e.both_empty = parse_flag(row[7]);
        out.push_back(std::move(e));
    }
    return out;
}

ResultsTable read_results_csv(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw Error(ErrorCode::io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ResultsTable(parse_results_csv(ss.str()));
}

} // namespace chaleval
