#include "chaleval/ranking.hpp"

#include "chaleval/error.hpp"

#include <algorithm>
#include <numeric>

namespace chaleval {

const char* to_string(Scheme scheme) noexcept
{
    switch (scheme) {
    case Scheme::rank_then_aggregate_mean: return "rank-then-aggregate-mean";
    case Scheme::rank_then_aggregate_median: return "rank-then-aggregate-median";
    case Scheme::aggregate_then_rank_mean: return "aggregate-then-rank-mean";
    case Scheme::aggregate_then_rank_median: return "aggregate-then-rank-median";
    }
    return "?";
}

Scheme parse_scheme(std::string_view name)
{
    for (Scheme s : all_schemes)
        if (name == to_string(s))
            return s;
    if (name == "official")
        return Scheme::rank_then_aggregate_mean;
    throw Error(ErrorCode::unknown_scheme, std::string(name));
}

std::vector<int> min_ranks(std::span<const double> values, Direction direction)
{
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto better = [&](std::size_t a, std::size_t b) {
        return direction == Direction::higher_better ? values[a] > values[b] : values[a] < values[b];
    };
    std::stable_sort(order.begin(), order.end(), better);
    std::vector<int> ranks(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && values[order[i]] == values[order[i - 1]])
            ranks[order[i]] = ranks[order[i - 1]];
        else
            ranks[order[i]] = static_cast<int>(i) + 1;
    }
    return ranks;
}

int RankingOutcome::rank_of(std::string_view team) const
{
    for (std::size_t t = 0; t < teams.size(); ++t)
        if (teams[t] == team)
            return final_ranks[t];
    throw Error(ErrorCode::invalid_argument, "unknown team '" + std::string(team) + "'");
}

double RankingOutcome::score_of(std::string_view team) const
{
    for (std::size_t t = 0; t < teams.size(); ++t)
        if (teams[t] == team)
            return rank_scores[t];
    throw Error(ErrorCode::invalid_argument, "unknown team '" + std::string(team) + "'");
}

namespace {

std::vector<int> cell_ranks(const ResultsTable& table, std::size_t cell, std::size_t case_index)
{
    std::vector<double> v(table.teams().size());
    for (std::size_t t = 0; t < v.size(); ++t)
        v[t] = table.value(cell, case_index, t);
    return min_ranks(v, table.cells()[cell].direction);
}

bool is_rank_then_aggregate(Scheme s)
{
    return s == Scheme::rank_then_aggregate_mean || s == Scheme::rank_then_aggregate_median;
}

bool uses_median(Scheme s)
{
    return s == Scheme::rank_then_aggregate_median || s == Scheme::aggregate_then_rank_median;
}

/// Median of integers, halved exactly: returns twice the median.
long long twice_median(std::vector<long long>& v)
{
    const std::size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2), v.end());
    const long long hi = v[n / 2];
    if (n % 2 == 1)
        return 2 * hi;
    const long long lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2));
    return lo + hi;
}

double median_of(std::vector<double>& v)
{
    const std::size_t n = v.size();
    std::sort(v.begin(), v.end());
    if (n % 2 == 1)
        return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double sorted_mean(std::vector<double>& v)
{
    std::sort(v.begin(), v.end());
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

} // namespace

std::vector<int> per_cell_ranks(const ResultsTable& table, const std::string& case_id, const std::string& structure,
                                const std::string& metric)
{
    return cell_ranks(table, table.cell_index(structure, metric), table.case_index(case_id));
}

double cumulative_rank(const ResultsTable& table, const std::string& team, const std::string& case_id)
{
    const auto t = table.team_index(team);
    const auto i = table.case_index(case_id);
    long long sum = 0;
    for (std::size_t c = 0; c < table.cells().size(); ++c)
        sum += cell_ranks(table, c, i)[t];
    return static_cast<double>(sum) / static_cast<double>(table.cells().size());
}

RankingEngine::RankingEngine(const ResultsTable& table, Scheme scheme, const RankOptions& options)
    : table_(&table), scheme_(scheme), n_cases_(table.cases().size()), n_teams_(table.teams().size())
{
    for (const auto& m : options.metrics) {
        const bool present = std::any_of(table.cells().begin(), table.cells().end(),
                                         [&](const ResultCell& c) { return c.metric == m; });
        if (!present)
            throw Error(ErrorCode::invalid_argument, "metric '" + m + "' has no ranked values");
    }
    for (std::size_t c = 0; c < table.cells().size(); ++c) {
        if (options.metrics.empty() ||
            std::find(options.metrics.begin(), options.metrics.end(), table.cells()[c].metric) != options.metrics.end())
            cells_.push_back(c);
    }
    if (cells_.empty())
        throw Error(ErrorCode::invalid_argument, "empty metric subset");
    if (!is_rank_then_aggregate(scheme_))
        return;
    rank_sums_.assign(n_teams_, std::vector<long long>(n_cases_, 0));
    for (std::size_t i = 0; i < n_cases_; ++i)
        for (std::size_t c : cells_) {
            const auto r = cell_ranks(table, c, i);
            for (std::size_t t = 0; t < n_teams_; ++t)
                rank_sums_[t][i] += r[t];
        }
}

RankingEngine::Scores RankingEngine::rank(std::span<const std::size_t> sample) const
{
    if (sample.empty())
        throw Error(ErrorCode::invalid_argument, "cannot rank an empty case sample");
    for (std::size_t i : sample)
        if (i >= n_cases_)
            throw Error(ErrorCode::invalid_argument, "case index out of range");
    Scores out;
    out.rank_scores.resize(n_teams_);
    const auto n = static_cast<double>(sample.size());
    const auto n_cells = static_cast<double>(cells_.size());

    if (is_rank_then_aggregate(scheme_)) {
        std::vector<long long> buf(sample.size());
        for (std::size_t t = 0; t < n_teams_; ++t) {
            if (uses_median(scheme_)) {
                for (std::size_t k = 0; k < sample.size(); ++k)
                    buf[k] = rank_sums_[t][sample[k]];
                out.rank_scores[t] = static_cast<double>(twice_median(buf)) / (2.0 * n_cells);
            }
            else {
                long long total = 0;
                for (std::size_t i : sample)
                    total += rank_sums_[t][i];
                out.rank_scores[t] = static_cast<double>(total) / (n * n_cells);
            }
        }
    }
    else {
        std::vector<long long> rank_total(n_teams_, 0);
        std::vector<double> aggregate(n_teams_);
        std::vector<double> buf(sample.size());
        for (std::size_t c : cells_) {
            for (std::size_t t = 0; t < n_teams_; ++t) {
                for (std::size_t k = 0; k < sample.size(); ++k)
                    buf[k] = table_->value(c, sample[k], t);
                aggregate[t] = uses_median(scheme_) ? median_of(buf) : sorted_mean(buf);
            }
            const auto r = min_ranks(aggregate, table_->cells()[c].direction);
            for (std::size_t t = 0; t < n_teams_; ++t)
                rank_total[t] += r[t];
        }
        for (std::size_t t = 0; t < n_teams_; ++t)
            out.rank_scores[t] = static_cast<double>(rank_total[t]) / n_cells;
    }
    out.final_ranks = min_ranks(out.rank_scores, Direction::lower_better);
    return out;
}

RankingOutcome rank_teams(const ResultsTable& table, Scheme scheme, const RankOptions& options)
{
    const RankingEngine engine(table, scheme, options);
    std::vector<std::size_t> all(table.cases().size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    auto scores = engine.rank(all);

    RankingOutcome out;
    out.scheme = to_string(scheme);
    out.teams = table.teams();
    out.rank_scores = std::move(scores.rank_scores);
    out.final_ranks = std::move(scores.final_ranks);
    out.cases = table.cases();
    if (is_rank_then_aggregate(scheme)) {
        const auto n_cells = static_cast<double>(engine.cell_count());
        for (const auto& row : engine.case_rank_sums()) {
            std::vector<double> cum(row.size());
            for (std::size_t i = 0; i < row.size(); ++i)
                cum[i] = static_cast<double>(row[i]) / n_cells;
            out.per_case_cumulative.push_back(std::move(cum));
        }
    }
    return out;
}

RankingOutcome rank_koos(const std::vector<std::pair<std::string, double>>& scores)
{
    if (scores.empty())
        throw Error(ErrorCode::invalid_argument, "no classification scores to rank");
    RankingOutcome out;
    out.scheme = "ma-mae";
    for (const auto& [team, score] : scores) {
        out.teams.push_back(team);
        out.rank_scores.push_back(score);
    }
    out.final_ranks = min_ranks(out.rank_scores, Direction::lower_better);
    return out;
}

} // namespace chaleval
