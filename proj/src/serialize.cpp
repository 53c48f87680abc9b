#include "chaleval/serialize.hpp"

#include "chaleval/csv.hpp"
#include "chaleval/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>

namespace chaleval {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::vector<std::size_t> by_rank(const std::vector<std::string>& teams, const std::vector<int>& ranks)
{
    std::vector<std::size_t> order(teams.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ranks[a] != ranks[b] ? ranks[a] < ranks[b] : teams[a] < teams[b];
    });
    return order;
}

template <typename F>
auto parse_or_throw(std::string_view what, F&& f)
{
    try {
        return f();
    }
    catch (const json::exception& e) {
        throw Error(ErrorCode::invalid_argument, std::string(what) + ": " + e.what());
    }
}

} // namespace

std::string ranking_to_json(const RankingOutcome& r)
{
    ordered_json j;
    j["scheme"] = r.scheme;
    ordered_json teams = ordered_json::array();
    for (std::size_t t : by_rank(r.teams, r.final_ranks))
        teams.push_back({{"team", r.teams[t]}, {"rank_score", r.rank_scores[t]}, {"final_rank", r.final_ranks[t]}});
    j["teams"] = std::move(teams);
    if (!r.per_case_cumulative.empty()) {
        j["cases"] = r.cases;
        ordered_json cum = ordered_json::object();
        for (std::size_t t : by_rank(r.teams, r.final_ranks))
            cum[r.teams[t]] = r.per_case_cumulative[t];
        j["per_case_cumulative"] = std::move(cum);
    }
    return j.dump(2) + "\n";
}

std::string ranking_to_csv(const RankingOutcome& r)
{
    std::string out = "team,rank_score,final_rank\n";
    for (std::size_t t : by_rank(r.teams, r.final_ranks))
        out += r.teams[t] + "," + format_double(r.rank_scores[t]) + "," + std::to_string(r.final_ranks[t]) + "\n";
    return out;
}

RankingOutcome ranking_from_json(std::string_view text)
{
    return parse_or_throw("ranking JSON", [&] {
        const json j = json::parse(text);
        RankingOutcome r;
        r.scheme = j.at("scheme").get<std::string>();
        for (const auto& t : j.at("teams")) {
            r.teams.push_back(t.at("team").get<std::string>());
            r.rank_scores.push_back(t.at("rank_score").get<double>());
            r.final_ranks.push_back(t.at("final_rank").get<int>());
        }
        if (j.contains("per_case_cumulative")) {
            r.cases = j.at("cases").get<std::vector<std::string>>();
            for (const auto& team : r.teams)
                r.per_case_cumulative.push_back(j.at("per_case_cumulative").at(team).get<std::vector<double>>());
        }
        return r;
    });
}

std::string bootstrap_to_json(const BootstrapSummary& s)
{
    ordered_json j;
    j["scheme"] = s.scheme;
    j["metrics"] = s.metrics;
    j["n_samples"] = s.n_samples;
    j["seed"] = s.seed;
    j["teams"] = s.teams;
    j["reference_ranks"] = s.reference_ranks;
    j["tau_median"] = s.tau_median;
    j["tau_iqr"] = {s.tau_q1, s.tau_q3};
    j["distinct_fraction_mean"] = s.distinct_fraction_mean;
    j["taus"] = s.taus;
    j["distinct_fractions"] = s.distinct_fractions;
    return j.dump(2) + "\n";
}

std::string bootstrap_ranks_to_csv(const BootstrapSummary& s)
{
    std::string out = "sample,team,rank\n";
    for (std::size_t i = 0; i < s.sample_ranks.size(); ++i)
        for (std::size_t t = 0; t < s.teams.size(); ++t)
            out += std::to_string(i) + "," + s.teams[t] + "," + std::to_string(s.sample_ranks[i][t]) + "\n";
    return out;
}

BootstrapSummary bootstrap_from_text(std::string_view json_text, std::string_view ranks_csv)
{
    BootstrapSummary s = parse_or_throw("bootstrap JSON", [&] {
        const json j = json::parse(json_text);
        BootstrapSummary b;
        b.scheme = j.at("scheme").get<std::string>();
        b.metrics = j.at("metrics").get<std::vector<std::string>>();
        b.n_samples = j.at("n_samples").get<std::size_t>();
        b.seed = j.at("seed").get<std::uint64_t>();
        b.teams = j.at("teams").get<std::vector<std::string>>();
        b.reference_ranks = j.at("reference_ranks").get<std::vector<int>>();
        b.tau_median = j.at("tau_median").get<double>();
        b.tau_q1 = j.at("tau_iqr").at(0).get<double>();
        b.tau_q3 = j.at("tau_iqr").at(1).get<double>();
        b.distinct_fraction_mean = j.at("distinct_fraction_mean").get<double>();
        b.taus = j.at("taus").get<std::vector<double>>();
        b.distinct_fractions = j.at("distinct_fractions").get<std::vector<double>>();
        return b;
    });
    if (ranks_csv.empty())
        return s;
    s.sample_ranks.assign(s.n_samples, std::vector<int>(s.teams.size(), 0));
    for (const auto& row : parse_csv(ranks_csv)) {
        if (row.size() < 3 || row[0] == "sample")
            continue;
        const auto sample = parse_int(row[0]);
        const auto rank = parse_int(row[2]);
        const auto team = std::find(s.teams.begin(), s.teams.end(), row[1]);
        if (!sample || !rank || team == s.teams.end() || *sample < 0 || static_cast<std::size_t>(*sample) >= s.n_samples)
            throw Error(ErrorCode::invalid_argument, "bad bootstrap ranks row");
        s.sample_ranks[static_cast<std::size_t>(*sample)][static_cast<std::size_t>(team - s.teams.begin())] = *rank;
    }
    return s;
}

std::string comparison_to_json(const SchemeComparison& c)
{
    ordered_json j;
    j["teams"] = c.teams;
    ordered_json schemes = ordered_json::array();
    for (std::size_t s = 0; s < c.schemes.size(); ++s)
        schemes.push_back({{"scheme", c.schemes[s]}, {"final_ranks", c.final_ranks[s]}, {"rank_scores", c.rank_scores[s]}});
    j["schemes"] = std::move(schemes);
    return j.dump(2) + "\n";
}

std::string comparison_to_csv(const SchemeComparison& c)
{
    std::string out = "team";
    for (const auto& s : c.schemes)
        out += "," + s;
    out += "\n";
    for (std::size_t t = 0; t < c.teams.size(); ++t) {
        out += c.teams[t];
        for (std::size_t s = 0; s < c.schemes.size(); ++s)
            out += "," + std::to_string(c.final_ranks[s][t]);
        out += "\n";
    }
    return out;
}

SchemeComparison comparison_from_json(std::string_view text)
{
    return parse_or_throw("scheme comparison JSON", [&] {
        const json j = json::parse(text);
        SchemeComparison c;
        c.teams = j.at("teams").get<std::vector<std::string>>();
        for (const auto& s : j.at("schemes")) {
            c.schemes.push_back(s.at("scheme").get<std::string>());
            c.final_ranks.push_back(s.at("final_ranks").get<std::vector<int>>());
            c.rank_scores.push_back(s.at("rank_scores").get<std::vector<double>>());
        }
        return c;
    });
}

} // namespace chaleval
