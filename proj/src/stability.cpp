#include "chaleval/stability.hpp"

#include "chaleval/error.hpp"
#include "chaleval/rng.hpp"
#include "chaleval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace chaleval {

namespace {

template <typename T>
double tau_b(std::span<const T> a, std::span<const T> b)
{
    if (a.size() != b.size())
        throw Error(ErrorCode::invalid_argument, "rankings have different lengths");
    const std::size_t n = a.size();
    if (n < 2)
        throw Error(ErrorCode::invalid_argument, "Kendall's tau needs at least two teams");
    long long concordant = 0, discordant = 0, tied_a = 0, tied_b = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool ta = a[i] == a[j];
            const bool tb = b[i] == b[j];
            tied_a += ta;
            tied_b += tb;
            if (ta || tb)
                continue;
            if ((a[i] < a[j]) == (b[i] < b[j]))
                ++concordant;
            else
                ++discordant;
        }
    const long long pairs = static_cast<long long>(n * (n - 1) / 2);
    const long long da = pairs - tied_a, db = pairs - tied_b;
    if (da == 0 || db == 0)
        return da == db ? 1.0 : 0.0;
    return static_cast<double>(concordant - discordant) /
           std::sqrt(static_cast<double>(da) * static_cast<double>(db));
}

} // namespace

double kendall_tau(std::span<const double> a, std::span<const double> b)
{
    return tau_b(a, b);
}

double kendall_tau(std::span<const int> a, std::span<const int> b)
{
    return tau_b(a, b);
}

double kendall_tau(const RankingOutcome& a, const RankingOutcome& b)
{
    if (a.teams.size() != b.teams.size())
        throw Error(ErrorCode::invalid_argument, "rankings cover different team sets");
    std::vector<int> ra, rb;
    for (std::size_t t = 0; t < a.teams.size(); ++t) {
        const auto it = std::find(b.teams.begin(), b.teams.end(), a.teams[t]);
        if (it == b.teams.end())
            throw Error(ErrorCode::invalid_argument, "team '" + a.teams[t] + "' missing from second ranking");
        ra.push_back(a.final_ranks[t]);
        rb.push_back(b.final_ranks[static_cast<std::size_t>(it - b.teams.begin())]);
    }
    return kendall_tau(std::span<const int>(ra), std::span<const int>(rb));
}

BootstrapSummary bootstrap_stability(const ResultsTable& table, Scheme scheme, const BootstrapOptions& options)
{
    if (options.n_samples == 0)
        throw Error(ErrorCode::invalid_argument, "n_samples must be at least 1");
    RankOptions rank_options{options.metrics};
    const RankingEngine engine(table, scheme, rank_options);
    const std::size_t n_cases = engine.case_count();

    BootstrapSummary out;
    out.scheme = to_string(scheme);
    out.metrics = options.metrics;
    out.n_samples = options.n_samples;
    out.seed = options.seed;
    out.teams = table.teams();
    {
        std::vector<std::size_t> all(n_cases);
        for (std::size_t i = 0; i < n_cases; ++i)
            all[i] = i;
        out.reference_ranks = engine.rank(all).final_ranks;
    }
    out.taus.assign(options.n_samples, 0.0);
    out.distinct_fractions.assign(options.n_samples, 0.0);
    out.sample_ranks.assign(options.n_samples, {});

    const auto run_sample = [&](std::size_t s) {
        Substream rng(options.seed, s);
        std::vector<std::size_t> sample(n_cases);
        std::vector<bool> seen(n_cases, false);
        std::size_t distinct = 0;
        for (auto& idx : sample) {
            idx = static_cast<std::size_t>(rng.below(n_cases));
            if (!seen[idx]) {
                seen[idx] = true;
                ++distinct;
            }
        }
        auto scores = engine.rank(sample);
        out.distinct_fractions[s] = static_cast<double>(distinct) / static_cast<double>(n_cases);
        out.taus[s] = out.teams.size() < 2
                          ? 1.0
                          : kendall_tau(std::span<const int>(out.reference_ranks), std::span<const int>(scores.final_ranks));
        out.sample_ranks[s] = std::move(scores.final_ranks);
    };

    unsigned workers = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, options.n_samples));
    if (workers <= 1) {
        for (std::size_t s = 0; s < options.n_samples; ++s)
            run_sample(s);
    }
    else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t s = w; s < options.n_samples; s += workers)
                    run_sample(s);
            });
    }

    const auto q = quartiles(out.taus);
    out.tau_q1 = q.q1;
    out.tau_median = q.median;
    out.tau_q3 = q.q3;
    out.distinct_fraction_mean = mean(out.distinct_fractions);
    return out;
}

std::vector<BootstrapSummary> metric_subset_stability(const ResultsTable& table, Scheme scheme,
                                                      const std::vector<std::vector<std::string>>& subsets,
                                                      const BootstrapOptions& options)
{
    std::vector<BootstrapSummary> out;
    for (const auto& subset : subsets) {
        if (subset.empty())
            throw Error(ErrorCode::invalid_argument, "empty metric subset");
        BootstrapOptions o = options;
        o.metrics = subset;
        out.push_back(bootstrap_stability(table, scheme, o));
    }
    return out;
}

SchemeComparison compare_schemes(const ResultsTable& table)
{
    SchemeComparison out;
    out.teams = table.teams();
    for (Scheme s : all_schemes) {
        auto r = rank_teams(table, s);
        out.schemes.push_back(r.scheme);
        out.final_ranks.push_back(std::move(r.final_ranks));
        out.rank_scores.push_back(std::move(r.rank_scores));
    }
    return out;
}

} // namespace chaleval
