#include "chaleval/error.hpp"
#include "chaleval/serialize.hpp"
#include "chaleval/stability.hpp"
#include "chaleval/stats.hpp"

#include "../oracles.hpp"
#include "table_builder.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace chaleval;

namespace {

TableBuilder noisy_table(std::size_t n_cases, std::size_t n_teams, std::uint64_t seed, double signal)
{
    std::vector<std::string> cases, teams;
    for (std::size_t c = 0; c < n_cases; ++c)
        cases.push_back("c" + std::to_string(c));
    for (std::size_t t = 0; t < n_teams; ++t)
        teams.push_back("t" + std::to_string(t));
    Substream rng(seed, 0);
    std::vector<std::vector<double>> dsc(n_cases, std::vector<double>(n_teams)), assd = dsc;
    for (std::size_t c = 0; c < n_cases; ++c)
        for (std::size_t t = 0; t < n_teams; ++t) {
            dsc[c][t] = rng.uniform() - signal * static_cast<double>(t);
            assd[c][t] = rng.uniform(0, 5) + signal * static_cast<double>(t);
        }
    TableBuilder b(cases, teams);
    b.cell("vs", "DSC", dsc).cell("vs", "ASSD", assd);
    return b;
}

} // namespace

TEST_CASE("Kendall tau endpoints and worked value")
{
    const std::vector<int> r{1, 2, 3, 4}, rev{4, 3, 2, 1}, swap{2, 1, 3, 4};
    CHECK(kendall_tau(std::span<const int>(r), std::span<const int>(r)) == 1.0);
    CHECK(kendall_tau(std::span<const int>(r), std::span<const int>(rev)) == -1.0);
    CHECK(kendall_tau(std::span<const int>(r), std::span<const int>(swap)) == 4.0 / 6.0);
}

TEST_CASE("Kendall tau-b agrees with pair enumeration and is symmetric")
{
    for (std::uint64_t i = 0; i < 50; ++i) {
        Substream rng(31, i);
        const auto n = 2 + rng.below(8);
        std::vector<double> a(n), b(n);
        for (std::size_t k = 0; k < n; ++k) {
            a[k] = static_cast<double>(rng.below(4));
            b[k] = static_cast<double>(rng.below(4));
        }
        const bool degenerate = std::all_of(a.begin(), a.end(), [&](double x) { return x == a[0]; }) ||
                                std::all_of(b.begin(), b.end(), [&](double x) { return x == b[0]; });
        const double t = kendall_tau(std::span<const double>(a), std::span<const double>(b));
        CHECK(t == kendall_tau(std::span<const double>(b), std::span<const double>(a)));
        CHECK(t >= -1.0);
        CHECK(t <= 1.0);
        if (!degenerate)
            CHECK(t == doctest::Approx(oracle::kendall_tau_b(a, b)).epsilon(1e-14));
    }
}

TEST_CASE("Kendall tau degenerate inputs")
{
    const std::vector<int> tied{1, 1, 1}, r{1, 2, 3}, one{1};
    CHECK(kendall_tau(std::span<const int>(tied), std::span<const int>(tied)) == 1.0);
    CHECK(kendall_tau(std::span<const int>(tied), std::span<const int>(r)) == 0.0);
    CHECK_THROWS_AS(kendall_tau(std::span<const int>(one), std::span<const int>(one)), Error);
    CHECK_THROWS_AS(kendall_tau(std::span<const int>(r), std::span<const int>(tied.data(), 2)), Error);
}

TEST_CASE("Kendall tau between outcomes matches teams by id")
{
    RankingOutcome a{"x", {"A", "B", "C"}, {1, 2, 3}, {1, 2, 3}, {}, {}};
    RankingOutcome b{"x", {"C", "A", "B"}, {3, 1, 2}, {3, 1, 2}, {}, {}};
    CHECK(kendall_tau(a, b) == 1.0);
    RankingOutcome c{"x", {"A", "B", "D"}, {1, 2, 3}, {1, 2, 3}, {}, {}};
    CHECK_THROWS_AS(kendall_tau(a, c), Error);
}

TEST_CASE("bootstrap is deterministic and thread-count independent")
{
    const auto t = noisy_table(30, 5, 2, 0.05).table();
    BootstrapOptions o;
    o.n_samples = 200;
    o.seed = 99;
    o.threads = 1;
    const auto serial = bootstrap_stability(t, Scheme::rank_then_aggregate_mean, o);
    o.threads = 4;
    const auto parallel = bootstrap_stability(t, Scheme::rank_then_aggregate_mean, o);
    CHECK(serial.taus == parallel.taus);
    CHECK(serial.sample_ranks == parallel.sample_ranks);
    CHECK(bootstrap_to_json(serial) == bootstrap_to_json(parallel));
    o.seed = 100;
    CHECK(bootstrap_stability(t, Scheme::rank_then_aggregate_mean, o).taus != serial.taus);
}

TEST_CASE("bootstrap summary invariants")
{
    const auto t = noisy_table(25, 4, 3, 0.0).table();
    BootstrapOptions o;
    o.n_samples = 300;
    o.seed = 1;
    for (auto scheme : all_schemes) {
        const auto s = bootstrap_stability(t, scheme, o);
        CHECK(s.taus.size() == 300);
        CHECK(s.tau_q1 <= s.tau_median);
        CHECK(s.tau_median <= s.tau_q3);
        for (double tau : s.taus) {
            CHECK(tau >= -1.0);
            CHECK(tau <= 1.0);
        }
        for (const auto& ranks : s.sample_ranks) {
            // each sample ranking is a min-rank ranking: rank = 1 + #strictly better
            for (int r : ranks) {
                int better = 0;
                for (int q : ranks)
                    better += q < r;
                CHECK(r == 1 + better);
            }
        }
        CHECK(s.distinct_fraction_mean > 0.0);
        CHECK(s.distinct_fraction_mean <= 1.0);
    }
}

TEST_CASE("two strictly ordered teams give tau 1 in every sample")
{
    const auto t = noisy_table(20, 2, 5, 10.0).table();
    BootstrapOptions o;
    o.n_samples = 100;
    const auto s = bootstrap_stability(t, Scheme::rank_then_aggregate_mean, o);
    for (double tau : s.taus)
        CHECK(tau == 1.0);
}

TEST_CASE("metric subset stability")
{
    const auto t = noisy_table(20, 4, 6, 0.1).table();
    BootstrapOptions o;
    o.n_samples = 100;
    o.seed = 3;
    const auto full = bootstrap_stability(t, Scheme::rank_then_aggregate_mean, o);
    const auto subsets = metric_subset_stability(t, Scheme::rank_then_aggregate_mean, {{"DSC", "ASSD"}, {"DSC"}}, o);
    REQUIRE(subsets.size() == 2);
    CHECK(subsets[0].taus == full.taus);
    CHECK_THROWS_AS(metric_subset_stability(t, Scheme::rank_then_aggregate_mean, {{}}, o), Error);
}

TEST_CASE("ASSD outliers widen the single-metric tau spread")
{
    // DSC carries a clean ordering, ASSD is the same ordering plus heavy outliers.
    for (std::uint64_t seed = 70; seed < 76; ++seed) {
        std::vector<std::string> cases, teams{"a", "b", "c", "d", "e"};
        for (int c = 0; c < 40; ++c)
            cases.push_back("c" + std::to_string(c));
        Substream rng(seed, 0);
        std::vector<std::vector<double>> dsc(40, std::vector<double>(5)), assd = dsc;
        for (std::size_t c = 0; c < 40; ++c)
            for (std::size_t t = 0; t < 5; ++t) {
                dsc[c][t] = 0.9 - 0.02 * static_cast<double>(t) + rng.uniform(-0.03, 0.03);
                assd[c][t] = 1.0 + 0.1 * static_cast<double>(t) + (rng.bernoulli(0.2) ? rng.uniform(10, 100) : 0.0);
            }
        TableBuilder b(cases, teams);
        b.cell("vs", "DSC", dsc).cell("vs", "ASSD", assd);
        BootstrapOptions o;
        o.n_samples = 500;
        o.seed = 8;
        const auto s =
            metric_subset_stability(b.table(), Scheme::rank_then_aggregate_mean, {{"DSC", "ASSD"}, {"ASSD"}}, o);
        CHECK(s[1].tau_q3 - s[1].tau_q1 >= s[0].tau_q3 - s[0].tau_q1);
    }
}

TEST_CASE("scheme comparison")
{
    TableBuilder b({"c1", "c2"}, {"A", "B"});
    b.cell("vs", "ASSD", {{1.0, 100.0}, {1.1, 1.0}});
    const auto c = compare_schemes(b.table());
    REQUIRE(c.schemes.size() == 4);
    CHECK(c.schemes[0] == "rank-then-aggregate-mean");
    CHECK(c.final_ranks[0] == std::vector<int>{1, 1});
    CHECK(c.final_ranks[2] == std::vector<int>{1, 2});
    const auto back = comparison_from_json(comparison_to_json(c));
    CHECK(comparison_to_json(back) == comparison_to_json(c));
}

TEST_CASE("null-signal tables give tau centred near zero between independent draws")
{
    // Kendall tau between the rankings of two independent null tables.
    std::vector<double> taus;
    for (std::uint64_t i = 0; i < 200; ++i) {
        const auto r1 = rank_teams(noisy_table(30, 8, 1000 + 2 * i, 0.0).table(), Scheme::rank_then_aggregate_mean);
        const auto r2 = rank_teams(noisy_table(30, 8, 1001 + 2 * i, 0.0).table(), Scheme::rank_then_aggregate_mean);
        taus.push_back(kendall_tau(r1, r2));
    }
    CHECK(std::abs(mean(taus)) <= 0.1);
}

TEST_CASE("bootstrap JSON and CSV round trip")
{
    const auto t = noisy_table(10, 3, 4, 0.1).table();
    BootstrapOptions o;
    o.n_samples = 20;
    o.seed = 5;
    o.metrics = {"DSC"};
    const auto s = bootstrap_stability(t, Scheme::aggregate_then_rank_median, o);
    const auto back = bootstrap_from_text(bootstrap_to_json(s), bootstrap_ranks_to_csv(s));
    CHECK(back.taus == s.taus);
    CHECK(back.sample_ranks == s.sample_ranks);
    CHECK(back.teams == s.teams);
    CHECK(bootstrap_to_json(back) == bootstrap_to_json(s));
}
