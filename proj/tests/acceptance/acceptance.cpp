// Acceptance checks: one PASS/FAIL line per criterion.

#include "chaleval/cli.hpp"
#include "chaleval/ordinal.hpp"
#include "chaleval/ranking.hpp"
#include "chaleval/seg_metrics.hpp"
#include "chaleval/stability.hpp"
#include "chaleval/synth.hpp"

#include "../oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace chaleval;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(const char* name, const std::function<Outcome()>& check)
{
    Outcome o;
    try {
        o = check();
    }
    catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  %-28s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

struct MaskPair {
    BinaryMask pred, gt;
};

std::vector<MaskPair> random_pairs()
{
    std::vector<MaskPair> pairs;
    for (std::uint64_t i = 0; i < 200; ++i) {
        Substream rng(2024, i);
        Grid g{{16, 16, 16}, {rng.uniform(0.4, 1.5), rng.uniform(0.4, 1.5), rng.uniform(0.4, 1.5)}};
        const int blobs = 1 + static_cast<int>(rng.below(4));
        pairs.push_back({oracle::random_blob_mask(g, 7, 2 * i, blobs), oracle::random_blob_mask(g, 7, 2 * i + 1, blobs)});
    }
    return pairs;
}

BinaryMask with_spacing(const BinaryMask& m, const std::array<double, 3>& spacing)
{
    return BinaryMask(Grid{m.grid().dims, spacing}, m.bits());
}

BinaryMask flip(const BinaryMask& m, int axis)
{
    BinaryMask out(m.grid());
    const auto& d = m.grid().dims;
    for (int z = 0; z < d[2]; ++z)
        for (int y = 0; y < d[1]; ++y)
            for (int x = 0; x < d[0]; ++x) {
                Index3 i{x, y, z};
                i[axis] = d[axis] - 1 - i[axis];
                out.set(i, m.get(x, y, z));
            }
    return out;
}

// 90 degree rotation about z: (x, y, z) -> (y, X-1-x, z)
BinaryMask rotate_z(const BinaryMask& m)
{
    const auto& g = m.grid();
    BinaryMask out(Grid{{g.dims[1], g.dims[0], g.dims[2]}, {g.spacing[1], g.spacing[0], g.spacing[2]}});
    for (int z = 0; z < g.dims[2]; ++z)
        for (int y = 0; y < g.dims[1]; ++y)
            for (int x = 0; x < g.dims[0]; ++x)
                out.set(y, g.dims[0] - 1 - x, z, m.get(x, y, z));
    return out;
}

std::vector<ResultEntry> synthetic_results(const SynthSpec& spec)
{
    const auto manifest = synthetic_manifest(spec);
    std::vector<ResultEntry> rows;
    for (std::size_t i = 0; i < spec.n_cases; ++i) {
        const auto c = generate_case(spec, i);
        for (std::size_t t = 0; t < spec.teams.size(); ++t)
            for (auto& v : evaluate_case(c.predictions[t], c.ground_truth, manifest))
                rows.push_back({c.case_id, spec.teams[t].id, v.structure, v.metric, v.value, v.ranked, v.penalized,
                                v.both_empty});
    }
    return rows;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

int cli(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    if (code != 0)
        std::fprintf(stderr, "cli failed: %s\n", err.str().c_str());
    return code;
}

} // namespace

int main()
{
    const auto pairs = random_pairs();

    report("assd-oracle-equivalence", [&] {
        double engine_time = 0.0, worst = 0.0;
        for (const auto& p : pairs) {
            const auto t0 = std::chrono::steady_clock::now();
            const double v = assd(p.pred, p.gt, 350.0).value;
            engine_time += seconds_since(t0);
            worst = std::max(worst, std::abs(v - oracle::assd(p.pred, p.gt)));
        }
        return Outcome{worst <= 1e-9 && engine_time < 30.0,
                       fmt("200 pairs, max |diff| %.3g mm, engine %.2f s", worst, engine_time)};
    });

    report("dsc-oracle-equivalence", [&] {
        std::size_t bad = 0;
        for (const auto& p : pairs) {
            const double v = dice(p.pred, p.gt).value;
            bad += v != oracle::dice(p.pred, p.gt);
            bad += v != dice(p.gt, p.pred).value;
            for (int a = 0; a < 3; ++a)
                bad += v != dice(flip(p.pred, a), flip(p.gt, a)).value;
            bad += v != dice(rotate_z(p.pred), rotate_z(p.gt)).value;
        }
        return Outcome{bad == 0, fmt("200 pairs, %g mismatches over exactness, symmetry, 3 flips, rotation",
                                     static_cast<double>(bad))};
    });

    report("penalty-rule", [&] {
        std::size_t bad = 0;
        for (const auto& p : pairs) {
            const auto v = assd(BinaryMask(p.gt.grid()), p.gt, 350.0);
            bad += !(v.value == 350.0 && v.penalized);
        }
        // through the pipeline: a team that always drops its structures (5 ASSD rows per case)
        auto spec = graded_synth_spec(4, 1, 3);
        PerturbOp drop;
        drop.kind = PerturbOp::Kind::drop;
        spec.teams.push_back({"dropper", {{drop}, 1.0}});
        std::size_t penalized = 0;
        for (const auto& r : synthetic_results(spec)) {
            if (r.team != "dropper" || r.metric != "ASSD")
                continue;
            bad += !(r.value == 350.0 && r.penalized);
            ++penalized;
        }
        return Outcome{bad == 0 && penalized == 4 * 5,
                       fmt("%g empty-mask cases + %g pipeline rows at 350.0 mm, %g violations", 200.0,
                           static_cast<double>(penalized), static_cast<double>(bad))};
    });

    report("spacing-scaling", [&] {
        double worst = 0.0;
        std::size_t dsc_changed = 0;
        for (const auto& p : pairs) {
            const double base = assd(p.pred, p.gt, 350.0).value;
            const double base_dsc = dice(p.pred, p.gt).value;
            for (double lambda : {0.5, 2.0, 3.7}) {
                const auto& s = p.gt.grid().spacing;
                const std::array<double, 3> scaled{s[0] * lambda, s[1] * lambda, s[2] * lambda};
                const auto sp = with_spacing(p.pred, scaled), sg = with_spacing(p.gt, scaled);
                const double v = assd(sp, sg, 350.0).value;
                worst = std::max(worst, std::abs(v - lambda * base) / (lambda * base));
                dsc_changed += dice(sp, sg).value != base_dsc;
            }
        }
        return Outcome{worst <= 1e-9 && dsc_changed == 0,
                       fmt("lambda in {0.5, 2, 3.7}: max rel err %.3g, DSC changes %g", worst,
                           static_cast<double>(dsc_changed))};
    });

    report("tie-rule", [&] {
        const std::vector<double> ex{0.9, 0.9, 0.8};
        bool ok = min_ranks(ex, Direction::higher_better) == std::vector<int>{1, 1, 3};
        std::size_t checked = 0;
        for (std::uint64_t i = 0; i < 50; ++i) {
            Substream rng(404, i);
            const std::size_t n_teams = 2 + rng.below(7), n_cases = 1 + rng.below(5);
            std::vector<ResultEntry> rows;
            std::vector<std::string> teams;
            for (std::size_t t = 0; t < n_teams; ++t)
                teams.push_back("t" + std::to_string(t));
            for (std::size_t c = 0; c < n_cases; ++c)
                for (const auto& t : teams) {
                    rows.push_back({"c" + std::to_string(c), t, "vs", "DSC", static_cast<double>(rng.below(3)) / 2});
                    rows.push_back({"c" + std::to_string(c), t, "vs", "ASSD", static_cast<double>(rng.below(3))});
                }
            const ResultsTable table(rows);
            for (std::size_t c = 0; c < n_cases; ++c)
                for (const char* metric : {"DSC", "ASSD"}) {
                    std::vector<double> vals;
                    for (std::size_t t = 0; t < n_teams; ++t)
                        vals.push_back(table.value(table.cell_index("vs", metric), c, t));
                    ok = ok && per_cell_ranks(table, "c" + std::to_string(c), "vs", metric) ==
                                   oracle::min_ranks(vals, std::string(metric) == "DSC");
                    ++checked;
                }
            for (auto s : all_schemes) {
                const auto r = rank_teams(table, s);
                ok = ok && r.final_ranks == oracle::min_ranks(r.rank_scores, false);
            }
        }
        return Outcome{ok, fmt("(0.9, 0.9, 0.8) -> (1, 1, 3); %g tied cells in 50 tables plus final ranks", static_cast<double>(checked))};
    });

    report("ranking-dominance", [&] {
        int reproduced = 0, agree = 0;
        for (std::uint64_t rep = 0; rep < 20; ++rep) {
            const auto op = rep % 2 ? PerturbOp::Kind::erode : PerturbOp::Kind::dilate;
            const auto spec = graded_synth_spec(20, 5, 1000 + rep, op);
            const auto manifest = synthetic_manifest(spec);
            const ResultsTable table(synthetic_results(spec));
            std::vector<std::vector<int>> per_scheme;
            for (auto s : all_schemes)
                per_scheme.push_back(rank_teams(table, s).final_ranks);
            bool follows = true;
            for (const auto& [better, worse] : manifest.dominance) {
                const auto r = rank_teams(table, Scheme::rank_then_aggregate_mean);
                follows = follows && r.rank_of(better) < r.rank_of(worse);
            }
            reproduced += follows;
            agree += std::all_of(per_scheme.begin(), per_scheme.end(),
                                 [&](const std::vector<int>& r) { return r == per_scheme.front(); });
        }
        return Outcome{reproduced == 20 && agree == 20,
                       fmt("official order matches dominance in %g/20, all four schemes agree in %g/20",
                           reproduced, agree)};
    });

    report("bootstrap-statistics", [&] {
        const auto t0 = std::chrono::steady_clock::now();
        auto spec = graded_synth_spec(341, 4, 63, PerturbOp::Kind::dilate);
        spec.teams[2].profile.ops[0].kind = PerturbOp::Kind::jitter;
        spec.teams[2].profile.ops[0].amount = 0.4;
        spec.teams[3].profile.ops[0].kind = PerturbOp::Kind::jitter;
        spec.teams[3].profile.ops[0].amount = 0.3;
        const ResultsTable table(synthetic_results(spec));
        BootstrapOptions o;
        o.n_samples = 1000;
        o.seed = 7;
        const auto s = bootstrap_stability(table, Scheme::rank_then_aggregate_mean, o);
        const double elapsed = seconds_since(t0);
        const std::size_t leader = table.team_index("team0");
        std::size_t leader_first = 0;
        for (const auto& r : s.sample_ranks)
            leader_first += r[leader] == 1;
        const bool ok = s.reference_ranks[leader] == 1 && s.distinct_fraction_mean >= 0.61 &&
                        s.distinct_fraction_mean <= 0.66 && leader_first == 1000 && elapsed < 60.0;
        return Outcome{ok, fmt("N=341: mean distinct fraction %.4f, leader first in %g/1000, %.1f s",
                               s.distinct_fraction_mean, static_cast<double>(leader_first), elapsed)};
    });

    report("kendall-tau", [&] {
        bool ok = true;
        std::mt19937_64 gen(5);
        for (int n = 2; n <= 12; ++n) {
            std::vector<int> r(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                r[static_cast<std::size_t>(i)] = i + 1;
            std::shuffle(r.begin(), r.end(), gen);
            std::vector<int> rev(r.size());
            for (std::size_t i = 0; i < r.size(); ++i)
                rev[i] = n + 1 - r[i];
            ok = ok && kendall_tau(std::span<const int>(r), std::span<const int>(r)) == 1.0 &&
                 kendall_tau(std::span<const int>(r), std::span<const int>(rev)) == -1.0;
        }
        const std::vector<int> a{1, 2, 3, 4}, b{2, 1, 3, 4};
        const double w = kendall_tau(std::span<const int>(a), std::span<const int>(b));
        return Outcome{ok && w == 2.0 / 3.0, fmt("endpoints for n = 2..12; [1,2,3,4] vs [2,1,3,4] = %.17g", w)};
    });

    report("ma-mae", [&] {
        const auto set = [](const std::vector<int>& t, const std::vector<int>& p) {
            std::vector<OrdinalItem> items;
            for (std::size_t i = 0; i < t.size(); ++i)
                items.push_back({"c" + std::to_string(i), t[i], p[i]});
            return OrdinalPredictionSet(items);
        };
        const double worked = ma_mae(set({1, 2, 2, 4}, {1, 3, 2, 3}));
        const double perfect = ma_mae(set({1, 2, 3, 4, 2}, {1, 2, 3, 4, 2}));
        const double one_off = ma_mae(set({1, 2, 3, 4, 3}, {2, 1, 4, 3, 2}));
        const auto r = rank_koos({{"first", 0.26}, {"second", 0.37}, {"third", 0.84}});
        const bool order = r.rank_of("first") == 1 && r.rank_of("second") == 2 && r.rank_of("third") == 3;
        return Outcome{worked == 0.5 && perfect == 0.0 && one_off == 1.0 && order,
                       fmt("worked %.17g, perfect %g, one-off %g; (0.26, 0.37, 0.84) -> (1, 2, 3)", worked, perfect,
                           one_off)};
    });

    report("outlier-sensitivity", [&] {
        std::vector<ResultEntry> rows;
        const auto add = [&](const char* c, const char* t, double dsc, double assd) {
            rows.push_back({c, t, "vs", "DSC", dsc});
            rows.push_back({c, t, "vs", "ASSD", assd});
        };
        add("c1", "A", 0.85, 1.0);
        add("c1", "B", 0.86, 0.9);
        add("c2", "A", 0.85, 1.0);
        add("c2", "B", 0.86, 0.9);
        add("c3", "A", 0.85, 1.0);
        add("c3", "B", 0.70, 40.0); // injected ASSD outlier
        const ResultsTable table(rows);
        const auto rta = rank_teams(table, Scheme::rank_then_aggregate_mean);
        const auto atr = rank_teams(table, Scheme::aggregate_then_rank_mean);
        const bool differ = rta.final_ranks != atr.final_ranks;
        return Outcome{differ && rta.rank_of("B") == 1 && atr.rank_of("A") == 1,
                       fmt("rank-then-aggregate-mean: A %.4f, B %.4f; aggregate-then-rank-mean leader %s",
                           rta.score_of("A"), rta.score_of("B")) +
                           (atr.rank_of("A") == 1 ? "A" : "B")};
    });

    report("end-to-end-determinism", [&] {
        std::random_device rd;
        const fs::path root = fs::temp_directory_path() / ("chaleval_acceptance_" + std::to_string(rd()));
        std::vector<fs::path> runs{root / "run1", root / "run2"};
        for (const auto& dir : runs) {
            const auto d = [&](const char* sub) { return (dir / sub).string(); };
            if (cli({"synth", "--cases", "12", "--teams", "4", "--seed", "11", "--out", d("challenge")}) ||
                cli({"evaluate", "--manifest", d("challenge/manifest.json"), "--out", d("results.csv")}) ||
                cli({"rank", "--results", d("results.csv"), "--out", d("rank")}) ||
                cli({"stability", "--results", d("results.csv"), "--samples", "1000", "--seed", "7", "--out",
                     d("stability")}) ||
                cli({"compare-schemes", "--results", d("results.csv"), "--out", d("compare")}) ||
                cli({"report", "--results", d("results.csv"), "--ranking", d("rank/ranking.json"), "--stability",
                     d("stability/stability.json"), "--comparison", d("compare/comparison.json"), "--out", d("report")}))
                return Outcome{false, "pipeline command failed"};
        }
        std::size_t files = 0, differing = 0;
        for (const auto& e : fs::recursive_directory_iterator(runs[0])) {
            if (!e.is_regular_file())
                continue;
            ++files;
            const auto rel = fs::relative(e.path(), runs[0]);
            differing += slurp(e.path()) != slurp(runs[1] / rel);
        }
        std::error_code ec;
        fs::remove_all(root, ec);
        return Outcome{files > 0 && differing == 0,
                       fmt("%g files (NIfTI, CSV, JSON, SVG) compared across two runs, %g differ",
                           static_cast<double>(files), static_cast<double>(differing))};
    });

    std::printf("%s: %d failing criteria\n", failures ? "FAILED" : "ALL PASSED", failures);
    return failures ? 1 : 0;
}
