#include "chaleval/cli.hpp"

#include "chaleval/csv.hpp"
#include "chaleval/error.hpp"
#include "chaleval/evaluate.hpp"
#include "chaleval/ordinal.hpp"
#include "chaleval/ranking.hpp"
#include "chaleval/report.hpp"
#include "chaleval/serialize.hpp"
#include "chaleval/stability.hpp"
#include "chaleval/synth.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <ostream>
#include <sstream>

namespace chaleval {

namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::io, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s + ",") {
        if (c == ',') {
            if (!cur.empty())
                out.push_back(cur);
            cur.clear();
        }
        else if (c != ' ') {
            cur += c;
        }
    }
    return out;
}

std::string file_safe(std::string s)
{
    for (char& c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'))
            c = '_';
    return s;
}

struct Options {
    std::string manifest;
    std::string results;
    std::string ranking;
    std::string stability;
    std::string stability_ranks;
    std::string comparison;
    std::string scheme = "official";
    std::size_t samples = 1000;
    std::uint64_t seed = 0;
    std::string metrics;
    bool fixed_class_count = false;
    std::string out;
    std::string team;
    std::string submission;
    std::string truth;
    std::vector<std::string> preds;
    unsigned threads = 0;
    std::string spec;
    std::size_t cases = 20;
    std::size_t teams = 3;
    std::string op = "dilate";
    std::string label_scheme = "vs_split_cochlea";
};

int cmd_validate(const Options& o, std::ostream& out)
{
    const auto manifest = load_manifest(o.manifest);
    ValidationReport report;
    if (!o.submission.empty()) {
        if (o.team.empty())
            throw Error(ErrorCode::invalid_argument, "--submission requires --team");
        report = validate_submission(manifest, o.team, fs::path(o.submission));
    }
    else if (!o.team.empty()) {
        report = validate_submission(manifest, o.team);
    }
    else {
        report = validate_challenge(manifest);
    }
    for (const auto& i : report.issues)
        out << to_string(i.kind) << "\t" << i.team << "\t" << (i.case_id.empty() ? "-" : i.case_id) << "\t"
            << i.path.string() << "\t" << i.detail << "\n";
    out << (report.valid() ? "valid" : "invalid") << " (" << report.issues.size() << " issues)\n";
    return report.valid() ? exit_ok : exit_invalid;
}

int cmd_evaluate(const Options& o, std::ostream& out, std::ostream& err)
{
    const auto manifest = load_manifest(o.manifest);
    const auto report = validate_challenge(manifest);
    if (!report.valid()) {
        for (const auto& i : report.issues)
            err << "error: " << to_string(i.kind) << " " << i.team << " " << i.case_id << " " << i.path.string() << ": "
                << i.detail << "\n";
        return exit_invalid;
    }
    std::vector<std::string> warnings;
    const auto entries = evaluate_challenge(manifest, o.threads, &warnings);
    for (const auto& w : warnings)
        err << "warning: " << w << "\n";
    const fs::path path = o.out.empty() ? fs::path("results.csv") : fs::path(o.out);
    write_text_file(path, results_to_csv(entries));
    out << "wrote " << entries.size() << " rows to " << path.string() << "\n";
    return exit_ok;
}

fs::path out_dir(const Options& o)
{
    return o.out.empty() ? fs::path(".") : fs::path(o.out);
}

int cmd_rank(const Options& o, std::ostream& out)
{
    const auto table = read_results_csv(o.results);
    const auto r = rank_teams(table, parse_scheme(o.scheme), RankOptions{split_list(o.metrics)});
    const auto dir = out_dir(o);
    write_text_file(dir / "ranking.json", ranking_to_json(r));
    write_text_file(dir / "ranking.csv", ranking_to_csv(r));
    out << ranking_to_csv(r);
    return exit_ok;
}

int cmd_stability(const Options& o, std::ostream& out)
{
    const auto table = read_results_csv(o.results);
    BootstrapOptions bo;
    bo.n_samples = o.samples;
    bo.seed = o.seed;
    bo.metrics = split_list(o.metrics);
    bo.threads = o.threads;
    const auto s = bootstrap_stability(table, parse_scheme(o.scheme), bo);
    const auto dir = out_dir(o);
    write_text_file(dir / "stability.json", bootstrap_to_json(s));
    write_text_file(dir / "stability_ranks.csv", bootstrap_ranks_to_csv(s));
    out << "kendall tau median " << format_fixed(s.tau_median, 4) << " IQR [" << format_fixed(s.tau_q1, 4) << "; "
        << format_fixed(s.tau_q3, 4) << "], mean distinct-case fraction " << format_fixed(s.distinct_fraction_mean, 4)
        << "\n";
    return exit_ok;
}

int cmd_compare(const Options& o, std::ostream& out)
{
    auto table = read_results_csv(o.results);
    const auto metrics = split_list(o.metrics);
    if (!metrics.empty()) {
        std::vector<ResultEntry> kept;
        for (const auto& e : table.entries())
            if (!e.ranked || std::find(metrics.begin(), metrics.end(), e.metric) != metrics.end())
                kept.push_back(e);
        table = ResultsTable(std::move(kept));
    }
    const auto c = compare_schemes(table);
    const auto dir = out_dir(o);
    write_text_file(dir / "comparison.json", comparison_to_json(c));
    write_text_file(dir / "comparison.csv", comparison_to_csv(c));
    out << comparison_to_csv(c);
    return exit_ok;
}

int cmd_koos(const Options& o, std::ostream& out)
{
    if (o.truth.empty() || o.preds.empty())
        throw Error(ErrorCode::invalid_argument, "koos needs --truth and at least one --pred TEAM=path");
    const auto truth = read_grade_csv(o.truth);
    std::vector<std::pair<std::string, double>> scores;
    for (const auto& p : o.preds) {
        const auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0)
            throw Error(ErrorCode::invalid_argument, "--pred expects TEAM=path, got '" + p + "'");
        const auto set = join_grades(truth, read_grade_csv(p.substr(eq + 1)));
        scores.emplace_back(p.substr(0, eq), ma_mae(set, o.fixed_class_count));
    }
    const auto r = rank_koos(scores);
    std::string csv = "team,ma_mae,rank\n";
    for (const auto& [team, score] : scores)
        csv += team + "," + format_double(score) + "," + std::to_string(r.rank_of(team)) + "\n";
    const auto dir = out_dir(o);
    write_text_file(dir / "koos.json", ranking_to_json(r));
    write_text_file(dir / "koos.csv", csv);
    out << csv;
    return exit_ok;
}

int cmd_synth(const Options& o, std::ostream& out)
{
    SynthSpec spec;
    if (!o.spec.empty()) {
        spec = parse_synth_spec(read_text(o.spec));
    }
    else {
        spec = graded_synth_spec(o.cases, o.teams, o.seed, parse_perturb_kind(o.op));
        spec.scheme = o.label_scheme;
    }
    spec.threads = o.threads;
    if (o.out.empty())
        throw Error(ErrorCode::invalid_argument, "synth needs --out");
    const auto m = generate_challenge(spec, o.out);
    out << "wrote " << m.cases.size() << " cases for " << m.teams.size() << " teams to " << o.out << "\n";
    return exit_ok;
}

int cmd_report(const Options& o, std::ostream& out)
{
    const auto table = read_results_csv(o.results);
    const auto ranking = o.ranking.empty() ? rank_teams(table, parse_scheme(o.scheme), RankOptions{split_list(o.metrics)})
                                           : ranking_from_json(read_text(o.ranking));
    const auto rows = build_leaderboard(table.entries(), ranking);
    const auto dir = out_dir(o);
    const auto text = leaderboard_text(rows);
    write_text_file(dir / "leaderboard.txt", text);
    write_text_file(dir / "leaderboard.csv", leaderboard_csv(rows));
    if (!rows.empty())
        for (const auto& c : rows.front().cells)
            write_text_file(dir / ("box_" + file_safe(c.structure) + "_" + file_safe(c.metric) + ".svg"),
                            box_plot_svg(table.entries(), c.structure, c.metric, rows));
    if (!o.stability.empty()) {
        const fs::path json_path(o.stability);
        const fs::path csv_path = o.stability_ranks.empty() ? json_path.parent_path() / "stability_ranks.csv"
                                                            : fs::path(o.stability_ranks);
        write_text_file(dir / "blob.svg", blob_plot_svg(bootstrap_from_text(read_text(json_path), read_text(csv_path))));
    }
    if (!o.comparison.empty())
        write_text_file(dir / "schemes.svg", line_plot_svg(comparison_from_json(read_text(o.comparison))));
    out << text;
    return exit_ok;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Segmentation and grading challenge evaluation"};
    app.require_subcommand(1);
    Options o;

    auto add_threads = [&](CLI::App* c) { c->add_option("--threads", o.threads, "Worker threads (0 = all cores)"); };
    auto add_out = [&](CLI::App* c, const char* what) { c->add_option("--out", o.out, what); };
    auto add_metrics = [&](CLI::App* c) {
        c->add_option("--metrics", o.metrics, "Comma-separated metric subset, e.g. DSC");
    };
    auto add_scheme = [&](CLI::App* c) {
        c->add_option("--scheme", o.scheme, "Ranking scheme")->capture_default_str();
    };

    auto* validate = app.add_subcommand("validate", "Check submissions for completeness and well-formedness");
    validate->add_option("--manifest", o.manifest, "Challenge manifest JSON")->required();
    validate->add_option("--team", o.team, "Validate only this team");
    validate->add_option("--submission", o.submission, "Directory holding <case>.nii.gz files for --team");

    auto* evaluate = app.add_subcommand("evaluate", "Compute all metrics into a long-form results CSV");
    evaluate->add_option("--manifest", o.manifest, "Challenge manifest JSON")->required();
    add_out(evaluate, "Results CSV path");
    add_threads(evaluate);

    auto* rank = app.add_subcommand("rank", "Rank teams from a results CSV");
    rank->add_option("--results", o.results, "Results CSV")->required();
    add_scheme(rank);
    add_metrics(rank);
    add_out(rank, "Output directory");

    auto* stability = app.add_subcommand("stability", "Bootstrap ranking stability");
    stability->add_option("--results", o.results, "Results CSV")->required();
    add_scheme(stability);
    stability->add_option("--samples", o.samples, "Bootstrap samples")->capture_default_str();
    stability->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    add_metrics(stability);
    add_out(stability, "Output directory");
    add_threads(stability);

    auto* compare = app.add_subcommand("compare-schemes", "Rank under every aggregation scheme");
    compare->add_option("--results", o.results, "Results CSV")->required();
    add_metrics(compare);
    add_out(compare, "Output directory");

    auto* koos = app.add_subcommand("koos", "Score ordinal grade predictions by MA-MAE");
    koos->add_option("--truth", o.truth, "CSV of case_id,grade")->required();
    koos->add_option("--pred", o.preds, "TEAM=path to a CSV of case_id,grade (repeatable)")->required();
    koos->add_flag("--fixed-class-count", o.fixed_class_count, "Average over the whole grade domain");
    add_out(koos, "Output directory");

    auto* synth = app.add_subcommand("synth", "Generate a synthetic challenge");
    synth->add_option("--spec", o.spec, "Synthetic challenge spec JSON");
    synth->add_option("--cases", o.cases, "Number of cases")->capture_default_str();
    synth->add_option("--teams", o.teams, "Number of teams with severities 0, 1, ...")->capture_default_str();
    synth->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    synth->add_option("--op", o.op, "Perturbation: dilate, erode, translate, drop, jitter")->capture_default_str();
    synth->add_option("--label-scheme", o.label_scheme, "vs_split_cochlea or vs_cochlea")->capture_default_str();
    add_out(synth, "Output directory");
    add_threads(synth);

    auto* report = app.add_subcommand("report", "Leaderboard table and SVG plots");
    report->add_option("--results", o.results, "Results CSV")->required();
    report->add_option("--ranking", o.ranking, "Ranking JSON (default: rank the results with --scheme)");
    add_scheme(report);
    add_metrics(report);
    report->add_option("--stability", o.stability, "Stability JSON for the blob plot");
    report->add_option("--stability-ranks", o.stability_ranks, "Per-sample ranks CSV (default: next to the JSON)");
    report->add_option("--comparison", o.comparison, "Scheme comparison JSON for the line plot");
    add_out(report, "Output directory");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    }
    catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    }
    catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    }

    try {
        if (validate->parsed())
            return cmd_validate(o, out);
        if (evaluate->parsed())
            return cmd_evaluate(o, out, err);
        if (rank->parsed())
            return cmd_rank(o, out);
        if (stability->parsed())
            return cmd_stability(o, out);
        if (compare->parsed())
            return cmd_compare(o, out);
        if (koos->parsed())
            return cmd_koos(o, out);
        if (synth->parsed())
            return cmd_synth(o, out);
        if (report->parsed())
            return cmd_report(o, out);
    }
    catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    }
    return exit_input_error;
}

} // namespace chaleval
