#include "chaleval/evaluate.hpp"

#include "chaleval/error.hpp"
#include "chaleval/nifti.hpp"
#include "chaleval/seg_metrics.hpp"

#include <algorithm>
#include <set>
#include <thread>

namespace chaleval {

namespace fs = std::filesystem;

const char* to_string(ValidationIssue::Kind kind) noexcept
{
    switch (kind) {
    case ValidationIssue::Kind::missing: return "missing";
    case ValidationIssue::Kind::extra: return "extra";
    case ValidationIssue::Kind::unreadable: return "unreadable";
    case ValidationIssue::Kind::grid_mismatch: return "grid-mismatch";
    case ValidationIssue::Kind::label_not_in_scheme: return "label-not-in-scheme";
    }
    return "?";
}

namespace {

template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& body)
{
    unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < n; i += workers)
                        body(i);
                }
                catch (...) {
                    errors[w] = std::current_exception();
                }
            });
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

std::string strip_nifti_suffix(const std::string& name)
{
    for (const char* suffix : {".nii.gz", ".nii"}) {
        const std::string s(suffix);
        if (name.size() > s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0)
            return name.substr(0, name.size() - s.size());
    }
    return name;
}

} // namespace

ValidationReport validate_submission(const ChallengeManifest& manifest, const std::string& team,
                                     const std::optional<fs::path>& submission_dir)
{
    ValidationReport report;
    std::set<std::string> expected_names;
    fs::path listing_dir;
    std::vector<fs::path> files;
    for (const auto& case_id : manifest.cases) {
        fs::path p;
        if (submission_dir) {
            p = *submission_dir / (case_id + ".nii.gz");
            if (!fs::exists(p) && fs::exists(*submission_dir / (case_id + ".nii")))
                p = *submission_dir / (case_id + ".nii");
            expected_names.insert(case_id);
            listing_dir = *submission_dir;
        }
        else {
            p = manifest.prediction_file(team, case_id);
            expected_names.insert(p.filename().string());
            listing_dir = p.parent_path();
        }
        files.push_back(p);
    }

    for (std::size_t i = 0; i < manifest.cases.size(); ++i) {
        const auto& case_id = manifest.cases[i];
        const auto& p = files[i];
        if (!fs::exists(p)) {
            report.issues.push_back({ValidationIssue::Kind::missing, team, case_id, p, "no prediction file"});
            continue;
        }
        LabelVolume pred;
        try {
            pred = read_label_volume(p);
        }
        catch (const Error& e) {
            report.issues.push_back({ValidationIssue::Kind::unreadable, team, case_id, p, e.what()});
            continue;
        }
        const LabelVolume gt = read_label_volume(manifest.ground_truth_file(case_id));
        if (!grids_compatible(pred.grid(), gt.grid())) {
            try {
                check_grid_compatible(pred, gt);
            }
            catch (const Error& e) {
                report.issues.push_back({ValidationIssue::Kind::grid_mismatch, team, case_id, p, e.what()});
            }
            continue;
        }
        try {
            check_volume_scheme(pred, manifest);
        }
        catch (const Error& e) {
            report.issues.push_back({ValidationIssue::Kind::label_not_in_scheme, team, case_id, p, e.what()});
        }
    }

    if (!listing_dir.empty() && fs::is_directory(listing_dir)) {
        std::vector<fs::path> extras;
        for (const auto& entry : fs::directory_iterator(listing_dir)) {
            if (!entry.is_regular_file())
                continue;
            const auto name = entry.path().filename().string();
            const auto key = submission_dir ? strip_nifti_suffix(name) : name;
            if (!expected_names.count(key))
                extras.push_back(entry.path());
        }
        std::sort(extras.begin(), extras.end());
        for (const auto& e : extras)
            report.issues.push_back({ValidationIssue::Kind::extra, team, "", e, "not a case of this challenge"});
    }
    return report;
}

ValidationReport validate_challenge(const ChallengeManifest& manifest)
{
    ValidationReport all;
    for (const auto& team : manifest.teams) {
        auto r = validate_submission(manifest, team);
        all.issues.insert(all.issues.end(), r.issues.begin(), r.issues.end());
    }
    return all;
}

std::vector<ResultEntry> evaluate_challenge(const ChallengeManifest& manifest, unsigned threads,
                                            std::vector<std::string>* warnings)
{
    std::vector<std::vector<ResultEntry>> per_case(manifest.cases.size());
    std::vector<std::vector<std::string>> per_case_warnings(manifest.cases.size());
    parallel_for(manifest.cases.size(), threads, [&](std::size_t i) {
        const auto& case_id = manifest.cases[i];
        const auto note_oblique = [&](const LabelVolume& v, const fs::path& p) {
            if (v.is_oblique())
                per_case_warnings[i].push_back(p.string() + ": oblique affine; distances use voxel spacing only");
        };
        const auto gt_path = manifest.ground_truth_file(case_id);
        const LabelVolume gt = read_label_volume(gt_path, manifest.scheme);
        note_oblique(gt, gt_path);
        for (const auto& team : manifest.teams) {
            const auto pred_path = manifest.prediction_file(team, case_id);
            const LabelVolume pred = read_label_volume(pred_path, manifest.scheme);
            note_oblique(pred, pred_path);
            for (auto& v : evaluate_case(pred, gt, manifest))
                per_case[i].push_back(
                    {case_id, team, std::move(v.structure), std::move(v.metric), v.value, v.ranked, v.penalized, v.both_empty});
        }
    });
    std::vector<ResultEntry> out;
    for (auto& rows : per_case)
        std::move(rows.begin(), rows.end(), std::back_inserter(out));
    if (warnings)
        for (auto& w : per_case_warnings)
            std::move(w.begin(), w.end(), std::back_inserter(*warnings));
    return out;
}

} // namespace chaleval
