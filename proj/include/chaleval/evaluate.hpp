#pragma once

#include "chaleval/manifest.hpp"
#include "chaleval/results.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace chaleval {

struct ValidationIssue {
    enum class Kind { missing, extra, unreadable, grid_mismatch, label_not_in_scheme };

    Kind kind = Kind::missing;
    std::string team;
    std::string case_id; // empty for extra files
    std::filesystem::path path;
    std::string detail;
};

const char* to_string(ValidationIssue::Kind kind) noexcept;

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool valid() const noexcept { return issues.empty(); }
};

/// Checks one team's predictions: every case present and readable, on the
/// reference grid, using only declared labels; no unexpected files. With a
/// submission directory, files are expected as <dir>/<case>.nii.gz (or .nii);
/// otherwise the manifest's prediction path template is used.
ValidationReport validate_submission(const ChallengeManifest& manifest, const std::string& team,
                                     const std::optional<std::filesystem::path>& submission_dir = std::nullopt);

/// validate_submission for every team in the manifest.
ValidationReport validate_challenge(const ChallengeManifest& manifest);

/// Scores every (case, team) pair. Rows are ordered by case, then team, then
/// structure and metric in manifest order. Cases run in parallel. Oblique
/// affines are accepted; one message per affected file goes to `warnings`.
std::vector<ResultEntry> evaluate_challenge(const ChallengeManifest& manifest, unsigned threads = 0,
                                            std::vector<std::string>* warnings = nullptr);

} // namespace chaleval
