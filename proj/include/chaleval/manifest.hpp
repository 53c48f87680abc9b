#pragma once

#include "chaleval/volume.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chaleval {

enum class StructureKind { direct, union_of, interface };
enum class Direction { higher_better, lower_better };

const char* to_string(StructureKind kind) noexcept;
const char* to_string(Direction direction) noexcept;

/// A region scored by the challenge. Direct structures select label ids;
/// union and interface structures combine previously declared direct ones.
/// Interface structures are scored with ASSD only (the split boundary).
struct StructureSpec {
    std::string name;
    StructureKind kind = StructureKind::direct;
    std::vector<int> labels;
    std::vector<std::string> operands;
    bool ranked = true;
};

struct MetricSpec {
    std::string name; // "DSC" or "ASSD"
    Direction direction = Direction::higher_better;
};

/// The only metrics understood by the engine and their fixed directions.
std::optional<Direction> known_metric_direction(std::string_view metric);

struct LabelEntry {
    std::string name;
    int id = 0;
};

struct ChallengeManifest {
    std::string scheme;              // label scheme id volumes must conform to
    std::vector<LabelEntry> labels;  // background (0) is always valid
    std::vector<std::string> cases;
    std::vector<std::string> teams;
    std::vector<StructureSpec> structures;
    std::vector<MetricSpec> metrics;
    double penalty_mm = 350.0;
    std::string ground_truth_path = "gt/{case}.nii.gz";
    std::string prediction_path = "pred/{team}/{case}.nii.gz";
    /// (better, worse) team pairs known to hold by construction (synthetic challenges).
    std::vector<std::pair<std::string, std::string>> dominance;
    /// Directory the path templates are relative to. Not serialized.
    std::filesystem::path base_dir;

    /// Throws invalid_manifest on any structural problem.
    void validate() const;

    const StructureSpec& structure(std::string_view name) const;
    bool has_label(int id) const noexcept;

    /// Metrics evaluated for a structure, in manifest order.
    std::vector<MetricSpec> metrics_for(const StructureSpec& s) const;

    /// (structure, metric) pairs that contribute to the ranking, in manifest order.
    std::vector<std::pair<std::string, std::string>> ranked_cells() const;

    std::filesystem::path ground_truth_file(std::string_view case_id) const;
    std::filesystem::path prediction_file(std::string_view team, std::string_view case_id) const;
};

ChallengeManifest parse_manifest(std::string_view json_text, std::filesystem::path base_dir = {});
std::string manifest_to_json(const ChallengeManifest& manifest);
ChallengeManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const ChallengeManifest& manifest, const std::filesystem::path& path);

/// Built-in layouts: "vs_cochlea" (tumour + cochlea, labels 1/2) and
/// "vs_split_cochlea" (intra-/extra-meatal tumour + cochlea, labels 1/2/3,
/// with the combined tumour and the split boundary as unranked extras).
ChallengeManifest preset_manifest(std::string_view name);

/// Throws label_not_in_scheme for any voxel label the manifest does not declare,
/// and scheme_mismatch if the volume is tagged with a different scheme.
void check_volume_scheme(const LabelVolume& volume, const ChallengeManifest& manifest);

/// Mask of a direct or union structure. Labels absent from the volume give an
/// empty mask. Interface structures have no mask (see interface_points).
BinaryMask extract_structure_mask(const LabelVolume& volume, const ChallengeManifest& manifest,
                                  std::string_view structure);

} // namespace chaleval
