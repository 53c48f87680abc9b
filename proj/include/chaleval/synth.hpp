#pragma once

#include "chaleval/manifest.hpp"
#include "chaleval/volume.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace chaleval {

/// One morphological perturbation; its magnitude is multiplied by the
/// profile severity, so severity 0 is always the identity.
struct PerturbOp {
    enum class Kind { dilate, erode, translate, drop, jitter };

    Kind kind = Kind::dilate;
    double amount = 1.0;             // iterations (dilate/erode) or probability (drop/jitter)
    std::array<int, 3> offset{0, 0, 0}; // translate, in voxels at severity 1
};

const char* to_string(PerturbOp::Kind kind) noexcept;
PerturbOp::Kind parse_perturb_kind(std::string_view name);

struct PerturbationProfile {
    std::vector<PerturbOp> ops;
    double severity = 0.0;

    /// Same op list; severities may differ.
    bool same_ops(const PerturbationProfile& other) const;
};

/// Applies the profile's ops in order. Random choices (drop, jitter) come
/// from Substream(case_seed, op index).
BinaryMask perturb_mask(const BinaryMask& mask, const PerturbationProfile& profile, std::uint64_t case_seed);

/// 6-connected morphology; voxels outside the grid count as background.
BinaryMask dilate6(const BinaryMask& mask, int iterations);
BinaryMask erode6(const BinaryMask& mask, int iterations);
BinaryMask translate(const BinaryMask& mask, const std::array<int, 3>& offset);

struct PhantomSpec {
    std::array<double, 2> tumour_radius{4.0, 8.0}; // voxels, drawn per axis
    double split_fraction = 0.3;                   // split plane offset, relative to the x radius
    double cochlea_radius = 2.0;                   // voxels
    int margin = 4;                                // minimum distance to the grid border, >= 2
    int gap = 10;                                  // minimum tumour-to-cochlea clearance along x
};

struct TeamSpec {
    std::string id;
    PerturbationProfile profile;
};

struct SynthSpec {
    std::size_t n_cases = 20;
    Grid grid{{48, 40, 32}, {0.5, 0.5, 1.0}};
    PhantomSpec phantom;
    std::vector<TeamSpec> teams;
    std::uint64_t seed = 0;
    std::string scheme = "vs_split_cochlea"; // or "vs_cochlea"
    unsigned threads = 0;

    void validate() const;
};

/// `n_teams` teams sharing one op with severities 0, 1, ..., n_teams - 1.
SynthSpec graded_synth_spec(std::size_t n_cases, std::size_t n_teams, std::uint64_t seed,
                            PerturbOp::Kind op = PerturbOp::Kind::dilate);

SynthSpec parse_synth_spec(std::string_view json_text);

struct SyntheticCase {
    std::string case_id;
    LabelVolume ground_truth;
    std::vector<LabelVolume> predictions; // SynthSpec::teams order
};

std::string synthetic_case_id(std::size_t index, std::size_t n_cases);

/// Manifest describing a synthetic challenge (cases, teams, dominance), with
/// the default path templates.
ChallengeManifest synthetic_manifest(const SynthSpec& spec);

/// Deterministic in (spec, index).
SyntheticCase generate_case(const SynthSpec& spec, std::size_t index);

/// Writes gt/<case>.nii.gz, pred/<team>/<case>.nii.gz and manifest.json under
/// out_dir and returns the manifest.
ChallengeManifest generate_challenge(const SynthSpec& spec, const std::filesystem::path& out_dir);

} // namespace chaleval
