#pragma once

#include "chaleval/manifest.hpp"
#include "chaleval/volume.hpp"

#include <array>
#include <string>
#include <vector>

namespace chaleval {

/// Voxel-centre surface samples. points[i] == indices[i] * grid.spacing.
struct BoundaryPointSet {
    Grid grid;
    std::vector<Index3> indices;
    std::vector<std::array<double, 3>> points;

    std::size_t count() const noexcept { return indices.size(); }
    bool empty() const noexcept { return indices.empty(); }
};

struct MetricValue {
    std::string metric;
    std::string structure;
    double value = 0.0;
    bool penalized = false;  // ASSD replaced by the empty-prediction penalty
    bool both_empty = false; // DSC of two empty masks, reported as 1.0
    bool ranked = true;
};

/// 2|P and G| / (|P| + |G|). Two empty masks score 1.0 with both_empty set.
MetricValue dice(const BinaryMask& pred, const BinaryMask& gt, const std::string& structure = {});

/// Foreground voxels with at least one 6-neighbour that is background or
/// outside the grid, in linear (x fastest) order.
BoundaryPointSet boundary_points(const BinaryMask& mask);

/// Euclidean distance (mm) from every point of `from` to the nearest point of
/// `to`, in the order of `from`. Exact: computed with a separable squared
/// distance transform over the bounding box of both sets.
std::vector<double> point_to_set_distances(const BoundaryPointSet& from, const BoundaryPointSet& to);

/// Symmetric mean surface distance between two nonempty point sets.
double average_symmetric_distance(const BoundaryPointSet& a, const BoundaryPointSet& b);

/// Average symmetric surface distance in mm. An empty prediction scores
/// penalty_mm with penalized set; an empty ground truth is an error.
MetricValue assd(const BinaryMask& pred, const BinaryMask& gt, double penalty_mm, const std::string& structure = {});

/// Centres of intra voxels that are 6-adjacent to an extra voxel.
BoundaryPointSet interface_points(const BinaryMask& intra, const BinaryMask& extra);

/// ASSD between the predicted and reference intra/extra interfaces.
MetricValue split_boundary_assd(const BinaryMask& pred_intra, const BinaryMask& pred_extra,
                                const BinaryMask& gt_intra, const BinaryMask& gt_extra, double penalty_mm,
                                const std::string& structure = {});

/// One value per (structure, metric) the manifest declares, in declaration
/// order. Interface structures get ASSD only.
std::vector<MetricValue> evaluate_case(const LabelVolume& pred, const LabelVolume& gt,
                                       const ChallengeManifest& manifest);

} // namespace chaleval
