#include "chaleval/volume.hpp"

#include "chaleval/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace chaleval {

namespace {

std::string describe(const Grid& g)
{
    std::ostringstream os;
    os << "dims (" << g.dims[0] << "," << g.dims[1] << "," << g.dims[2] << ") spacing (" << g.spacing[0] << ","
       << g.spacing[1] << "," << g.spacing[2] << ")";
    return os.str();
}

} // namespace

void Grid::validate() const
{
    for (int a = 0; a < 3; ++a) {
        if (dims[a] <= 0)
            throw Error(ErrorCode::invalid_argument, "grid dims must be positive, got " + describe(*this));
        if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a]))
            throw Error(ErrorCode::invalid_argument, "grid spacing must be positive, got " + describe(*this));
    }
}

Affine diagonal_affine(const std::array<double, 3>& spacing)
{
    return {spacing[0], 0, 0, 0, 0, spacing[1], 0, 0, 0, 0, spacing[2], 0, 0, 0, 0, 1};
}

LabelVolume::LabelVolume(Grid grid, std::vector<label_type> labels, std::string scheme_id)
    : LabelVolume(grid, std::move(labels), std::move(scheme_id), diagonal_affine(grid.spacing))
{
}

LabelVolume::LabelVolume(Grid grid, std::vector<label_type> labels, std::string scheme_id, const Affine& affine)
    : grid_(grid), labels_(std::move(labels)), scheme_id_(std::move(scheme_id)), affine_(affine)
{
    grid_.validate();
    if (labels_.size() != grid_.voxel_count())
        throw Error(ErrorCode::invalid_argument, "label count " + std::to_string(labels_.size()) +
                                                     " does not match " + describe(grid_));
}

bool LabelVolume::is_oblique() const noexcept
{
    for (int r = 0; r < 3; ++r) {
        double row_norm = 0.0;
        for (int c = 0; c < 3; ++c)
            row_norm = std::max(row_norm, std::abs(affine_[r * 4 + c]));
        int nonzero = 0;
        for (int c = 0; c < 3; ++c) {
            if (std::abs(affine_[r * 4 + c]) > 1e-6 * row_norm)
                ++nonzero;
        }
        if (nonzero != 1)
            return true;
    }
    return false;
}

LabelVolume LabelVolume::with_scheme(std::string scheme_id) const
{
    LabelVolume copy = *this;
    copy.scheme_id_ = std::move(scheme_id);
    return copy;
}

BinaryMask::BinaryMask(Grid grid) : grid_(grid), bits_(grid.voxel_count(), 0)
{
    grid_.validate();
}

BinaryMask::BinaryMask(Grid grid, std::vector<std::uint8_t> bits) : grid_(grid), bits_(std::move(bits))
{
    grid_.validate();
    if (bits_.size() != grid_.voxel_count())
        throw Error(ErrorCode::invalid_argument, "mask size does not match " + describe(grid_));
    for (auto& b : bits_)
        b = b ? 1 : 0;
}

std::size_t BinaryMask::count() const noexcept
{
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b)
{
    check_grid_compatible(a.grid(), b.grid());
    std::vector<std::uint8_t> out(a.bits().size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = a.bits()[i] | b.bits()[i];
    return BinaryMask(a.grid(), std::move(out));
}

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b)
{
    check_grid_compatible(a.grid(), b.grid());
    std::vector<std::uint8_t> out(a.bits().size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = a.bits()[i] & b.bits()[i];
    return BinaryMask(a.grid(), std::move(out));
}

bool grids_compatible(const Grid& a, const Grid& b) noexcept
{
    if (a.dims != b.dims)
        return false;
    for (int k = 0; k < 3; ++k) {
        const double scale = std::max(std::abs(a.spacing[k]), std::abs(b.spacing[k]));
        if (std::abs(a.spacing[k] - b.spacing[k]) > spacing_relative_tolerance * scale)
            return false;
    }
    return true;
}

void check_grid_compatible(const Grid& a, const Grid& b)
{
    if (!grids_compatible(a, b))
        throw Error(ErrorCode::grid_mismatch, describe(a) + " vs " + describe(b));
}

} // namespace chaleval
