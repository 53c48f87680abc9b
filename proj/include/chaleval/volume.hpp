#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace chaleval {

using Index3 = std::array<int, 3>;

/// Voxel lattice shared by a label volume and every mask derived from it.
/// Voxel (x, y, z) is stored at x + nx * (y + ny * z), matching NIfTI order.
struct Grid {
    std::array<int, 3> dims{0, 0, 0};
    std::array<double, 3> spacing{1.0, 1.0, 1.0};

    std::size_t voxel_count() const noexcept
    {
        return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) *
               static_cast<std::size_t>(dims[2]);
    }

    std::size_t linear(int x, int y, int z) const noexcept
    {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(dims[0]) *
                   (static_cast<std::size_t>(y) + static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(z));
    }

    std::size_t linear(const Index3& i) const noexcept { return linear(i[0], i[1], i[2]); }

    bool contains(int x, int y, int z) const noexcept
    {
        return x >= 0 && y >= 0 && z >= 0 && x < dims[0] && y < dims[1] && z < dims[2];
    }

    /// Throws invalid_argument unless dims and spacing are strictly positive.
    void validate() const;

    bool operator==(const Grid&) const = default;
};

using Affine = std::array<double, 16>; // row-major 4x4

Affine diagonal_affine(const std::array<double, 3>& spacing);

/// Dense 3D label map. Immutable after construction.
class LabelVolume {
public:
    using label_type = std::uint16_t;

    LabelVolume() = default;
    LabelVolume(Grid grid, std::vector<label_type> labels, std::string scheme_id = {});
    LabelVolume(Grid grid, std::vector<label_type> labels, std::string scheme_id, const Affine& affine);

    const Grid& grid() const noexcept { return grid_; }
    const std::vector<label_type>& labels() const noexcept { return labels_; }
    const std::string& scheme_id() const noexcept { return scheme_id_; }
    const Affine& affine() const noexcept { return affine_; }

    label_type at(int x, int y, int z) const noexcept { return labels_[grid_.linear(x, y, z)]; }

    /// True when the affine's rotation part is not a signed axis permutation.
    /// Metrics use axis-aligned spacing only, so such volumes deserve a warning.
    bool is_oblique() const noexcept;

    LabelVolume with_scheme(std::string scheme_id) const;

    bool operator==(const LabelVolume& other) const
    {
        return grid_ == other.grid_ && labels_ == other.labels_;
    }

private:
    Grid grid_;
    std::vector<label_type> labels_;
    std::string scheme_id_;
    Affine affine_ = diagonal_affine({1.0, 1.0, 1.0});
};

/// Boolean voxel mask on a Grid. Bits are stored as one byte per voxel.
class BinaryMask {
public:
    BinaryMask() = default;
    explicit BinaryMask(Grid grid);
    BinaryMask(Grid grid, std::vector<std::uint8_t> bits);

    const Grid& grid() const noexcept { return grid_; }
    const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

    bool get(int x, int y, int z) const noexcept { return bits_[grid_.linear(x, y, z)] != 0; }
    bool get(const Index3& i) const noexcept { return get(i[0], i[1], i[2]); }
    void set(int x, int y, int z, bool v) noexcept { bits_[grid_.linear(x, y, z)] = v ? 1 : 0; }
    void set(const Index3& i, bool v) noexcept { set(i[0], i[1], i[2], v); }

    /// Reads outside the grid return false.
    bool get_or_false(int x, int y, int z) const noexcept { return grid_.contains(x, y, z) && get(x, y, z); }

    std::size_t count() const noexcept;
    bool empty() const noexcept { return count() == 0; }

    bool operator==(const BinaryMask& other) const = default;

private:
    Grid grid_;
    std::vector<std::uint8_t> bits_;
};

BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b);

/// Spacing tolerance used by check_grid_compatible, relative to the larger value.
inline constexpr double spacing_relative_tolerance = 1e-4;

bool grids_compatible(const Grid& a, const Grid& b) noexcept;

/// Throws grid_mismatch unless dims match exactly and spacing matches within
/// spacing_relative_tolerance. No resampling is ever attempted.
void check_grid_compatible(const Grid& a, const Grid& b);
inline void check_grid_compatible(const LabelVolume& a, const LabelVolume& b)
{
    check_grid_compatible(a.grid(), b.grid());
}

} // namespace chaleval
