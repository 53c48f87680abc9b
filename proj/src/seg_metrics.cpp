#include "chaleval/seg_metrics.hpp"

#include "chaleval/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chaleval {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr int neighbours[6][3] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}};

BoundaryPointSet make_point_set(const Grid& grid, std::vector<Index3> indices)
{
    BoundaryPointSet out;
    out.grid = grid;
    out.points.reserve(indices.size());
    for (const auto& i : indices)
        out.points.push_back({i[0] * grid.spacing[0], i[1] * grid.spacing[1], i[2] * grid.spacing[2]});
    out.indices = std::move(indices);
    return out;
}

/// 1D lower envelope of parabolas (Felzenszwalb & Huttenlocher) over samples
/// spaced `step` apart. Infinite samples are not sites.
class EnvelopeTransform {
public:
    explicit EnvelopeTransform(int n) : f_(n), v_(n), z_(n + 1) {}

    /// `data` is read and overwritten with stride `stride`.
    void run(double* data, int n, std::size_t stride, double step)
    {
        for (int q = 0; q < n; ++q)
            f_[q] = data[q * stride];
        int k = -1;
        for (int q = 0; q < n; ++q) {
            if (f_[q] == inf)
                continue;
            double s = -inf;
            while (k >= 0) {
                const int p = v_[k];
                const double xq = q * step, xp = p * step;
                s = ((f_[q] + xq * xq) - (f_[p] + xp * xp)) / (2.0 * (xq - xp));
                if (s <= z_[k])
                    --k;
                else
                    break;
            }
            ++k;
            v_[k] = q;
            z_[k] = k == 0 ? -inf : s;
            z_[k + 1] = inf;
        }
        if (k < 0)
            return; // no sites on this line; stays infinite
        int j = 0;
        for (int q = 0; q < n; ++q) {
            const double xq = q * step;
            while (z_[j + 1] < xq)
                ++j;
            const double d = (q - v_[j]) * step;
            data[q * stride] = d * d + f_[v_[j]];
        }
    }

private:
    std::vector<double> f_;
    std::vector<int> v_;
    std::vector<double> z_;
};

/// Squared distance field to `sites` over the box [lo, hi] (inclusive).
class BoxDistanceField {
public:
    BoxDistanceField(const Grid& grid, const Index3& lo, const Index3& hi, const std::vector<Index3>& sites)
        : lo_(lo)
    {
        for (int a = 0; a < 3; ++a)
            n_[a] = hi[a] - lo[a] + 1;
        values_.assign(static_cast<std::size_t>(n_[0]) * n_[1] * n_[2], inf);
        for (const auto& s : sites)
            values_[offset(s)] = 0.0;

        EnvelopeTransform line(std::max({n_[0], n_[1], n_[2]}));
        const std::size_t sx = 1, sy = static_cast<std::size_t>(n_[0]), sz = sy * n_[1];
        for (int z = 0; z < n_[2]; ++z)
            for (int y = 0; y < n_[1]; ++y)
                line.run(values_.data() + y * sy + z * sz, n_[0], sx, grid.spacing[0]);
        for (int z = 0; z < n_[2]; ++z)
            for (int x = 0; x < n_[0]; ++x)
                line.run(values_.data() + x * sx + z * sz, n_[1], sy, grid.spacing[1]);
        for (int y = 0; y < n_[1]; ++y)
            for (int x = 0; x < n_[0]; ++x)
                line.run(values_.data() + x * sx + y * sy, n_[2], sz, grid.spacing[2]);
    }

    double squared(const Index3& i) const { return values_[offset(i)]; }

private:
    std::size_t offset(const Index3& i) const
    {
        return static_cast<std::size_t>(i[0] - lo_[0]) +
               static_cast<std::size_t>(n_[0]) *
                   (static_cast<std::size_t>(i[1] - lo_[1]) + static_cast<std::size_t>(n_[1]) * (i[2] - lo_[2]));
    }

    Index3 lo_;
    std::array<int, 3> n_{};
    std::vector<double> values_;
};

double sum_of(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    return s;
}

void check_disjoint(const BinaryMask& a, const BinaryMask& b, const char* what)
{
    const auto& x = a.bits();
    const auto& y = b.bits();
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] && y[i])
            throw Error(ErrorCode::overlapping_masks, std::string(what) + " masks overlap");
}

} // namespace

MetricValue dice(const BinaryMask& pred, const BinaryMask& gt, const std::string& structure)
{
    check_grid_compatible(pred.grid(), gt.grid());
    std::size_t both = 0, np = 0, ng = 0;
    const auto& p = pred.bits();
    const auto& g = gt.bits();
    for (std::size_t i = 0; i < p.size(); ++i) {
        np += p[i];
        ng += g[i];
        both += p[i] & g[i];
    }
    MetricValue out{"DSC", structure, 1.0};
    if (np + ng == 0) {
        out.both_empty = true;
        return out;
    }
    out.value = 2.0 * static_cast<double>(both) / static_cast<double>(np + ng);
    return out;
}

BoundaryPointSet boundary_points(const BinaryMask& mask)
{
    const Grid& g = mask.grid();
    std::vector<Index3> idx;
    for (int z = 0; z < g.dims[2]; ++z)
        for (int y = 0; y < g.dims[1]; ++y)
            for (int x = 0; x < g.dims[0]; ++x) {
                if (!mask.get(x, y, z))
                    continue;
                for (const auto& d : neighbours) {
                    if (!mask.get_or_false(x + d[0], y + d[1], z + d[2])) {
                        idx.push_back({x, y, z});
                        break;
                    }
                }
            }
    return make_point_set(g, std::move(idx));
}

std::vector<double> point_to_set_distances(const BoundaryPointSet& from, const BoundaryPointSet& to)
{
    check_grid_compatible(from.grid, to.grid);
    if (to.empty())
        throw Error(ErrorCode::invalid_argument, "distance to an empty point set is undefined");
    std::vector<double> out;
    if (from.empty())
        return out;
    Index3 lo = to.indices.front(), hi = lo;
    for (const auto* set : {&from, &to})
        for (const auto& i : set->indices)
            for (int a = 0; a < 3; ++a) {
                lo[a] = std::min(lo[a], i[a]);
                hi[a] = std::max(hi[a], i[a]);
            }
    const BoxDistanceField field(to.grid, lo, hi, to.indices);
    out.reserve(from.count());
    for (const auto& i : from.indices)
        out.push_back(std::sqrt(field.squared(i)));
    return out;
}

double average_symmetric_distance(const BoundaryPointSet& a, const BoundaryPointSet& b)
{
    if (a.empty() || b.empty())
        throw Error(ErrorCode::invalid_argument, "average surface distance needs two nonempty point sets");
    const double ab = sum_of(point_to_set_distances(a, b));
    const double ba = sum_of(point_to_set_distances(b, a));
    return (ab + ba) / static_cast<double>(a.count() + b.count());
}

MetricValue assd(const BinaryMask& pred, const BinaryMask& gt, double penalty_mm, const std::string& structure)
{
    check_grid_compatible(pred.grid(), gt.grid());
    if (gt.empty())
        throw Error(ErrorCode::empty_ground_truth, "ASSD undefined for empty reference" +
                                                       (structure.empty() ? std::string() : " '" + structure + "'"));
    MetricValue out{"ASSD", structure, penalty_mm};
    if (pred.empty()) {
        out.penalized = true;
        return out;
    }
    out.value = average_symmetric_distance(boundary_points(pred), boundary_points(gt));
    return out;
}

BoundaryPointSet interface_points(const BinaryMask& intra, const BinaryMask& extra)
{
    check_grid_compatible(intra.grid(), extra.grid());
    check_disjoint(intra, extra, "intra/extra");
    const Grid& g = intra.grid();
    std::vector<Index3> idx;
    for (int z = 0; z < g.dims[2]; ++z)
        for (int y = 0; y < g.dims[1]; ++y)
            for (int x = 0; x < g.dims[0]; ++x) {
                if (!intra.get(x, y, z))
                    continue;
                for (const auto& d : neighbours) {
                    if (extra.get_or_false(x + d[0], y + d[1], z + d[2])) {
                        idx.push_back({x, y, z});
                        break;
                    }
                }
            }
    return make_point_set(g, std::move(idx));
}

MetricValue split_boundary_assd(const BinaryMask& pred_intra, const BinaryMask& pred_extra,
                                const BinaryMask& gt_intra, const BinaryMask& gt_extra, double penalty_mm,
                                const std::string& structure)
{
    check_grid_compatible(pred_intra.grid(), gt_intra.grid());
    const BoundaryPointSet gt_if = interface_points(gt_intra, gt_extra);
    const BoundaryPointSet pred_if = interface_points(pred_intra, pred_extra);
    if (gt_if.empty())
        throw Error(ErrorCode::empty_ground_truth, "reference intra/extra interface is empty");
    MetricValue out{"ASSD", structure, penalty_mm};
    if (pred_if.empty()) {
        out.penalized = true;
        return out;
    }
    out.value = average_symmetric_distance(pred_if, gt_if);
    return out;
}

std::vector<MetricValue> evaluate_case(const LabelVolume& pred, const LabelVolume& gt,
                                       const ChallengeManifest& manifest)
{
    check_grid_compatible(pred, gt);
    check_volume_scheme(pred, manifest);
    check_volume_scheme(gt, manifest);

    std::vector<MetricValue> out;
    for (const auto& s : manifest.structures) {
        const auto metrics = manifest.metrics_for(s);
        if (metrics.empty())
            continue;
        if (s.kind == StructureKind::interface) {
            const auto pi = extract_structure_mask(pred, manifest, s.operands[0]);
            const auto pe = extract_structure_mask(pred, manifest, s.operands[1]);
            const auto gi = extract_structure_mask(gt, manifest, s.operands[0]);
            const auto ge = extract_structure_mask(gt, manifest, s.operands[1]);
            auto v = split_boundary_assd(pi, pe, gi, ge, manifest.penalty_mm, s.name);
            v.ranked = s.ranked;
            out.push_back(std::move(v));
            continue;
        }
        const auto pm = extract_structure_mask(pred, manifest, s.name);
        const auto gm = extract_structure_mask(gt, manifest, s.name);
        for (const auto& m : metrics) {
            MetricValue v = m.name == "DSC" ? dice(pm, gm, s.name) : assd(pm, gm, manifest.penalty_mm, s.name);
            v.ranked = s.ranked;
            out.push_back(std::move(v));
        }
    }
    return out;
}

} // namespace chaleval
