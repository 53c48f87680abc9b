#include "chaleval/synth.hpp"

#include "chaleval/error.hpp"
#include "chaleval/nifti.hpp"
#include "chaleval/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

namespace chaleval {

namespace {

constexpr int neighbours[6][3] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}};

bool any_neighbour(const BinaryMask& m, int x, int y, int z)
{
    for (const auto& d : neighbours)
        if (m.get_or_false(x + d[0], y + d[1], z + d[2]))
            return true;
    return false;
}

bool all_neighbours(const BinaryMask& m, int x, int y, int z)
{
    for (const auto& d : neighbours)
        if (!m.get_or_false(x + d[0], y + d[1], z + d[2]))
            return false;
    return true;
}

template <typename F>
void for_each_voxel(const Grid& g, F&& f)
{
    for (int z = 0; z < g.dims[2]; ++z)
        for (int y = 0; y < g.dims[1]; ++y)
            for (int x = 0; x < g.dims[0]; ++x)
                f(x, y, z);
}

int scaled_iterations(double amount, double severity)
{
    return static_cast<int>(std::lround(std::max(0.0, amount * severity)));
}

BinaryMask jitter(const BinaryMask& mask, double p, Substream& rng)
{
    BinaryMask out = mask;
    for_each_voxel(mask.grid(), [&](int x, int y, int z) {
        const bool fg = mask.get(x, y, z);
        const bool on_surface = fg ? !all_neighbours(mask, x, y, z) : any_neighbour(mask, x, y, z);
        if (on_surface && rng.bernoulli(p))
            out.set(x, y, z, !fg);
    });
    return out;
}

constexpr std::uint64_t tumour_stream = 1;
constexpr std::uint64_t cochlea_stream = 2;

std::uint64_t perturbation_seed(std::uint64_t seed, std::size_t case_index, std::size_t team, std::uint64_t structure)
{
    return mix64(mix64(mix64(seed ^ 0x5DEECE66Dull) ^ case_index) ^ (team * 4 + structure));
}

struct Phantom {
    BinaryMask tumour;
    BinaryMask cochlea;
    double split_x = 0.0;
};

Phantom make_phantom(const SynthSpec& spec, std::size_t index)
{
    const Grid& g = spec.grid;
    const PhantomSpec& ph = spec.phantom;
    Substream rng(spec.seed, index);

    const double rc = ph.cochlea_radius;
    const double cochlea_x = g.dims[0] - ph.margin - rc - 1.0 - std::floor(rng.uniform(0.0, 2.0));
    const double cochlea_y[2] = {0.3 * g.dims[1], 0.7 * g.dims[1]};
    const double cochlea_z = 0.5 * (g.dims[2] - 1);

    std::array<double, 3> r{};
    for (auto& v : r)
        v = rng.uniform(ph.tumour_radius[0], ph.tumour_radius[1]);
    const double x_hi = cochlea_x - rc - ph.gap - r[0];
    std::array<double, 3> lo{ph.margin + r[0], ph.margin + r[1], ph.margin + r[2]};
    std::array<double, 3> hi{x_hi, g.dims[1] - 1.0 - ph.margin - r[1], g.dims[2] - 1.0 - ph.margin - r[2]};
    std::array<double, 3> c{};
    for (int a = 0; a < 3; ++a) {
        if (hi[a] < lo[a])
            throw Error(ErrorCode::phantom_does_not_fit, "tumour radii do not fit the grid along axis " + std::to_string(a));
        c[a] = rng.uniform(lo[a], hi[a]);
    }

    Phantom out{BinaryMask(g), BinaryMask(g), 0.0};
    out.split_x = c[0] + rng.uniform(-ph.split_fraction, ph.split_fraction) * r[0];
    for_each_voxel(g, [&](int x, int y, int z) {
        const double dx = (x - c[0]) / r[0], dy = (y - c[1]) / r[1], dz = (z - c[2]) / r[2];
        if (dx * dx + dy * dy + dz * dz <= 1.0)
            out.tumour.set(x, y, z, true);
        for (double cy : cochlea_y) {
            const double ex = x - cochlea_x, ey = y - cy, ez = z - cochlea_z;
            if (ex * ex + ey * ey + ez * ez <= rc * rc)
                out.cochlea.set(x, y, z, true);
        }
    });
    return out;
}

LabelVolume compose(const SynthSpec& spec, const BinaryMask& tumour, const BinaryMask& cochlea, double split_x)
{
    const Grid& g = spec.grid;
    const bool split = spec.scheme == "vs_split_cochlea";
    const LabelVolume::label_type cochlea_label = split ? 3 : 2;
    std::vector<LabelVolume::label_type> labels(g.voxel_count(), 0);
    for_each_voxel(g, [&](int x, int y, int z) {
        const auto i = g.linear(x, y, z);
        if (tumour.get(x, y, z))
            labels[i] = !split || x < split_x ? 1 : 2;
        if (cochlea.get(x, y, z))
            labels[i] = cochlea_label;
    });
    return LabelVolume(g, std::move(labels), spec.scheme);
}

PerturbationProfile parse_profile(const nlohmann::json& j)
{
    PerturbationProfile p;
    p.severity = j.value("severity", 0.0);
    for (const auto& o : j.value("ops", nlohmann::json::array())) {
        PerturbOp op;
        op.kind = parse_perturb_kind(o.at("kind").get<std::string>());
        op.amount = o.value("amount", 1.0);
        if (o.contains("offset"))
            op.offset = o.at("offset").get<std::array<int, 3>>();
        p.ops.push_back(op);
    }
    return p;
}

} // namespace

const char* to_string(PerturbOp::Kind kind) noexcept
{
    switch (kind) {
    case PerturbOp::Kind::dilate: return "dilate";
    case PerturbOp::Kind::erode: return "erode";
    case PerturbOp::Kind::translate: return "translate";
    case PerturbOp::Kind::drop: return "drop";
    case PerturbOp::Kind::jitter: return "jitter";
    }
    return "?";
}

PerturbOp::Kind parse_perturb_kind(std::string_view name)
{
    for (auto k : {PerturbOp::Kind::dilate, PerturbOp::Kind::erode, PerturbOp::Kind::translate, PerturbOp::Kind::drop,
                   PerturbOp::Kind::jitter})
        if (name == to_string(k))
            return k;
    throw Error(ErrorCode::invalid_argument, "unknown perturbation '" + std::string(name) + "'");
}

bool PerturbationProfile::same_ops(const PerturbationProfile& other) const
{
    if (ops.size() != other.ops.size())
        return false;
    for (std::size_t i = 0; i < ops.size(); ++i)
        if (ops[i].kind != other.ops[i].kind || ops[i].amount != other.ops[i].amount || ops[i].offset != other.ops[i].offset)
            return false;
    return true;
}

BinaryMask dilate6(const BinaryMask& mask, int iterations)
{
    BinaryMask cur = mask;
    for (int it = 0; it < iterations; ++it) {
        BinaryMask next = cur;
        for_each_voxel(cur.grid(), [&](int x, int y, int z) {
            if (!cur.get(x, y, z) && any_neighbour(cur, x, y, z))
                next.set(x, y, z, true);
        });
        cur = std::move(next);
    }
    return cur;
}

BinaryMask erode6(const BinaryMask& mask, int iterations)
{
    BinaryMask cur = mask;
    for (int it = 0; it < iterations; ++it) {
        BinaryMask next = cur;
        for_each_voxel(cur.grid(), [&](int x, int y, int z) {
            if (cur.get(x, y, z) && !all_neighbours(cur, x, y, z))
                next.set(x, y, z, false);
        });
        cur = std::move(next);
    }
    return cur;
}

BinaryMask translate(const BinaryMask& mask, const std::array<int, 3>& offset)
{
    BinaryMask out(mask.grid());
    for_each_voxel(mask.grid(), [&](int x, int y, int z) {
        if (mask.get(x, y, z) && mask.grid().contains(x + offset[0], y + offset[1], z + offset[2]))
            out.set(x + offset[0], y + offset[1], z + offset[2], true);
    });
    return out;
}

BinaryMask perturb_mask(const BinaryMask& mask, const PerturbationProfile& profile, std::uint64_t case_seed)
{
    if (profile.severity < 0.0)
        throw Error(ErrorCode::invalid_argument, "severity must be non-negative");
    BinaryMask out = mask;
    for (std::size_t k = 0; k < profile.ops.size(); ++k) {
        const PerturbOp& op = profile.ops[k];
        Substream rng(case_seed, k);
        switch (op.kind) {
        case PerturbOp::Kind::dilate: out = dilate6(out, scaled_iterations(op.amount, profile.severity)); break;
        case PerturbOp::Kind::erode: out = erode6(out, scaled_iterations(op.amount, profile.severity)); break;
        case PerturbOp::Kind::translate: {
            std::array<int, 3> shift{};
            for (int a = 0; a < 3; ++a)
                shift[a] = static_cast<int>(std::lround(op.offset[a] * profile.severity));
            out = translate(out, shift);
            break;
        }
        case PerturbOp::Kind::drop:
            if (rng.bernoulli(std::clamp(op.amount * profile.severity, 0.0, 1.0)))
                out = BinaryMask(out.grid());
            break;
        case PerturbOp::Kind::jitter: {
            const double p = std::clamp(op.amount * profile.severity, 0.0, 1.0);
            if (p > 0.0)
                out = jitter(out, p, rng);
            break;
        }
        }
    }
    return out;
}

void SynthSpec::validate() const
{
    if (n_cases == 0)
        throw Error(ErrorCode::invalid_argument, "n_cases must be positive");
    grid.validate();
    if (scheme != "vs_split_cochlea" && scheme != "vs_cochlea")
        throw Error(ErrorCode::invalid_argument, "unknown synthetic scheme '" + scheme + "'");
    if (phantom.margin < 2)
        throw Error(ErrorCode::invalid_argument, "phantom margin must be at least 2 voxels");
    if (!(phantom.tumour_radius[0] > 0.0) || phantom.tumour_radius[1] < phantom.tumour_radius[0])
        throw Error(ErrorCode::invalid_argument, "bad tumour radius range");
    if (!(phantom.cochlea_radius > 0.0))
        throw Error(ErrorCode::invalid_argument, "bad cochlea radius");
    for (const auto& t : teams)
        if (t.profile.severity < 0.0)
            throw Error(ErrorCode::invalid_argument, "team '" + t.id + "' has negative severity");
}

SynthSpec graded_synth_spec(std::size_t n_cases, std::size_t n_teams, std::uint64_t seed, PerturbOp::Kind op)
{
    SynthSpec spec;
    spec.n_cases = n_cases;
    spec.seed = seed;
    for (std::size_t t = 0; t < n_teams; ++t) {
        PerturbOp o;
        o.kind = op;
        o.amount = (op == PerturbOp::Kind::drop || op == PerturbOp::Kind::jitter) ? 0.2 : 1.0;
        if (op == PerturbOp::Kind::translate)
            o.offset = {1, 0, 0};
        spec.teams.push_back({"team" + std::to_string(t), {{o}, static_cast<double>(t)}});
    }
    return spec;
}

SynthSpec parse_synth_spec(std::string_view json_text)
{
    SynthSpec spec;
    try {
        const auto j = nlohmann::json::parse(json_text);
        spec.n_cases = j.value("n_cases", spec.n_cases);
        spec.seed = j.value("seed", spec.seed);
        spec.scheme = j.value("scheme", spec.scheme);
        if (j.contains("dims"))
            spec.grid.dims = j.at("dims").get<std::array<int, 3>>();
        if (j.contains("spacing"))
            spec.grid.spacing = j.at("spacing").get<std::array<double, 3>>();
        if (j.contains("phantom")) {
            const auto& p = j.at("phantom");
            if (p.contains("tumour_radius"))
                spec.phantom.tumour_radius = p.at("tumour_radius").get<std::array<double, 2>>();
            spec.phantom.split_fraction = p.value("split_fraction", spec.phantom.split_fraction);
            spec.phantom.cochlea_radius = p.value("cochlea_radius", spec.phantom.cochlea_radius);
            spec.phantom.margin = p.value("margin", spec.phantom.margin);
            spec.phantom.gap = p.value("gap", spec.phantom.gap);
        }
        for (const auto& t : j.at("teams"))
            spec.teams.push_back({t.at("id").get<std::string>(), parse_profile(t.at("profile"))});
    }
    catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::invalid_argument, std::string("synthetic spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

std::string synthetic_case_id(std::size_t index, std::size_t n_cases)
{
    int width = 3;
    for (std::size_t n = n_cases; n >= 1000; n /= 10)
        ++width;
    char buf[32];
    std::snprintf(buf, sizeof buf, "case_%0*zu", width, index);
    return buf;
}

ChallengeManifest synthetic_manifest(const SynthSpec& spec)
{
    ChallengeManifest m = preset_manifest(spec.scheme);
    for (std::size_t i = 0; i < spec.n_cases; ++i)
        m.cases.push_back(synthetic_case_id(i, spec.n_cases));
    for (const auto& t : spec.teams)
        m.teams.push_back(t.id);
    for (const auto& a : spec.teams)
        for (const auto& b : spec.teams)
            if (a.profile.same_ops(b.profile) && a.profile.severity < b.profile.severity)
                m.dominance.emplace_back(a.id, b.id);
    m.validate();
    return m;
}

SyntheticCase generate_case(const SynthSpec& spec, std::size_t index)
{
    const Phantom ph = make_phantom(spec, index);
    SyntheticCase out;
    out.case_id = synthetic_case_id(index, spec.n_cases);
    out.ground_truth = compose(spec, ph.tumour, ph.cochlea, ph.split_x);
    for (std::size_t t = 0; t < spec.teams.size(); ++t) {
        const auto& profile = spec.teams[t].profile;
        const auto tumour = perturb_mask(ph.tumour, profile, perturbation_seed(spec.seed, index, t, tumour_stream));
        const auto cochlea = perturb_mask(ph.cochlea, profile, perturbation_seed(spec.seed, index, t, cochlea_stream));
        out.predictions.push_back(compose(spec, tumour, cochlea, ph.split_x));
    }
    return out;
}

ChallengeManifest generate_challenge(const SynthSpec& spec, const std::filesystem::path& out_dir)
{
    spec.validate();
    ChallengeManifest manifest = synthetic_manifest(spec);
    manifest.base_dir = out_dir;
    std::error_code ec;
    std::filesystem::create_directories(out_dir / "gt", ec);
    for (const auto& t : spec.teams)
        std::filesystem::create_directories(manifest.prediction_file(t.id, "x").parent_path(), ec);
    if (ec)
        throw Error(ErrorCode::io, "cannot create output directories under " + out_dir.string());

    const auto write_case = [&](std::size_t i) {
        const SyntheticCase c = generate_case(spec, i);
        write_label_volume(c.ground_truth, manifest.ground_truth_file(c.case_id));
        for (std::size_t t = 0; t < spec.teams.size(); ++t)
            write_label_volume(c.predictions[t], manifest.prediction_file(spec.teams[t].id, c.case_id));
    };
    unsigned workers = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, spec.n_cases));
    if (workers <= 1) {
        for (std::size_t i = 0; i < spec.n_cases; ++i)
            write_case(i);
    }
    else {
        std::vector<std::exception_ptr> errors(workers);
        {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back([&, w] {
                    try {
                        for (std::size_t i = w; i < spec.n_cases; i += workers)
                            write_case(i);
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
    save_manifest(manifest, out_dir / "manifest.json");
    return manifest;
}

} // namespace chaleval
