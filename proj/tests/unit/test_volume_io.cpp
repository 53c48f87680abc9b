#include "chaleval/error.hpp"
#include "chaleval/manifest.hpp"
#include "chaleval/nifti.hpp"
#include "chaleval/rng.hpp"

#include "temp_dir.hpp"

#include <doctest.h>

#include <cstring>
#include <fstream>
#include <zlib.h>

using namespace chaleval;

namespace {

// Hand-built single-file header; only the fields the reader looks at.
std::vector<unsigned char> raw_nifti(std::array<short, 3> dims, std::array<float, 3> pixdim, short datatype,
                                     short bitpix, const void* data, std::size_t nbytes, bool big_endian = false,
                                     float slope = 0.0f, float inter = 0.0f)
{
    std::vector<unsigned char> f(352, 0);
    auto put = [&](std::size_t off, auto v) {
        unsigned char b[sizeof(v)];
        std::memcpy(b, &v, sizeof(v));
        if (big_endian)
            std::reverse(b, b + sizeof(v));
        std::memcpy(f.data() + off, b, sizeof(v));
    };
    put(0, std::int32_t{348});
    put(40, short{3});
    for (int a = 0; a < 3; ++a) {
        put(42 + 2 * a, dims[a]);
        put(80 + 4 * a, pixdim[a]);
    }
    put(48, short{1});
    put(70, datatype);
    put(72, bitpix);
    put(76, 1.0f);
    put(108, 352.0f);
    put(112, slope);
    put(116, inter);
    std::memcpy(f.data() + 344, "n+1\0", 4);
    f.resize(352 + nbytes);
    if (nbytes)
        std::memcpy(f.data() + 352, data, nbytes);
    return f;
}

void dump(const std::filesystem::path& p, const std::vector<unsigned char>& bytes)
{
    std::ofstream(p, std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()),
                                             static_cast<std::streamsize>(bytes.size()));
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

LabelVolume random_volume(std::uint64_t seed, std::uint64_t i)
{
    Substream rng(seed, i);
    Grid g{{1 + static_cast<int>(rng.below(12)), 1 + static_cast<int>(rng.below(12)), 1 + static_cast<int>(rng.below(9))},
           {rng.uniform(0.3, 2.0), rng.uniform(0.3, 2.0), rng.uniform(0.3, 3.0)}};
    const std::uint64_t max_label = i % 3 == 0 ? 3 : (i % 3 == 1 ? 300 : 40000);
    std::vector<LabelVolume::label_type> labels(g.voxel_count());
    for (auto& l : labels)
        l = static_cast<LabelVolume::label_type>(rng.below(max_label + 1));
    return LabelVolume(g, std::move(labels));
}

} // namespace

TEST_CASE("grid linear index is x-fastest")
{
    Grid g{{4, 3, 2}, {1, 1, 1}};
    CHECK(g.voxel_count() == 24);
    CHECK(g.linear(1, 0, 0) == 1);
    CHECK(g.linear(0, 1, 0) == 4);
    CHECK(g.linear(0, 0, 1) == 12);
    CHECK(g.contains(3, 2, 1));
    CHECK_FALSE(g.contains(4, 0, 0));
    CHECK_FALSE(g.contains(0, -1, 0));
}

TEST_CASE("grid compatibility tolerates tiny spacing differences only")
{
    Grid a{{4, 4, 4}, {0.5, 0.5, 1.0}};
    Grid b{{4, 4, 4}, {0.5 * (1 + 1e-6), 0.5, 1.0}};
    Grid c{{4, 4, 4}, {0.6, 0.5, 1.0}};
    Grid d{{4, 4, 5}, {0.5, 0.5, 1.0}};
    CHECK(grids_compatible(a, b));
    CHECK_FALSE(grids_compatible(a, c));
    CHECK_FALSE(grids_compatible(a, d));
    CHECK_THROWS_AS(check_grid_compatible(a, d), Error);
    try {
        check_grid_compatible(a, c);
    }
    catch (const Error& e) {
        CHECK(e.code() == ErrorCode::grid_mismatch);
    }
}

TEST_CASE("round trip preserves grid and labels for random volumes")
{
    TempDir dir("rt");
    for (std::uint64_t i = 0; i < 50; ++i) {
        const auto v = random_volume(11, i);
        const auto p = dir.path / (i % 2 ? "v.nii.gz" : "v.nii");
        write_label_volume(v, p);
        const auto back = read_label_volume(p);
        CHECK(back.grid().dims == v.grid().dims);
        for (int a = 0; a < 3; ++a)
            CHECK(back.grid().spacing[a] == doctest::Approx(v.grid().spacing[a]).epsilon(1e-6));
        CHECK(back.labels() == v.labels());
    }
}

TEST_CASE("writes are byte-deterministic, gzip included")
{
    TempDir dir("det");
    const auto v = random_volume(5, 2);
    write_label_volume(v, dir.path / "a.nii.gz");
    write_label_volume(v, dir.path / "b.nii.gz");
    CHECK(slurp(dir.path / "a.nii.gz") == slurp(dir.path / "b.nii.gz"));
}

TEST_CASE("reader accepts hand-built little and big endian headers")
{
    TempDir dir("hdr");
    const std::int16_t le[8] = {0, 1, 2, 3, 0, 0, 1, 2};
    dump(dir.path / "le.nii", raw_nifti({2, 2, 2}, {0.5f, 0.75f, 2.0f}, 4, 16, le, sizeof(le)));
    auto v = read_label_volume(dir.path / "le.nii");
    CHECK(v.grid().dims == std::array<int, 3>{2, 2, 2});
    CHECK(v.grid().spacing[1] == 0.75);
    CHECK(v.at(1, 1, 0) == 3);
    CHECK(v.at(1, 1, 1) == 2);

    std::int16_t be[8];
    for (int i = 0; i < 8; ++i)
        be[i] = static_cast<std::int16_t>(((le[i] & 0xff) << 8) | ((le[i] >> 8) & 0xff));
    dump(dir.path / "be.nii", raw_nifti({2, 2, 2}, {0.5f, 0.75f, 2.0f}, 4, 16, be, sizeof(be), true));
    CHECK(read_label_volume(dir.path / "be.nii").labels() == v.labels());
}

TEST_CASE("float data must be integral")
{
    TempDir dir("flt");
    const float ok[2] = {0.0f, 2.0f};
    dump(dir.path / "ok.nii", raw_nifti({2, 1, 1}, {1, 1, 1}, 16, 32, ok, sizeof(ok)));
    CHECK(read_label_volume(dir.path / "ok.nii").labels() == std::vector<LabelVolume::label_type>{0, 2});

    const float bad[2] = {0.0f, 1.5f};
    dump(dir.path / "bad.nii", raw_nifti({2, 1, 1}, {1, 1, 1}, 16, 32, bad, sizeof(bad)));
    try {
        read_label_volume(dir.path / "bad.nii");
        FAIL("expected non_integer_data");
    }
    catch (const Error& e) {
        CHECK(e.code() == ErrorCode::non_integer_data);
    }

    const std::uint8_t scaled[2] = {1, 2};
    dump(dir.path / "scl.nii", raw_nifti({2, 1, 1}, {1, 1, 1}, 2, 8, scaled, 2, false, 2.0f, 1.0f));
    CHECK(read_label_volume(dir.path / "scl.nii").labels() == std::vector<LabelVolume::label_type>{3, 5});
}

TEST_CASE("reader error codes")
{
    TempDir dir("err");
    auto code_of = [](const std::filesystem::path& p) {
        try {
            read_label_volume(p);
        }
        catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::invalid_argument;
    };
    CHECK(code_of(dir.path / "absent.nii") == ErrorCode::io);

    const std::int16_t neg[1] = {-1};
    dump(dir.path / "neg.nii", raw_nifti({1, 1, 1}, {1, 1, 1}, 4, 16, neg, 2));
    CHECK(code_of(dir.path / "neg.nii") == ErrorCode::negative_label);

    const double dbl[1] = {1.0};
    dump(dir.path / "rgb.nii", raw_nifti({1, 1, 1}, {1, 1, 1}, 128, 24, dbl, 3));
    CHECK(code_of(dir.path / "rgb.nii") == ErrorCode::unsupported_datatype);

    auto magic = raw_nifti({1, 1, 1}, {1, 1, 1}, 2, 8, dbl, 1);
    magic[345] = 'x';
    dump(dir.path / "magic.nii", magic);
    CHECK(code_of(dir.path / "magic.nii") == ErrorCode::malformed_header);

    auto shortfile = raw_nifti({4, 4, 4}, {1, 1, 1}, 2, 8, dbl, 1);
    dump(dir.path / "short.nii", shortfile);
    CHECK(code_of(dir.path / "short.nii") == ErrorCode::malformed_header);

    dump(dir.path / "tiny.nii", std::vector<unsigned char>(10, 0));
    CHECK(code_of(dir.path / "tiny.nii") == ErrorCode::malformed_header);
}

TEST_CASE("gzip input is detected from content")
{
    TempDir dir("gz");
    const std::uint8_t d[3] = {1, 0, 1};
    const auto bytes = raw_nifti({3, 1, 1}, {1, 1, 1}, 2, 8, d, 3);
    gzFile f = gzopen((dir.path / "x.nii.gz").string().c_str(), "wb");
    gzwrite(f, bytes.data(), static_cast<unsigned>(bytes.size()));
    gzclose(f);
    CHECK(read_label_volume(dir.path / "x.nii.gz").labels() == std::vector<LabelVolume::label_type>{1, 0, 1});
}

TEST_CASE("affine and oblique detection survive the writer")
{
    TempDir dir("aff");
    Grid g{{2, 2, 2}, {1, 1, 1}};
    const double c = std::cos(0.3), s = std::sin(0.3);
    Affine rot{c, -s, 0, 5, s, c, 0, -3, 0, 0, 1, 7, 0, 0, 0, 1};
    LabelVolume v(g, std::vector<LabelVolume::label_type>(8, 0), "", rot);
    CHECK(v.is_oblique());
    write_label_volume(v, dir.path / "o.nii");
    const auto back = read_label_volume(dir.path / "o.nii");
    CHECK(back.is_oblique());
    CHECK(back.affine()[3] == doctest::Approx(5.0));
    CHECK_FALSE(LabelVolume(g, std::vector<LabelVolume::label_type>(8, 0)).is_oblique());
}

TEST_CASE("label scheme conformance")
{
    const auto m = preset_manifest("vs_cochlea");
    Grid g{{2, 1, 1}, {1, 1, 1}};
    CHECK_NOTHROW(check_volume_scheme(LabelVolume(g, {0, 2}), m));
    try {
        check_volume_scheme(LabelVolume(g, {0, 3}), m);
        FAIL("expected label_not_in_scheme");
    }
    catch (const Error& e) {
        CHECK(e.code() == ErrorCode::label_not_in_scheme);
    }
    try {
        check_volume_scheme(LabelVolume(g, {0, 1}, "vs_split_cochlea"), m);
        FAIL("expected scheme_mismatch");
    }
    catch (const Error& e) {
        CHECK(e.code() == ErrorCode::scheme_mismatch);
    }
}

TEST_CASE("structure masks")
{
    const auto m = preset_manifest("vs_split_cochlea");
    Grid g{{4, 1, 1}, {1, 1, 1}};
    LabelVolume v(g, {0, 1, 2, 3});
    CHECK(extract_structure_mask(v, m, "intra").bits() == std::vector<std::uint8_t>{0, 1, 0, 0});
    CHECK(extract_structure_mask(v, m, "vs").bits() == std::vector<std::uint8_t>{0, 1, 1, 0});
    CHECK(extract_structure_mask(v, m, "cochlea").bits() == std::vector<std::uint8_t>{0, 0, 0, 1});
    CHECK_THROWS_AS(extract_structure_mask(v, m, "split_boundary"), Error);
    try {
        extract_structure_mask(v, m, "brainstem");
        FAIL("expected unknown_structure");
    }
    catch (const Error& e) {
        CHECK(e.code() == ErrorCode::unknown_structure);
    }
}

TEST_CASE("manifest JSON round trip")
{
    auto m = preset_manifest("vs_split_cochlea");
    m.cases = {"c1", "c2"};
    m.teams = {"A", "B"};
    m.dominance = {{"A", "B"}};
    const auto back = parse_manifest(manifest_to_json(m));
    CHECK(manifest_to_json(back) == manifest_to_json(m));
    CHECK(back.ranked_cells().size() == 6);
    CHECK(back.metrics_for(back.structure("split_boundary")).size() == 1);
    CHECK_THROWS_AS(parse_manifest("{\"cases\": 3}"), Error);
}

TEST_CASE("shipped presets match the built-in layouts")
{
    const std::filesystem::path dir = CHALEVAL_SOURCE_DIR "/presets";
    for (const auto* name : {"vs_cochlea", "vs_split_cochlea"}) {
        std::ifstream in(dir / (std::string(name) + ".json"));
        const std::string text{std::istreambuf_iterator<char>(in), {}};
        CHECK(manifest_to_json(parse_manifest(text)) == manifest_to_json(preset_manifest(name)));
    }
}
