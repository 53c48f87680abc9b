#include "chaleval/nifti.hpp"

#include "chaleval/error.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <type_traits>
#include <vector>

namespace chaleval {

namespace {

constexpr int header_size = 348;
constexpr int single_file_offset = 352;

enum Datatype : std::int16_t {
    dt_uint8 = 2,
    dt_int16 = 4,
    dt_int32 = 8,
    dt_float32 = 16,
    dt_float64 = 64,
};

template <typename T>
T byteswap_value(T v)
{
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
}

/// Little-endian on disk unless the header says otherwise.
class HeaderView {
public:
    HeaderView(const unsigned char* data, bool swap) : data_(data), swap_(swap) {}

    template <typename T>
    T get(std::size_t offset) const
    {
        T v;
        std::memcpy(&v, data_ + offset, sizeof(T));
        if (swap_)
            v = byteswap_value(v);
        return v;
    }

private:
    const unsigned char* data_;
    bool swap_;
};

class HeaderWriter {
public:
    HeaderWriter() : bytes_(single_file_offset, 0) {}

    template <typename T>
    void put(std::size_t offset, T v)
    {
        if constexpr (std::endian::native == std::endian::big)
            v = byteswap_value(v);
        std::memcpy(bytes_.data() + offset, &v, sizeof(T));
    }

    void put_chars(std::size_t offset, const char* s, std::size_t n) { std::memcpy(bytes_.data() + offset, s, n); }

    std::vector<unsigned char>& bytes() { return bytes_; }

private:
    std::vector<unsigned char> bytes_;
};

struct GzCloser {
    void operator()(gzFile f) const { gzclose(f); }
};
using GzHandle = std::unique_ptr<gzFile_s, GzCloser>;

std::vector<unsigned char> slurp(const std::filesystem::path& path)
{
    GzHandle f(gzopen(path.string().c_str(), "rb"));
    if (!f)
        throw Error(ErrorCode::io, "cannot open " + path.string());
    std::vector<unsigned char> out;
    std::vector<unsigned char> chunk(1 << 20);
    for (;;) {
        const int n = gzread(f.get(), chunk.data(), static_cast<unsigned>(chunk.size()));
        if (n < 0) {
            int errnum = 0;
            const char* msg = gzerror(f.get(), &errnum);
            throw Error(ErrorCode::io, "read failed for " + path.string() + ": " + (msg ? msg : "?"));
        }
        if (n == 0)
            break;
        out.insert(out.end(), chunk.begin(), chunk.begin() + n);
    }
    return out;
}

Affine quaternion_affine(const HeaderView& h, const std::array<double, 3>& spacing)
{
    const double b = h.get<float>(256), c = h.get<float>(260), d = h.get<float>(264);
    const double qx = h.get<float>(268), qy = h.get<float>(272), qz = h.get<float>(276);
    double a = 1.0 - (b * b + c * c + d * d);
    a = a < 1e-7 ? 0.0 : std::sqrt(a);
    const double qfac = h.get<float>(76) < 0.0f ? -1.0 : 1.0;
    const double r[3][3] = {
        {a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)},
        {2 * (b * c + a * d), a * a + c * c - b * b - d * d, 2 * (c * d - a * b)},
        {2 * (b * d - a * c), 2 * (c * d + a * b), a * a + d * d - c * c - b * b},
    };
    const double scale[3] = {spacing[0], spacing[1], spacing[2] * qfac};
    Affine m{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            m[i * 4 + j] = r[i][j] * scale[j];
    m[3] = qx;
    m[7] = qy;
    m[11] = qz;
    m[15] = 1.0;
    return m;
}

template <typename T>
void decode_integers(const unsigned char* src, std::size_t n, bool swap, std::vector<LabelVolume::label_type>& out)
{
    for (std::size_t i = 0; i < n; ++i) {
        T v;
        std::memcpy(&v, src + i * sizeof(T), sizeof(T));
        if (swap)
            v = byteswap_value(v);
        if constexpr (std::is_signed_v<T>) {
            if (v < 0)
                throw Error(ErrorCode::negative_label, "value " + std::to_string(v) + " at voxel " + std::to_string(i));
        }
        if (static_cast<std::uint64_t>(v) > std::numeric_limits<LabelVolume::label_type>::max())
            throw Error(ErrorCode::unsupported_datatype, "label " + std::to_string(v) + " exceeds 16-bit label range");
        out[i] = static_cast<LabelVolume::label_type>(v);
    }
}

template <typename T>
void decode_floats(const unsigned char* src, std::size_t n, bool swap, double slope, double inter,
                   std::vector<LabelVolume::label_type>& out)
{
    for (std::size_t i = 0; i < n; ++i) {
        T raw;
        std::memcpy(&raw, src + i * sizeof(T), sizeof(T));
        if (swap)
            raw = byteswap_value(raw);
        const double v = static_cast<double>(raw) * slope + inter;
        if (!std::isfinite(v) || v != std::floor(v))
            throw Error(ErrorCode::non_integer_data, "value " + std::to_string(v) + " at voxel " + std::to_string(i));
        if (v < 0)
            throw Error(ErrorCode::negative_label, "value " + std::to_string(v) + " at voxel " + std::to_string(i));
        if (v > std::numeric_limits<LabelVolume::label_type>::max())
            throw Error(ErrorCode::unsupported_datatype, "label exceeds 16-bit label range");
        out[i] = static_cast<LabelVolume::label_type>(v);
    }
}

} // namespace

LabelVolume read_label_volume(const std::filesystem::path& path, const std::string& scheme_id)
{
    const std::vector<unsigned char> file = slurp(path);
    const std::string where = path.string();
    if (file.size() < header_size)
        throw Error(ErrorCode::malformed_header, where + ": file shorter than 348 bytes");

    std::int32_t sizeof_hdr;
    std::memcpy(&sizeof_hdr, file.data(), 4);
    bool swap = false;
    if (sizeof_hdr != header_size) {
        if (byteswap_value(sizeof_hdr) != header_size)
            throw Error(ErrorCode::malformed_header, where + ": sizeof_hdr is not 348");
        swap = true;
    }
    const HeaderView h(file.data(), swap);

    if (std::memcmp(file.data() + 344, "n+1\0", 4) != 0) {
        if (std::memcmp(file.data() + 344, "ni1\0", 4) == 0)
            throw Error(ErrorCode::malformed_header, where + ": two-file NIfTI (.hdr/.img) is not supported");
        throw Error(ErrorCode::malformed_header, where + ": bad magic");
    }

    const auto ndim = h.get<std::int16_t>(40);
    if (ndim < 3 || ndim > 7)
        throw Error(ErrorCode::malformed_header, where + ": dim[0]=" + std::to_string(ndim) + ", expected a 3D volume");
    Grid grid;
    for (int a = 0; a < 3; ++a) {
        grid.dims[a] = h.get<std::int16_t>(42 + 2 * a);
        grid.spacing[a] = std::abs(static_cast<double>(h.get<float>(80 + 4 * a)));
        if (grid.dims[a] <= 0)
            throw Error(ErrorCode::malformed_header, where + ": non-positive dimension");
        if (!(grid.spacing[a] > 0.0) || !std::isfinite(grid.spacing[a]))
            throw Error(ErrorCode::malformed_header, where + ": non-positive pixdim");
    }
    for (int a = 4; a <= ndim; ++a) {
        if (h.get<std::int16_t>(40 + 2 * a) > 1)
            throw Error(ErrorCode::malformed_header, where + ": more than one volume along dim " + std::to_string(a));
    }

    const auto datatype = h.get<std::int16_t>(70);
    std::size_t bytes_per_voxel = 0;
    switch (datatype) {
    case dt_uint8: bytes_per_voxel = 1; break;
    case dt_int16: bytes_per_voxel = 2; break;
    case dt_int32:
    case dt_float32: bytes_per_voxel = 4; break;
    case dt_float64: bytes_per_voxel = 8; break;
    default:
        throw Error(ErrorCode::unsupported_datatype, where + ": datatype code " + std::to_string(datatype));
    }

    const double vox_offset = h.get<float>(108);
    if (!(vox_offset >= single_file_offset) || vox_offset != std::floor(vox_offset))
        throw Error(ErrorCode::malformed_header, where + ": vox_offset must be an integer >= 352");
    const auto offset = static_cast<std::size_t>(vox_offset);
    const std::size_t n = grid.voxel_count();
    if (file.size() < offset + n * bytes_per_voxel)
        throw Error(ErrorCode::malformed_header, where + ": truncated voxel data");

    double slope = h.get<float>(112);
    double inter = h.get<float>(116);
    if (slope == 0.0 || !std::isfinite(slope))
        slope = 1.0;
    if (!std::isfinite(inter))
        inter = 0.0;

    std::vector<LabelVolume::label_type> labels(n);
    const unsigned char* src = file.data() + offset;
    const bool identity_scaling = slope == 1.0 && inter == 0.0;
    switch (datatype) {
    case dt_uint8:
        if (identity_scaling)
            decode_integers<std::uint8_t>(src, n, swap, labels);
        else
            decode_floats<std::uint8_t>(src, n, swap, slope, inter, labels);
        break;
    case dt_int16:
        if (identity_scaling)
            decode_integers<std::int16_t>(src, n, swap, labels);
        else
            decode_floats<std::int16_t>(src, n, swap, slope, inter, labels);
        break;
    case dt_int32:
        if (identity_scaling)
            decode_integers<std::int32_t>(src, n, swap, labels);
        else
            decode_floats<std::int32_t>(src, n, swap, slope, inter, labels);
        break;
    case dt_float32: decode_floats<float>(src, n, swap, slope, inter, labels); break;
    case dt_float64: decode_floats<double>(src, n, swap, slope, inter, labels); break;
    }

    Affine affine = diagonal_affine(grid.spacing);
    if (h.get<std::int16_t>(254) > 0) {
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 4; ++c)
                affine[r * 4 + c] = h.get<float>(280 + 16 * r + 4 * c);
    }
    else if (h.get<std::int16_t>(252) > 0) {
        affine = quaternion_affine(h, grid.spacing);
    }

    return LabelVolume(grid, std::move(labels), scheme_id, affine);
}

void write_label_volume(const LabelVolume& volume, const std::filesystem::path& path)
{
    const auto& labels = volume.labels();
    const auto max_label = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
    std::int16_t datatype = dt_uint8;
    std::int16_t bitpix = 8;
    if (max_label > std::numeric_limits<std::uint8_t>::max()) {
        datatype = max_label > std::numeric_limits<std::int16_t>::max() ? dt_int32 : dt_int16;
        bitpix = datatype == dt_int32 ? 32 : 16;
    }

    const Grid& g = volume.grid();
    for (int a = 0; a < 3; ++a) {
        if (g.dims[a] > std::numeric_limits<std::int16_t>::max())
            throw Error(ErrorCode::invalid_argument, "dimension exceeds the NIfTI-1 limit of 32767");
    }
    HeaderWriter w;
    w.put<std::int32_t>(0, header_size);
    w.put<char>(38, 'r');
    w.put<std::int16_t>(40, 3);
    for (int a = 0; a < 3; ++a)
        w.put<std::int16_t>(42 + 2 * a, static_cast<std::int16_t>(g.dims[a]));
    for (int a = 3; a < 7; ++a)
        w.put<std::int16_t>(42 + 2 * a, 1);
    w.put<std::int16_t>(70, datatype);
    w.put<std::int16_t>(72, bitpix);
    w.put<float>(76, 1.0f);
    for (int a = 0; a < 3; ++a)
        w.put<float>(80 + 4 * a, static_cast<float>(g.spacing[a]));
    w.put<float>(108, static_cast<float>(single_file_offset));
    w.put<float>(112, 1.0f);
    w.put<float>(116, 0.0f);
    w.put<char>(123, 2); // NIFTI_UNITS_MM
    w.put<std::int16_t>(252, 0);
    w.put<std::int16_t>(254, 2); // NIFTI_XFORM_ALIGNED_ANAT
    const Affine& m = volume.affine();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c)
            w.put<float>(280 + 16 * r + 4 * c, static_cast<float>(m[r * 4 + c]));
    w.put_chars(344, "n+1\0", 4);

    std::vector<unsigned char>& out = w.bytes();
    const std::size_t width = static_cast<std::size_t>(bitpix / 8);
    out.resize(single_file_offset + labels.size() * width);
    unsigned char* dst = out.data() + single_file_offset;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (datatype == dt_uint8) {
            dst[i] = static_cast<unsigned char>(labels[i]);
        }
        else if (datatype == dt_int16) {
            auto v = static_cast<std::int16_t>(labels[i]);
            if constexpr (std::endian::native == std::endian::big)
                v = byteswap_value(v);
            std::memcpy(dst + 2 * i, &v, 2);
        }
        else {
            auto v = static_cast<std::int32_t>(labels[i]);
            if constexpr (std::endian::native == std::endian::big)
                v = byteswap_value(v);
            std::memcpy(dst + 4 * i, &v, 4);
        }
    }

    const std::string p = path.string();
    if (path.extension() == ".gz") {
        GzHandle f(gzopen(p.c_str(), "wb6"));
        if (!f)
            throw Error(ErrorCode::io, "cannot open " + p + " for writing");
        std::size_t done = 0;
        while (done < out.size()) {
            const auto chunk = static_cast<unsigned>(std::min<std::size_t>(out.size() - done, 1u << 30));
            if (gzwrite(f.get(), out.data() + done, chunk) != static_cast<int>(chunk))
                throw Error(ErrorCode::io, "write failed for " + p);
            done += chunk;
        }
        if (gzclose(f.release()) != Z_OK)
            throw Error(ErrorCode::io, "close failed for " + p);
    }
    else {
        std::ofstream os(path, std::ios::binary);
        if (!os)
            throw Error(ErrorCode::io, "cannot open " + p + " for writing");
        os.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
        if (!os)
            throw Error(ErrorCode::io, "write failed for " + p);
    }
}

} // namespace chaleval
