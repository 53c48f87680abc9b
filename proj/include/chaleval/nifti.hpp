#pragma once

#include "chaleval/volume.hpp"

#include <filesystem>
#include <string>

namespace chaleval {

/// Reads a single-file NIfTI-1 label map (.nii or .nii.gz; compression is
/// detected from content, not the extension). Accepted datatypes are uint8,
/// int16 and int32, plus float32/float64 when every value is integral.
/// Spacing comes from |pixdim[1..3]|; the affine comes from sform, else qform,
/// else the pixdim diagonal.
LabelVolume read_label_volume(const std::filesystem::path& path, const std::string& scheme_id = {});

/// Writes a single-file NIfTI-1. A ".gz" suffix selects gzip. The datatype is
/// the narrowest of uint8/int16/int32 that holds the largest label.
void write_label_volume(const LabelVolume& volume, const std::filesystem::path& path);

} // namespace chaleval
