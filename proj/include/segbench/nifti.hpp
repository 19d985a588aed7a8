#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "segbench/volume.hpp"

namespace segbench {

enum class NiftiDatatype : std::int16_t {
  uint8 = 2,
  int16 = 4,
  int32 = 8,
  float32 = 16,
};

std::size_t bytes_per_voxel(NiftiDatatype type);

// Single-file NIfTI-1 image as stored on disk: geometry, storage type and
// the raw little-endian voxel payload. Keeping the payload untouched makes
// read/write round trips exact for every supported datatype.
struct NiftiFile {
  Dims dims{1, 1, 1};
  Vec3 spacing{1.0, 1.0, 1.0};
  Vec3 origin{0.0, 0.0, 0.0};
  NiftiDatatype datatype = NiftiDatatype::float32;
  float scl_slope = 0.0f;
  float scl_inter = 0.0f;
  // False when the stored affine has rotation or shear. Such files are
  // still read as axis-aligned; callers should warn.
  bool axis_aligned = true;
  std::vector<std::byte> payload;

  // Voxel i with scl_slope/scl_inter applied (when slope != 0).
  double value(std::size_t i) const;

  bool operator==(const NiftiFile&) const = default;
};

// Reads `.nii` or gzip-compressed `.nii.gz` (detected from content).
NiftiFile read_nifti(const std::filesystem::path& path);
// Writes gzip-compressed output when the path ends in ".gz".
void write_nifti(const std::filesystem::path& path, const NiftiFile& file);

ImageVolume to_image(const NiftiFile& file);
// Throws FormatError when a scaled voxel is negative, non-integral or
// exceeds the label range.
LabelVolume to_labels(const NiftiFile& file);

// float32 payload.
NiftiFile make_nifti(const ImageVolume& volume);
// uint8 payload; int16 when a label exceeds 255.
NiftiFile make_nifti(const LabelVolume& volume);

inline ImageVolume read_image(const std::filesystem::path& path) { return to_image(read_nifti(path)); }
inline LabelVolume read_labels(const std::filesystem::path& path) { return to_labels(read_nifti(path)); }
inline void write_image(const std::filesystem::path& path, const ImageVolume& v) { write_nifti(path, make_nifti(v)); }
inline void write_labels(const std::filesystem::path& path, const LabelVolume& v) { write_nifti(path, make_nifti(v)); }

}  // namespace segbench
