#include "segbench/nifti.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <string>

#include <zlib.h>

#include "segbench/error.hpp"

static_assert(std::endian::native == std::endian::little, "NIfTI I/O assumes a little-endian host");

namespace segbench {

namespace {

constexpr std::size_t kHeaderSize = 348;
constexpr std::size_t kDataOffset = 352;

// Byte offsets into the NIfTI-1 header.
constexpr std::size_t kOffDim = 40;
constexpr std::size_t kOffDatatype = 70;
constexpr std::size_t kOffBitpix = 72;
constexpr std::size_t kOffPixdim = 76;
constexpr std::size_t kOffVoxOffset = 108;
constexpr std::size_t kOffSclSlope = 112;
constexpr std::size_t kOffSclInter = 116;
constexpr std::size_t kOffXyztUnits = 123;
constexpr std::size_t kOffQformCode = 252;
constexpr std::size_t kOffSformCode = 254;
constexpr std::size_t kOffQuatern = 256;
constexpr std::size_t kOffQoffset = 268;
constexpr std::size_t kOffSrow = 280;
constexpr std::size_t kOffMagic = 344;

template <typename T>
T load(const std::byte* base, std::size_t offset) {
  T value;
  std::memcpy(&value, base + offset, sizeof(T));
  return value;
}

template <typename T>
void store(std::byte* base, std::size_t offset, T value) {
  std::memcpy(base + offset, &value, sizeof(T));
}

struct GzCloser {
  void operator()(gzFile f) const { gzclose(f); }
};
using GzHandle = std::unique_ptr<gzFile_s, GzCloser>;

std::vector<std::byte> slurp(const std::filesystem::path& path) {
  GzHandle in(gzopen(path.c_str(), "rb"));
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::byte> bytes;
  constexpr unsigned kChunk = 1u << 20;
  while (true) {
    auto old = bytes.size();
    bytes.resize(old + kChunk);
    int n = gzread(in.get(), bytes.data() + old, kChunk);
    if (n < 0) {
      int errnum = 0;
      const char* msg = gzerror(in.get(), &errnum);
      throw IoError(path.string() + ": read failed: " + (msg ? msg : "unknown error"));
    }
    bytes.resize(old + static_cast<std::size_t>(n));
    if (n == 0) break;
  }
  return bytes;
}

bool valid_datatype(std::int16_t code) {
  switch (static_cast<NiftiDatatype>(code)) {
    case NiftiDatatype::uint8:
    case NiftiDatatype::int16:
    case NiftiDatatype::int32:
    case NiftiDatatype::float32:
      return true;
  }
  return false;
}

bool ends_with_gz(const std::filesystem::path& path) {
  auto s = path.string();
  return s.size() >= 3 && s.compare(s.size() - 3, 3, ".gz") == 0;
}

}  // namespace

std::size_t bytes_per_voxel(NiftiDatatype type) {
  switch (type) {
    case NiftiDatatype::uint8: return 1;
    case NiftiDatatype::int16: return 2;
    case NiftiDatatype::int32: return 4;
    case NiftiDatatype::float32: return 4;
  }
  throw CapabilityError("unsupported NIfTI datatype");
}

double NiftiFile::value(std::size_t i) const {
  const std::byte* p = payload.data() + i * bytes_per_voxel(datatype);
  double raw = 0.0;
  switch (datatype) {
    case NiftiDatatype::uint8: raw = static_cast<double>(load<std::uint8_t>(p, 0)); break;
    case NiftiDatatype::int16: raw = static_cast<double>(load<std::int16_t>(p, 0)); break;
    case NiftiDatatype::int32: raw = static_cast<double>(load<std::int32_t>(p, 0)); break;
    case NiftiDatatype::float32: raw = static_cast<double>(load<float>(p, 0)); break;
  }
  if (scl_slope != 0.0f && std::isfinite(scl_slope)) {
    return raw * static_cast<double>(scl_slope) + static_cast<double>(scl_inter);
  }
  return raw;
}

NiftiFile read_nifti(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  const std::string name = path.string();
  if (bytes.size() < kHeaderSize) {
    throw IoError(name + ": truncated header (" + std::to_string(bytes.size()) + " bytes)");
  }
  const std::byte* h = bytes.data();

  const auto sizeof_hdr = load<std::int32_t>(h, 0);
  if (sizeof_hdr != static_cast<std::int32_t>(kHeaderSize)) {
    if (sizeof_hdr == 0x5C010000) throw CapabilityError(name + ": big-endian NIfTI is not supported");
    throw FormatError(name + ": not a NIfTI-1 file (sizeof_hdr = " + std::to_string(sizeof_hdr) + ")");
  }
  if (std::memcmp(h + kOffMagic, "n+1\0", 4) != 0) {
    throw FormatError(name + ": bad NIfTI-1 magic (expected single-file \"n+1\")");
  }

  NiftiFile file;
  const auto datatype = load<std::int16_t>(h, kOffDatatype);
  if (!valid_datatype(datatype)) {
    throw CapabilityError(name + ": unsupported NIfTI datatype code " + std::to_string(datatype));
  }
  file.datatype = static_cast<NiftiDatatype>(datatype);

  const auto ndim = load<std::int16_t>(h, kOffDim);
  if (ndim < 1 || ndim > 7) throw FormatError(name + ": invalid dim[0] = " + std::to_string(ndim));
  for (int axis = 0; axis < 3; ++axis) {
    std::int16_t d = axis < ndim ? load<std::int16_t>(h, kOffDim + 2 * (axis + 1)) : 1;
    if (d < 1) throw FormatError(name + ": invalid dim[" + std::to_string(axis + 1) + "]");
    file.dims[axis] = static_cast<std::size_t>(d);
  }
  for (int axis = 3; axis < ndim; ++axis) {
    if (load<std::int16_t>(h, kOffDim + 2 * (axis + 1)) > 1) {
      throw CapabilityError(name + ": only 3D volumes are supported");
    }
  }
  for (int axis = 0; axis < 3; ++axis) {
    double s = std::fabs(static_cast<double>(load<float>(h, kOffPixdim + 4 * (axis + 1))));
    if (!(s > 0.0) || !std::isfinite(s)) throw FormatError(name + ": non-positive voxel spacing");
    file.spacing[axis] = s;
  }
  file.scl_slope = load<float>(h, kOffSclSlope);
  file.scl_inter = load<float>(h, kOffSclInter);

  const auto sform_code = load<std::int16_t>(h, kOffSformCode);
  const auto qform_code = load<std::int16_t>(h, kOffQformCode);
  if (sform_code > 0) {
    for (int row = 0; row < 3; ++row) {
      for (int col = 0; col < 3; ++col) {
        if (row != col && load<float>(h, kOffSrow + 16 * row + 4 * col) != 0.0f) file.axis_aligned = false;
      }
      file.origin[row] = load<float>(h, kOffSrow + 16 * row + 12);
    }
  } else {
    if (qform_code > 0) {
      for (int i = 0; i < 3; ++i) {
        if (load<float>(h, kOffQuatern + 4 * i) != 0.0f) file.axis_aligned = false;
      }
    }
    for (int i = 0; i < 3; ++i) file.origin[i] = load<float>(h, kOffQoffset + 4 * i);
  }

  const float vox_offset = load<float>(h, kOffVoxOffset);
  std::size_t data_start = kDataOffset;
  if (std::isfinite(vox_offset) && vox_offset > static_cast<float>(kHeaderSize)) {
    data_start = static_cast<std::size_t>(vox_offset);
  }
  const std::size_t payload_size = voxel_count(file.dims) * bytes_per_voxel(file.datatype);
  if (bytes.size() < data_start + payload_size) {
    throw IoError(name + ": truncated voxel data (" + std::to_string(bytes.size()) + " bytes, need " +
                  std::to_string(data_start + payload_size) + ")");
  }
  file.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(data_start),
                      bytes.begin() + static_cast<std::ptrdiff_t>(data_start + payload_size));
  return file;
}

void write_nifti(const std::filesystem::path& path, const NiftiFile& file) {
  const std::size_t payload_size = voxel_count(file.dims) * bytes_per_voxel(file.datatype);
  if (file.payload.size() != payload_size) throw ArgumentError("NIfTI payload size does not match dims");
  for (auto d : file.dims) {
    if (d < 1 || d > static_cast<std::size_t>(std::numeric_limits<std::int16_t>::max())) {
      throw ArgumentError("NIfTI-1 dimensions must be in 1..32767");
    }
  }

  std::vector<std::byte> out(kDataOffset + payload_size, std::byte{0});
  std::byte* h = out.data();
  store<std::int32_t>(h, 0, static_cast<std::int32_t>(kHeaderSize));
  store<std::int16_t>(h, kOffDim, 3);
  for (int axis = 0; axis < 3; ++axis) {
    store<std::int16_t>(h, kOffDim + 2 * (axis + 1), static_cast<std::int16_t>(file.dims[axis]));
  }
  for (int axis = 4; axis < 8; ++axis) store<std::int16_t>(h, kOffDim + 2 * axis, 1);
  store<std::int16_t>(h, kOffDatatype, static_cast<std::int16_t>(file.datatype));
  store<std::int16_t>(h, kOffBitpix, static_cast<std::int16_t>(8 * bytes_per_voxel(file.datatype)));
  store<float>(h, kOffPixdim, 1.0f);
  for (int axis = 0; axis < 3; ++axis) {
    store<float>(h, kOffPixdim + 4 * (axis + 1), static_cast<float>(file.spacing[axis]));
  }
  store<float>(h, kOffVoxOffset, static_cast<float>(kDataOffset));
  store<float>(h, kOffSclSlope, file.scl_slope);
  store<float>(h, kOffSclInter, file.scl_inter);
  store<std::uint8_t>(h, kOffXyztUnits, 2);  // mm
  store<std::int16_t>(h, kOffQformCode, 1);
  store<std::int16_t>(h, kOffSformCode, 1);
  for (int i = 0; i < 3; ++i) store<float>(h, kOffQoffset + 4 * i, static_cast<float>(file.origin[i]));
  for (int row = 0; row < 3; ++row) {
    store<float>(h, kOffSrow + 16 * row + 4 * row, static_cast<float>(file.spacing[row]));
    store<float>(h, kOffSrow + 16 * row + 12, static_cast<float>(file.origin[row]));
  }
  std::memcpy(h + kOffMagic, "n+1\0", 4);
  std::copy(file.payload.begin(), file.payload.end(), out.begin() + kDataOffset);

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  GzHandle gz(gzopen(path.c_str(), ends_with_gz(path) ? "wb6" : "wbT"));
  if (!gz) throw IoError("cannot write " + path.string());
  std::size_t written = 0;
  while (written < out.size()) {
    auto chunk = static_cast<unsigned>(std::min<std::size_t>(out.size() - written, 1u << 30));
    int n = gzwrite(gz.get(), out.data() + written, chunk);
    if (n <= 0) throw IoError("write failed for " + path.string());
    written += static_cast<std::size_t>(n);
  }
  if (gzclose(gz.release()) != Z_OK) throw IoError("write failed for " + path.string());
}

ImageVolume to_image(const NiftiFile& file) {
  std::vector<float> values(voxel_count(file.dims));
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<float>(file.value(i));
  return ImageVolume{Grid3<float>(file.dims, std::move(values)), file.spacing, file.origin};
}

LabelVolume to_labels(const NiftiFile& file) {
  std::vector<Label> values(voxel_count(file.dims));
  for (std::size_t i = 0; i < values.size(); ++i) {
    double v = file.value(i);
    double r = std::round(v);
    if (!(r >= 0.0) || r > std::numeric_limits<Label>::max() || std::fabs(v - r) > 1e-3) {
      throw FormatError("label volume holds a non-label value " + std::to_string(v));
    }
    values[i] = static_cast<Label>(r);
  }
  return LabelVolume{Grid3<Label>(file.dims, std::move(values)), file.spacing, file.origin};
}

NiftiFile make_nifti(const ImageVolume& volume) {
  NiftiFile file;
  file.dims = volume.dims();
  file.spacing = volume.spacing;
  file.origin = volume.origin;
  file.datatype = NiftiDatatype::float32;
  auto values = volume.voxels.values();
  file.payload.resize(values.size() * sizeof(float));
  std::memcpy(file.payload.data(), values.data(), file.payload.size());
  return file;
}

NiftiFile make_nifti(const LabelVolume& volume) {
  NiftiFile file;
  file.dims = volume.dims();
  file.spacing = volume.spacing;
  file.origin = volume.origin;
  auto values = volume.voxels.values();
  Label max_label = values.empty() ? 0 : *std::max_element(values.begin(), values.end());
  if (max_label <= 255) {
    file.datatype = NiftiDatatype::uint8;
    file.payload.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) file.payload[i] = static_cast<std::byte>(values[i]);
  } else {
    if (max_label > static_cast<Label>(std::numeric_limits<std::int16_t>::max())) {
      throw ArgumentError("label value too large for NIfTI int16 storage");
    }
    file.datatype = NiftiDatatype::int16;
    file.payload.resize(values.size() * 2);
    for (std::size_t i = 0; i < values.size(); ++i) {
      store<std::int16_t>(file.payload.data(), 2 * i, static_cast<std::int16_t>(values[i]));
    }
  }
  return file;
}

}  // namespace segbench
