#include "segbench/score_patch_file.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>

#include "segbench/error.hpp"

static_assert(std::endian::native == std::endian::little, "score patch I/O assumes a little-endian host");

namespace segbench {

namespace {

constexpr char kMagic[4] = {'V', 'S', 'B', 'P'};
constexpr std::size_t kHeaderBytes = 20;

void put_u32(std::ofstream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }

std::uint32_t get_u32(const char* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xFFFFFFFFu) throw ArgumentError(std::string(what) + " exceeds the container limit");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

void write_score_patches(const std::filesystem::path& path, std::span<const ScorePatch> patches) {
  if (patches.empty()) throw ArgumentError("no score patches to write");
  const auto& first = patches.front();
  for (const auto& p : patches) {
    if (p.classes != first.classes || p.patch_size != first.patch_size || p.scores.size() != p.classes * p.block()) {
      throw ArgumentError("score patches in one file must share class count and patch size");
    }
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(kMagic, 4);
  put_u32(out, kScorePatchVersion);
  put_u32(out, checked_u32(first.classes, "class count"));
  put_u32(out, checked_u32(first.patch_size, "patch size"));
  put_u32(out, checked_u32(patches.size(), "window count"));
  for (const auto& p : patches) {
    for (auto o : p.origin) put_u32(out, checked_u32(o, "origin"));
    out.write(reinterpret_cast<const char*>(p.scores.data()),
              static_cast<std::streamsize>(p.scores.size() * sizeof(float)));
  }
  if (!out) throw IoError("write failed for " + path.string());
}

ScorePatchReader::ScorePatchReader(const std::filesystem::path& path)
    : path_(path), in_(path, std::ios::binary) {
  const std::string name = path.string();
  if (!in_) throw IoError("cannot open " + name);
  char buf[kHeaderBytes];
  if (!in_.read(buf, kHeaderBytes)) throw IoError(name + ": truncated score patch header");
  if (std::memcmp(buf, kMagic, 4) != 0) throw FormatError(name + ": bad score patch magic");
  header_.version = get_u32(buf + 4);
  header_.classes = get_u32(buf + 8);
  header_.patch_size = get_u32(buf + 12);
  header_.window_count = get_u32(buf + 16);
  if (header_.version != kScorePatchVersion) {
    throw CapabilityError(name + ": unsupported score patch version " + std::to_string(header_.version));
  }
  if (header_.classes == 0 || header_.patch_size == 0) throw FormatError(name + ": empty class or patch size");

  const std::size_t d = header_.patch_size;
  record_bytes_ = 12 + sizeof(float) * header_.classes * d * d * d;
  const auto expected = kHeaderBytes + record_bytes_ * header_.window_count;
  const auto actual = std::filesystem::file_size(path);
  if (actual < expected) throw IoError(name + ": truncated score patch file");
  if (actual > expected) throw FormatError(name + ": trailing bytes after the last score patch");

  origins_.reserve(header_.window_count);
  for (std::size_t r = 0; r < header_.window_count; ++r) {
    char o[12];
    in_.seekg(static_cast<std::streamoff>(kHeaderBytes + r * record_bytes_));
    if (!in_.read(o, 12)) throw IoError(name + ": read failed");
    origins_.push_back({get_u32(o), get_u32(o + 4), get_u32(o + 8)});
  }
}

ScorePatch ScorePatchReader::read(std::size_t record) {
  if (record >= origins_.size()) throw ArgumentError("score patch record out of range");
  ScorePatch patch(origins_[record], header_.classes, header_.patch_size);
  in_.seekg(static_cast<std::streamoff>(kHeaderBytes + record * record_bytes_ + 12));
  if (!in_.read(reinterpret_cast<char*>(patch.scores.data()),
                static_cast<std::streamsize>(patch.scores.size() * sizeof(float)))) {
    throw IoError(path_.string() + ": read failed");
  }
  for (float s : patch.scores) {
    if (!std::isfinite(s)) {
      throw FormatError(path_.string() + ": non-finite score in record " + std::to_string(record));
    }
  }
  return patch;
}

std::vector<ScorePatch> ScorePatchReader::read_all() {
  std::vector<ScorePatch> patches;
  patches.reserve(origins_.size());
  for (std::size_t r = 0; r < origins_.size(); ++r) patches.push_back(read(r));
  return patches;
}

FusedVolume fuse_file(const std::filesystem::path& path, const GaussianImportance& importance,
                      const Dims& volume_dims, bool keep_scores) {
  ScorePatchReader reader(path);
  const auto& origins = reader.origins();
  if (origins.empty()) throw DataError(path.string() + ": contains no windows");
  if (reader.header().patch_size != importance.patch_size()) {
    throw DataError(path.string() + ": patch size " + std::to_string(reader.header().patch_size) +
                    " does not match the configured " + std::to_string(importance.patch_size()));
  }
  std::vector<std::size_t> order(origins.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return origins[a] < origins[b]; });
  FusionAccumulator acc(volume_dims, reader.header().classes, importance);
  for (auto r : order) acc.add(reader.read(r));
  return acc.finish(keep_scores);
}

}  // namespace segbench
