#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "segbench/fusion.hpp"

namespace segbench {

// Binary container of per-window class scores, little-endian:
//
//   char[4]  magic "VSBP"
//   uint32   version (1)
//   uint32   classes C
//   uint32   patch size D
//   uint32   window count W
//   W records of: uint32 origin x, y, z; float32[C * D^3] scores
//
// Scores within a record are class-major, then z, y, x (x fastest).
// Origins index the (possibly zero-padded) volume frame of make_windows.
struct ScorePatchHeader {
  std::uint32_t version = 1;
  std::uint32_t classes = 0;
  std::uint32_t patch_size = 0;
  std::uint32_t window_count = 0;
};

inline constexpr std::uint32_t kScorePatchVersion = 1;

void write_score_patches(const std::filesystem::path& path, std::span<const ScorePatch> patches);

// Random access over the records of one file without loading every block.
class ScorePatchReader {
 public:
  explicit ScorePatchReader(const std::filesystem::path& path);

  const ScorePatchHeader& header() const noexcept { return header_; }
  const std::vector<Index3>& origins() const noexcept { return origins_; }
  ScorePatch read(std::size_t record);
  std::vector<ScorePatch> read_all();

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  ScorePatchHeader header_;
  std::vector<Index3> origins_;
  std::size_t record_bytes_ = 0;
};

// Fuses every record of a file in lexicographic origin order.
FusedVolume fuse_file(const std::filesystem::path& path, const GaussianImportance& importance,
                      const Dims& volume_dims, bool keep_scores = false);

}  // namespace segbench
