#pragma once

#include "segbench/volume.hpp"

namespace segbench {

enum class Interpolation { nearest, trilinear };

// Output extent per axis: round-half-away(dim * spacing / target), at least 1.
Dims resampled_dims(const Dims& dims, const Vec3& spacing, const Vec3& target_spacing);

// Resamples onto a grid with `target_spacing`. The centres of the input
// and output fields of view coincide; samples falling outside the input
// grid take the nearest edge value. Label volumes only support nearest
// so that no new label IDs can appear.
ImageVolume resample(const ImageVolume& volume, const Vec3& target_spacing,
                     Interpolation mode = Interpolation::trilinear);
LabelVolume resample(const LabelVolume& volume, const Vec3& target_spacing,
                     Interpolation mode = Interpolation::nearest);

}  // namespace segbench
