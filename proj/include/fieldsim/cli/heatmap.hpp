#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fieldsim/cli/sweep.hpp"

namespace fieldsim::cli {

inline constexpr int kHeatmapCellPixels = 24;

// One (ratio x pitch) slice per method and arm length: a PNG named
// heatmap_<method>_arm<mm>.png plus the grid it shows as a .csv beside it.
// Shading is min-max over all rows of a method, darker = higher. Returns the
// files written, sorted.
std::vector<std::filesystem::path> write_heatmaps(std::span<const ResultRow> rows,
                                                  const std::filesystem::path& dir);

void write_png_gray(const std::filesystem::path& path, int width, int height, const std::vector<unsigned char>& pixels);

}  // namespace fieldsim::cli
