#pragma once

// Calibration file: INI-style text with '#' comment lines.
//
//   # <free-form comments, e.g. config hash and seed>
//   [calibration]
//   k_x = ...   k_y, k_z, b_x, b_y, b_z, a, e_mm, z_scale_hall, z_scale_fa1_sum
//   [diagnostics]
//   r2_x, r2_y, r2_z, rmsd_x, rmsd_y, rmsd_z, samples, a_grid, a_rmsd (comma lists)
//   [metadata]
//   arbitrary key = value pairs
//
// Numbers are written in shortest round-trip form, so read(write(p)) == p.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tacsim/estimation.hpp"

namespace tacsim::estimation {

struct CalibrationFile {
  CalibrationParams params;
  std::map<std::string, std::string> metadata;
};

std::string format_calibration(const CalibrationFile& file, const std::vector<std::string>& comments = {});
CalibrationFile parse_calibration(const std::string& text);

void write_calibration(const std::filesystem::path& path, const CalibrationFile& file,
                       const std::vector<std::string>& comments = {});
CalibrationFile read_calibration(const std::filesystem::path& path);

}  // namespace tacsim::estimation
