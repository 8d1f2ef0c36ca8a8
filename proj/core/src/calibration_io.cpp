#include "tacsim/calibration_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "tacsim/errors.hpp"
#include "tacsim/kv_config.hpp"

namespace tacsim::estimation {

std::string format_calibration(const CalibrationFile& file, const std::vector<std::string>& comments) {
  const CalibrationParams& p = file.params;
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  out += "[calibration]\n";
  out += fmt::format("k_x = {}\nk_y = {}\nk_z = {}\n", p.k.x(), p.k.y(), p.k.z());
  out += fmt::format("b_x = {}\nb_y = {}\nb_z = {}\n", p.b.x(), p.b.y(), p.b.z());
  out += fmt::format("a = {}\ne_mm = {}\n", p.a, p.pitch_mm);
  out += fmt::format("z_scale_hall = {}\nz_scale_fa1_sum = {}\n", p.z_scale.hall, p.z_scale.fa1_sum);
  const FitDiagnostics& d = p.diagnostics;
  out += "\n[diagnostics]\n";
  out += fmt::format("r2_x = {}\nr2_y = {}\nr2_z = {}\n", d.r_squared.x(), d.r_squared.y(), d.r_squared.z());
  out += fmt::format("rmsd_x = {}\nrmsd_y = {}\nrmsd_z = {}\n", d.rmsd_n.x(), d.rmsd_n.y(), d.rmsd_n.z());
  out += fmt::format("samples = {}\n", d.sample_count);
  out += "a_grid = " + config::format_number_list(d.a_grid) + "\n";
  out += "a_rmsd = " + config::format_number_list(d.a_rmsd_n) + "\n";
  if (!file.metadata.empty()) {
    out += "\n[metadata]\n";
    for (const auto& [k, v] : file.metadata) out += k + " = " + v + "\n";
  }
  return out;
}

namespace {

double number(const config::KeyValues& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError("calibration file is missing " + key);
  const auto values = config::parse_number_list(it->second, key);
  if (values.size() != 1) throw ConfigError(key + " must be a single number");
  return values.front();
}

}  // namespace

CalibrationFile parse_calibration(const std::string& text) {
  const config::KeyValues kv = config::parse_kv(text);
  CalibrationFile file;
  CalibrationParams& p = file.params;
  p.k = {number(kv, "calibration.k_x"), number(kv, "calibration.k_y"), number(kv, "calibration.k_z")};
  p.b = {number(kv, "calibration.b_x"), number(kv, "calibration.b_y"), number(kv, "calibration.b_z")};
  p.a = number(kv, "calibration.a");
  p.pitch_mm = number(kv, "calibration.e_mm");
  p.z_scale.hall = number(kv, "calibration.z_scale_hall");
  p.z_scale.fa1_sum = number(kv, "calibration.z_scale_fa1_sum");

  FitDiagnostics& d = p.diagnostics;
  if (kv.count("diagnostics.r2_x") != 0U) {
    d.r_squared = {number(kv, "diagnostics.r2_x"), number(kv, "diagnostics.r2_y"), number(kv, "diagnostics.r2_z")};
    d.rmsd_n = {number(kv, "diagnostics.rmsd_x"), number(kv, "diagnostics.rmsd_y"),
                number(kv, "diagnostics.rmsd_z")};
    d.sample_count = static_cast<int>(number(kv, "diagnostics.samples"));
    if (auto it = kv.find("diagnostics.a_grid"); it != kv.end())
      d.a_grid = config::parse_number_list(it->second, it->first);
    if (auto it = kv.find("diagnostics.a_rmsd"); it != kv.end())
      d.a_rmsd_n = config::parse_number_list(it->second, it->first);
  }
  for (const auto& [k, v] : kv)
    if (k.rfind("metadata.", 0) == 0) file.metadata[k.substr(9)] = v;
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("calibration file: ") + e.what());
  }
  return file;
}

void write_calibration(const std::filesystem::path& path, const CalibrationFile& file,
                       const std::vector<std::string>& comments) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  out << format_calibration(file, comments);
}

CalibrationFile read_calibration(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read calibration file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_calibration(ss.str());
}

}  // namespace tacsim::estimation
