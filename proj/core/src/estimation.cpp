#include "tacsim/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tacsim/errors.hpp"

namespace tacsim::estimation {

Vec2 estimate_location(const TaxelValues& fa1, double pitch_mm, LocationMode mode) {
  if (!(pitch_mm > 0.0)) throw InvalidArgument("pitch must be > 0");
  if (!(fa1.maxCoeff() > kActivationThresholdCounts))
    throw NoContact("no taxel above the activation threshold");

  double sx = 0.0;
  double sy = 0.0;
  for (int r = 0; r < kTaxelRows; ++r) {
    for (int c = 0; c < kTaxelCols; ++c) {
      sx += (c + 1) * fa1(r, c);
      sy += (r + 1) * fa1(r, c);
    }
  }
  if (mode == LocationMode::Literal) return {pitch_mm * sx / kTaxelCount, pitch_mm * sy / kTaxelCount};
  const double total = fa1.sum();
  if (!(total > 0.0)) throw NoContact("pressure sum is not positive");
  return {pitch_mm * sx / total, pitch_mm * sy / total};
}

void CalibrationParams::validate() const {
  if (!(a >= 0.0 && a <= 1.0)) throw InvalidArgument("a must lie in [0, 1]");
  if (!(pitch_mm > 0.0)) throw InvalidArgument("pitch must be > 0");
  if (!k.allFinite() || !b.allFinite()) throw InvalidArgument("k and b must be finite");
  if (!std::isfinite(z_scale.hall) || !std::isfinite(z_scale.fa1_sum))
    throw InvalidArgument("z-channel scales must be finite");
}

double mixed_z_channel(const pipeline::RelativeFrame& frame, double a, const ZChannelScale& scale) {
  return a * scale.hall * frame.sa2_ut.z() + (1.0 - a) * scale.fa1_sum * frame.fa1_sum();
}

Vec3 estimate_force(const pipeline::RelativeFrame& frame, const CalibrationParams& p) {
  return {p.k.x() * frame.sa2_ut.x() + p.b.x(), p.k.y() * frame.sa2_ut.y() + p.b.y(),
          p.k.z() * mixed_z_channel(frame, p.a, p.z_scale) + p.b.z()};
}

Vec3 estimate_torque(const Vec2& location_mm, const Vec3& force_n, const Vec3& joint_center_mm) {
  const Vec3 r = Vec3(location_mm.x(), location_mm.y(), 0.0) - joint_center_mm;
  return r.cross(force_n);
}

ContactEstimate estimate_contact(const pipeline::RelativeFrame& frame, const CalibrationParams& params,
                                 const Vec3& joint_center_mm, LocationMode mode) {
  ContactEstimate e;
  e.location_mm = estimate_location(frame.fa1, params.pitch_mm, mode);
  e.force_n = estimate_force(frame, params);
  e.arm_mm = Vec3(e.location_mm.x(), e.location_mm.y(), 0.0) - joint_center_mm;
  e.torque_nmm = e.arm_mm.cross(e.force_n);
  return e;
}

// ---------------------------------------------------------------------------

std::vector<double> force_grid(double max_n, double step_n) {
  if (!(step_n > 0.0) || !(max_n >= 0.0)) throw InvalidArgument("force grid needs step > 0, max >= 0");
  std::vector<double> grid;
  const auto n = static_cast<int>(std::floor(max_n / step_n + 1e-9));
  for (int i = 0; i <= n; ++i) grid.push_back(i * step_n);
  return grid;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidArgument("fit_line: x and y differ in length");
  if (x.size() < 2) throw RankDeficientFit("fit_line needs at least two points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  double x2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
    x2 += x[i] * x[i];
  }
  if (!(sxx > 1e-24 * std::max(x2, 1e-300))) throw RankDeficientFit("regressor is constant");

  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.slope * x[i] + fit.intercept);
    sse += e * e;
  }
  fit.rmsd = std::sqrt(sse / n);
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return fit;
}

namespace {

struct Columns {
  std::vector<double> bx, by, bz, sum_r;
  std::vector<double> fx, fy, fz;
};

Columns gather(const std::vector<CharacterizationSweep>& sweeps) {
  Columns c;
  for (const auto& sweep : sweeps) {
    for (const auto& s : sweep.samples) {
      c.bx.push_back(s.frame.sa2_ut.x());
      c.by.push_back(s.frame.sa2_ut.y());
      c.bz.push_back(s.frame.sa2_ut.z());
      c.sum_r.push_back(s.frame.fa1_sum());
      c.fx.push_back(s.force_n.x());
      c.fy.push_back(s.force_n.y());
      c.fz.push_back(s.force_n.z());
    }
  }
  return c;
}

void require_levels(const std::vector<double>& f, const char* axis) {
  const std::set<double> levels(f.begin(), f.end());
  if (levels.size() < 2)
    throw RankDeficientFit(std::string("fewer than two distinct force levels on the ") + axis + " axis");
}

double stddev(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

ZChannelScale z_scale_for(const Columns& c, ZScaling scaling) {
  ZChannelScale scale;
  if (scaling == ZScaling::None) return scale;
  const double sh = stddev(c.bz);
  const double sr = stddev(c.sum_r);
  if (!(sh > 0.0) || !(sr > 0.0)) throw RankDeficientFit("a z channel is constant over the sweep");
  scale.hall = 1.0 / sh;
  scale.fa1_sum = 1.0 / sr;
  return scale;
}

std::vector<double> mixed(const Columns& c, double a, const ZChannelScale& s) {
  std::vector<double> m(c.bz.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    m[i] = a * s.hall * c.bz[i] + (1.0 - a) * s.fa1_sum * c.sum_r[i];
  return m;
}

}  // namespace

CalibrationParams fit_calibration(const std::vector<CharacterizationSweep>& sweeps, double a,
                                  ZScaling scaling, double pitch_mm) {
  if (!(a >= 0.0 && a <= 1.0)) throw InvalidArgument("a must lie in [0, 1]");
  const Columns c = gather(sweeps);
  require_levels(c.fx, "x");
  require_levels(c.fy, "y");
  require_levels(c.fz, "z");

  CalibrationParams p;
  p.a = a;
  p.pitch_mm = pitch_mm;
  p.z_scale = z_scale_for(c, scaling);
  const LineFit fx = fit_line(c.bx, c.fx);
  const LineFit fy = fit_line(c.by, c.fy);
  const LineFit fz = fit_line(mixed(c, a, p.z_scale), c.fz);
  p.k = {fx.slope, fy.slope, fz.slope};
  p.b = {fx.intercept, fy.intercept, fz.intercept};
  p.diagnostics.r_squared = {fx.r_squared, fy.r_squared, fz.r_squared};
  p.diagnostics.rmsd_n = {fx.rmsd, fy.rmsd, fz.rmsd};
  p.diagnostics.sample_count = static_cast<int>(c.fx.size());
  return p;
}

ASelection select_a(const std::vector<CharacterizationSweep>& sweeps, double step, ZScaling scaling) {
  if (!(step > 0.0 && step <= 1.0)) throw InvalidArgument("a step must lie in (0, 1]");
  const Columns c = gather(sweeps);
  require_levels(c.fz, "z");
  const ZChannelScale scale = z_scale_for(c, scaling);

  ASelection sel;
  const auto n = static_cast<int>(std::round(1.0 / step));
  for (int i = 0; i <= n; ++i) {
    const double a = std::min(1.0, i * step);
    sel.grid.push_back(a);
    sel.rmsd_n.push_back(fit_line(mixed(c, a, scale), c.fz).rmsd);
  }
  // Smallest a whose RMSD is within rounding of the minimum.
  const double best = *std::min_element(sel.rmsd_n.begin(), sel.rmsd_n.end());
  const double tol = 1e-9 * best + 1e-15;
  for (std::size_t i = 0; i < sel.grid.size(); ++i) {
    if (sel.rmsd_n[i] <= best + tol) {
      sel.a = sel.grid[i];
      break;
    }
  }
  return sel;
}

CalibrationParams calibrate(const std::vector<CharacterizationSweep>& sweeps, ZScaling scaling,
                            double pitch_mm) {
  const ASelection sel = select_a(sweeps, 0.05, scaling);
  CalibrationParams p = fit_calibration(sweeps, sel.a, scaling, pitch_mm);
  p.diagnostics.a_grid = sel.grid;
  p.diagnostics.a_rmsd_n = sel.rmsd_n;
  return p;
}

}  // namespace tacsim::estimation
