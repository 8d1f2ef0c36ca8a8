#include "tacsim/disturbance.hpp"

#include <cmath>
#include <string>

#include <Eigen/SVD>
#include <fmt/format.h>

#include "tacsim/errors.hpp"

namespace tacsim::disturbance {

double snr(double s_ut, double d_ut) {
  if (!(s_ut > 0.0)) throw InvalidSignal("effective signal must be > 0");
  if (!(d_ut >= 0.0)) throw InvalidArgument("disturbance must be >= 0");
  return s_ut / (s_ut + d_ut);
}

EarthFieldEstimate estimate_earth_field(std::span<const RotationObservation> observations) {
  if (observations.empty()) throw InvalidArgument("need at least one rotation observation");
  const auto n = static_cast<Eigen::Index>(observations.size());
  Eigen::MatrixXd a(3 * n, 3);
  Eigen::VectorXd y(3 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& obs = observations[static_cast<std::size_t>(i)];
    if (!is_proper_rotation(obs.rotation)) throw InvalidArgument("observation rotation is not proper");
    if (!obs.delta_b_ut.allFinite()) throw InvalidArgument("observation flux change is not finite");
    const Mat3 m = obs.rotation - Mat3::Identity();
    if (m.cwiseAbs().maxCoeff() <= 1e-9)
      throw DegenerateRotation(fmt::format("observation {} has an identity rotation", i));
    a.block<3, 3>(3 * i, 0) = m;
    y.segment<3>(3 * i) = obs.delta_b_ut;
  }

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Vector3d sv = svd.singularValues();
  EarthFieldEstimate est;
  est.singular_values = {sv[0], sv[1], sv[2]};
  est.rank = 0;
  for (int i = 0; i < 3; ++i)
    if (sv[i] > kRankTolerance * sv[0]) ++est.rank;
  if (est.rank < 3) {
    const Vec3 axis = svd.matrixV().col(2).normalized();
    throw RankDeficient(fmt::format("rotation stack has rank {}; earth field along ({:.6f}, {:.6f}, {:.6f}) "
                                    "is unobservable",
                                    est.rank, axis.x(), axis.y(), axis.z()),
                        est.rank, axis);
  }

  est.field_ut = svd.solve(y);
  est.condition = sv[0] / sv[2];
  est.residual_norm_ut = (a * est.field_ut - y).norm();
  const Eigen::Index dof = 3 * n - 3;
  const double sigma2 = dof > 0 ? est.residual_norm_ut * est.residual_norm_ut / static_cast<double>(dof) : 0.0;
  const Mat3 v = svd.matrixV();
  const Vec3 inv_s2 = sv.array().square().inverse();
  est.covariance = sigma2 * v * inv_s2.asDiagonal() * v.transpose();
  return est;
}

Vec3 cancel_earth_field(const Vec3& sa2_ut, const Vec3& earth_field_ut, const Mat3& orientation) {
  return sa2_ut - orientation.transpose() * earth_field_ut;
}

pipeline::TactileFrame cancel_earth_field(const pipeline::TactileFrame& frame, const Vec3& earth_field_ut,
                                          const Mat3& orientation) {
  pipeline::TactileFrame out = frame;
  out.sa2_ut = cancel_earth_field(frame.sa2_ut, earth_field_ut, orientation);
  return out;
}

pipeline::RelativeFrame cancel_earth_field(const pipeline::RelativeFrame& frame, const Vec3& earth_field_ut,
                                           const Mat3& orientation) {
  pipeline::RelativeFrame out = frame;
  out.sa2_ut = cancel_earth_field(frame.sa2_ut, earth_field_ut, orientation);
  return out;
}

std::vector<double> default_dy_grid() {
  std::vector<double> grid;
  for (int dy = 4; dy <= 30; ++dy) grid.push_back(dy);
  return grid;
}

SnrSweep adjacent_snr_sweep(std::span<const sensor::MagnetSpec> magnets, std::span<const double> dy_grid_mm,
                            double layer_thickness_mm) {
  if (magnets.empty() || dy_grid_mm.empty()) throw InvalidArgument("snr sweep needs magnets and a dy grid");
  SnrSweep sweep;
  sweep.dy_grid_mm.assign(dy_grid_mm.begin(), dy_grid_mm.end());
  for (const auto& m : magnets) {
    sensor::validate(m);
    const double gap = sensor::rest_gap_mm(m, layer_thickness_mm);
    const double s = sensor::effective_signal_ut(m, gap);
    for (double dy : dy_grid_mm) {
      const Vec3 neighbor(0.0, dy, gap);
      SnrReport row;
      row.magnet_id = m.id;
      row.dy_mm = dy;
      row.s_ut = s;
      row.d_ut = sensor::dipole_flux(m, -neighbor).norm();
      row.snr = snr(s, row.d_ut);
      sweep.rows.push_back(row);
    }
  }
  const std::size_t ndy = dy_grid_mm.size();
  for (std::size_t j = 0; j < ndy; ++j) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < magnets.size(); ++i)
      if (sweep.rows[i * ndy + j].snr > sweep.rows[best * ndy + j].snr) best = i;
    sweep.argmax_magnet.push_back(magnets[best].id);
  }
  return sweep;
}

}  // namespace tacsim::disturbance
