#include "tacsim/geometry.hpp"

#include "tacsim/errors.hpp"

namespace tacsim {

bool is_proper_rotation(const Mat3& r, double tol) {
  if (!r.allFinite()) return false;
  const Mat3 gram = r.transpose() * r;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(r.determinant() - 1.0) <= tol;
}

Mat3 rotation_about(const Vec3& axis, double angle_rad) {
  const double n = axis.norm();
  if (!(n > 0.0)) throw InvalidArgument("rotation axis must be non-zero");
  return Eigen::AngleAxisd(angle_rad, axis / n).toRotationMatrix();
}

}  // namespace tacsim
