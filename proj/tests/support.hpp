#pragma once

#include <cmath>
#include <vector>

#include "hypervor/kernel.hpp"
#include "hypervor/rng.hpp"

namespace hvtest {

using namespace hypervor;

inline MinkowskiPoint at(double x1, double x2, double x3) {
  const double x0 = std::sqrt(1.0 + x1 * x1 + x2 * x2 + x3 * x3);
  return MinkowskiPoint::from_coords({x0, x1, x2, x3});
}

// Point at hyperbolic distance `r` from the basepoint in direction `d`.
inline MinkowskiPoint polar(const Vec3& d, double r) {
  return exp_map(MinkowskiPoint{}, d, r);
}

inline MinkowskiPoint random_point(Rng& rng, double max_radius) {
  return polar(rng.direction(), rng.uniform(0.0, max_radius));
}

inline std::vector<MinkowskiPoint> random_points(Rng& rng, int n,
                                                 double max_radius) {
  std::vector<MinkowskiPoint> out;
  for (int i = 0; i < n; ++i) out.push_back(random_point(rng, max_radius));
  return out;
}

inline LorentzIsometry random_isometry(Rng& rng, double max_shift = 1.5) {
  const auto r1 = LorentzIsometry::rotation(1, rng.uniform(0, 6.283));
  const auto r2 = LorentzIsometry::rotation(2, rng.uniform(0, 6.283));
  const auto r3 = LorentzIsometry::rotation(3, rng.uniform(0, 6.283));
  const auto t = LorentzIsometry::translation(1, rng.uniform(0, max_shift));
  return r1.compose(t).compose(r2).compose(r3);
}

// Vertices of a regular tetrahedron at distance r from the basepoint.
inline std::vector<MinkowskiPoint> tetrahedron(double r) {
  const double s = 1.0 / std::sqrt(3.0);
  return {polar({s, s, s}, r), polar({s, -s, -s}, r), polar({-s, s, -s}, r),
          polar({-s, -s, s}, r)};
}

}  // namespace hvtest

namespace hvtest {

// Half-space bounded by the plane through a, b, c that contains `inside`.
inline HalfSpace plane_through(const MinkowskiPoint& a, const MinkowskiPoint& b,
                               const MinkowskiPoint& c,
                               const MinkowskiPoint& inside) {
  Eigen::Matrix<double, 3, 4> m;
  for (int j = 0; j < 4; ++j) {
    const double s = j == 0 ? -1.0 : 1.0;
    m(0, j) = s * a[j];
    m(1, j) = s * b[j];
    m(2, j) = s * c[j];
  }
  Eigen::FullPivLU<Eigen::Matrix<double, 3, 4>> lu(m);
  const Eigen::Vector4d n = lu.kernel().col(0);
  Vec4 u{n(0), n(1), n(2), n(3)};
  if (minkowski_dot(inside.coords(), u) > 0) u = -1.0 * u;
  return HalfSpace::from_covector(u);
}

// Orthogonal projection onto the plane of h.
inline MinkowskiPoint project_to_plane(const HalfSpace& h, const MinkowskiPoint& y) {
  const Vec4 v = y.coords() - h.value(y) * h.normal();
  return MinkowskiPoint::from_coords(MinkowskiPoint::renormalized(v));
}

}  // namespace hvtest
