#pragma once

// Hyperboloid-model numerics for H^3.
//
// Points live on the upper sheet {<x,x> = -1, x0 > 0} of Minkowski space
// R^{1,3} with the form <x,y> = -x0 y0 + x1 y1 + x2 y2 + x3 y3.
// Orientation-preserving isometries are the matrices of SO+(1,3) acting
// linearly, and every bisector is the trace of a linear hyperplane, so all
// incidence questions reduce to linear algebra.

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "hypervor/errors.hpp"
#include "hypervor/tolerances.hpp"

namespace hypervor {

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;
using Mat4 = std::array<std::array<double, 4>, 4>;

inline double minkowski_dot(const Vec4& a, const Vec4& b) {
  return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

inline Vec4 operator+(const Vec4& a, const Vec4& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}
inline Vec4 operator-(const Vec4& a, const Vec4& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}
inline Vec4 operator*(double s, const Vec4& a) {
  return {s * a[0], s * a[1], s * a[2], s * a[3]};
}

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(double s, const Vec3& a) {
  return {s * a[0], s * a[1], s * a[2]};
}
inline double dot3(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline Vec3 cross3(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}
inline double norm3(const Vec3& a) { return std::sqrt(dot3(a, a)); }

// Tolerance on <x,x> = -1 scaled by the magnitude of the coordinates, since
// the form is evaluated with cancellation between terms of size x0^2.
inline double hyperboloid_tolerance(const Vec4& x) {
  return tol::kNorm * std::max(1.0, x[0] * x[0]);
}

class MinkowskiPoint {
 public:
  // The basepoint (1,0,0,0).
  MinkowskiPoint() : x_{1.0, 0.0, 0.0, 0.0} {}

  // Validates the hyperboloid invariants and renormalizes within tolerance.
  static MinkowskiPoint from_coords(const Vec4& x) {
    const double q = minkowski_dot(x, x);
    if (!(x[0] > 0.0)) {
      throw InvariantViolation("point is not on the upper sheet (x0 <= 0)");
    }
    if (std::abs(q + 1.0) > 100.0 * hyperboloid_tolerance(x)) {
      std::ostringstream os;
      os << "point off the hyperboloid: <x,x> = " << q;
      throw InvariantViolation(os.str());
    }
    return MinkowskiPoint(renormalized(x));
  }

  // Lifts a point of the open unit ball (Beltrami-Klein model).
  static MinkowskiPoint from_klein(const Vec3& k) {
    const double r2 = dot3(k, k);
    if (!(r2 < 1.0)) {
      throw InvariantViolation("Klein point outside the open unit ball");
    }
    const double x0 = 1.0 / std::sqrt(1.0 - r2);
    return MinkowskiPoint(Vec4{x0, x0 * k[0], x0 * k[1], x0 * k[2]});
  }

  const Vec4& coords() const { return x_; }
  double operator[](std::size_t i) const { return x_[i]; }

  Vec3 klein() const { return {x_[1] / x_[0], x_[2] / x_[0], x_[3] / x_[0]}; }

  // Projection of an arbitrary timelike vector with positive x0.
  static Vec4 renormalized(const Vec4& x) {
    const double q = -minkowski_dot(x, x);
    return (1.0 / std::sqrt(q)) * x;
  }

  friend bool operator==(const MinkowskiPoint& a, const MinkowskiPoint& b) {
    return a.x_ == b.x_;
  }

 private:
  explicit MinkowskiPoint(const Vec4& x) : x_(x) {}
  Vec4 x_;
};

inline Mat4 mat_mul(const Mat4& a, const Mat4& b) {
  Mat4 c{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += a[i][k] * b[k][j];
      c[i][j] = s;
    }
  return c;
}

inline Vec4 mat_vec(const Mat4& a, const Vec4& x) {
  Vec4 y{};
  for (int i = 0; i < 4; ++i)
    y[i] = a[i][0] * x[0] + a[i][1] * x[1] + a[i][2] * x[2] + a[i][3] * x[3];
  return y;
}

inline Mat4 identity_mat4() {
  Mat4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

inline double max_abs_diff(const Mat4& a, const Mat4& b) {
  double d = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) d = std::max(d, std::abs(a[i][j] - b[i][j]));
  return d;
}

inline double max_abs(const Mat4& a) {
  double d = 0.0;
  for (const auto& row : a)
    for (double v : row) d = std::max(d, std::abs(v));
  return d;
}

inline double determinant(const Mat4& a) {
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = a[i][j];
  return m.determinant();
}

// Element of SO+(1,3).
class LorentzIsometry {
 public:
  LorentzIsometry() : m_(identity_mat4()) {}

  // Validates m^T J m = J, preservation of the upper sheet and det = +1.
  static LorentzIsometry from_matrix(const Mat4& m) {
    if (auto why = violation(m); !why.empty()) throw InvariantViolation(why);
    return LorentzIsometry(m);
  }

  // Empty string when `m` is a valid orientation-preserving isometry.
  static std::string violation(const Mat4& m) {
    for (const auto& row : m)
      for (double v : row)
        if (!std::isfinite(v)) return "matrix has non-finite entries";
    const double scale = std::max(1.0, max_abs(m) * max_abs(m));
    const Mat4 g = gram(m);
    Mat4 j{};
    j[0][0] = -1.0;
    j[1][1] = j[2][2] = j[3][3] = 1.0;
    if (max_abs_diff(g, j) > tol::kNorm * scale) {
      std::ostringstream os;
      os << "m^T J m != J (max deviation " << max_abs_diff(g, j) << ")";
      return os.str();
    }
    if (!(m[0][0] > 0.0)) return "matrix does not preserve the upper sheet";
    if (determinant(m) < 0.0) return "matrix reverses orientation (det = -1)";
    return {};
  }

  static LorentzIsometry identity() { return LorentzIsometry(); }

  // Boost of hyperbolic length `t` along coordinate axis `axis` in {1,2,3}.
  static LorentzIsometry translation(int axis, double t) {
    Mat4 m = identity_mat4();
    m[0][0] = m[axis][axis] = std::cosh(t);
    m[0][axis] = m[axis][0] = std::sinh(t);
    return LorentzIsometry(m);
  }

  // Rotation by `angle` about coordinate axis `axis` in {1,2,3}, fixing the
  // basepoint; positive angle is counterclockwise in the oriented plane of
  // the other two axes.
  static LorentzIsometry rotation(int axis, double angle) {
    const int a = axis == 1 ? 2 : 1;
    const int b = axis == 3 ? 2 : 3;
    Mat4 m = identity_mat4();
    const double c = std::cos(angle), s = std::sin(angle);
    m[a][a] = c;
    m[a][b] = -s;
    m[b][a] = s;
    m[b][b] = c;
    return LorentzIsometry(m);
  }

  // Translation by `length` along the geodesic axis through the basepoint
  // in direction `axis`, composed with a rotation by `twist` about it.
  static LorentzIsometry loxodromic(int axis, double length, double twist) {
    return translation(axis, length).compose(rotation(axis, twist));
  }

  // The boost carrying the basepoint to `p` (pure translation along the
  // geodesic from the basepoint to p).
  static LorentzIsometry boost_to(const MinkowskiPoint& p) {
    const Vec4& x = p.coords();
    const double x0 = x[0];
    Mat4 m{};
    m[0][0] = x0;
    for (int i = 1; i < 4; ++i) {
      m[0][i] = x[i];
      m[i][0] = x[i];
      for (int j = 1; j < 4; ++j)
        m[i][j] = (i == j ? 1.0 : 0.0) + x[i] * x[j] / (1.0 + x0);
    }
    return LorentzIsometry(m);
  }

  const Mat4& matrix() const { return m_; }

  // this * other (apply `other` first).
  LorentzIsometry compose(const LorentzIsometry& other) const {
    return LorentzIsometry(mat_mul(m_, other.m_));
  }

  // J m^T J.
  LorentzIsometry inverse() const {
    Mat4 r{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const double si = i == 0 ? -1.0 : 1.0;
        const double sj = j == 0 ? -1.0 : 1.0;
        r[i][j] = si * sj * m_[j][i];
      }
    return LorentzIsometry(r);
  }

  Vec4 apply_vector(const Vec4& v) const { return mat_vec(m_, v); }

  bool is_identity(double tolerance = tol::kNorm) const {
    return max_abs_diff(m_, identity_mat4()) <= tolerance;
  }

  // Matrix distance used for word/lift comparisons.
  double distance_to(const LorentzIsometry& other) const {
    return max_abs_diff(m_, other.m_);
  }

 private:
  explicit LorentzIsometry(const Mat4& m) : m_(m) {}

  static Mat4 gram(const Mat4& m) {
    Mat4 g{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double s = -m[0][i] * m[0][j];
        for (int k = 1; k < 4; ++k) s += m[k][i] * m[k][j];
        g[i][j] = s;
      }
    return g;
  }

  Mat4 m_;
};

// The closed half-space {x : <x,u> <= 0} for a unit spacelike covector u.
class HalfSpace {
 public:
  HalfSpace() : u_{0.0, 1.0, 0.0, 0.0} {}

  // Normalizes u; rejects covectors whose hyperplane misses H^3.
  static HalfSpace from_covector(const Vec4& u) {
    const double q = minkowski_dot(u, u);
    if (!(q > tol::kNorm)) {
      throw InvariantViolation(
          "half-space covector is not spacelike; its plane misses H^3");
    }
    return HalfSpace((1.0 / std::sqrt(q)) * u);
  }

  const Vec4& normal() const { return u_; }

  // <x,u>; equals sinh of the signed distance from x to the boundary plane.
  double value(const MinkowskiPoint& x) const {
    return minkowski_dot(x.coords(), u_);
  }

  double signed_distance(const MinkowskiPoint& x) const {
    return std::asinh(value(x));
  }

  bool contains(const MinkowskiPoint& x, double slack = tol::kGeom) const {
    return signed_distance(x) <= slack;
  }

  HalfSpace opposite() const { return HalfSpace(-1.0 * u_); }

  HalfSpace transformed(const LorentzIsometry& g) const {
    // {x : <g^-1 x, u> <= 0} = {x : <x, g u> <= 0}.
    return HalfSpace(g.apply_vector(u_));
  }

  // In Klein coordinates the half-space is {k : a.k <= b}.
  void klein_plane(Vec3& a, double& b) const {
    a = {u_[1], u_[2], u_[3]};
    b = u_[0];
  }

 private:
  explicit HalfSpace(const Vec4& u) : u_(u) {}
  Vec4 u_;
};

// arccosh(-<p,q>).
inline double dist(const MinkowskiPoint& p, const MinkowskiPoint& q) {
  const double c = -minkowski_dot(p.coords(), q.coords());
  if (c < 1.0 - tol::kNorm * std::max(1.0, p[0] * q[0])) {
    std::ostringstream os;
    os << "cosh distance below 1 (" << c << "): invariant violated";
    throw InvariantViolation(os.str());
  }
  // Cancellation-free form for nearby points: cosh d - 1 = |p - q|^2 / 2.
  if (c < 1.5) {
    const Vec4 d = p.coords() - q.coords();
    const double s = minkowski_dot(d, d);
    if (s <= 0.0) return 0.0;
    return 2.0 * std::asinh(0.5 * std::sqrt(s));
  }
  return std::acosh(c);
}

// Applies g and re-projects onto the hyperboloid.
inline MinkowskiPoint apply(const LorentzIsometry& g, const MinkowskiPoint& p) {
  const Vec4 y = g.apply_vector(p.coords());
  const double drift = std::abs(minkowski_dot(y, y) + 1.0);
  if (drift > 100.0 * hyperboloid_tolerance(y)) {
    std::ostringstream os;
    os << "isometry image drifted off the hyperboloid by " << drift;
    throw InvariantViolation(os.str());
  }
  return MinkowskiPoint::from_coords(y);
}

// {x : dist(x,p) <= dist(x,q)}: the covector is q - p, normalized.
inline HalfSpace bisector_halfspace(const MinkowskiPoint& p,
                                    const MinkowskiPoint& q) {
  if (dist(p, q) <= tol::kGeom) {
    throw DegenerateSites("bisector of coincident sites is undefined");
  }
  return HalfSpace::from_covector(q.coords() - p.coords());
}

// Point at distance t from p in the direction `dir`, where `dir` is a unit
// vector in the tangent frame at p obtained by boosting the basepoint frame.
inline MinkowskiPoint exp_map(const MinkowskiPoint& p, const Vec3& dir,
                              double t) {
  const double n = norm3(dir);
  const Vec3 u = (1.0 / n) * dir;
  const Vec4 local{std::cosh(t), std::sinh(t) * u[0], std::sinh(t) * u[1],
                   std::sinh(t) * u[2]};
  return apply(LorentzIsometry::boost_to(p),
               MinkowskiPoint::from_coords(local));
}

// Distance from the basepoint to a point given in Klein coordinates.
inline double klein_radius_to_distance(double r) { return std::atanh(r); }
inline double distance_to_klein_radius(double d) { return std::tanh(d); }

// Numerical rank of the rows of a small matrix, using a singular-value
// threshold relative to the largest singular value.
inline int relative_rank(const Eigen::MatrixXd& rows, double rel_tol,
                         double* smallest_kept_ratio = nullptr) {
  if (rows.rows() == 0 || rows.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) <= 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++rank;
  if (smallest_kept_ratio) *smallest_kept_ratio = s(s.size() - 1) / s(0);
  return rank;
}

// True iff the four points lie on a common circle, horocycle, equidistant
// curve or geodesic: their affine span in R^{1,3} has dimension <= 2.
inline bool is_degenerate_quadruple(const MinkowskiPoint& p1,
                                    const MinkowskiPoint& p2,
                                    const MinkowskiPoint& p3,
                                    const MinkowskiPoint& p4) {
  const std::array<const MinkowskiPoint*, 4> pts{&p1, &p2, &p3, &p4};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (dist(*pts[i], *pts[j]) <= tol::kGeom)
        throw DegenerateSites(
            "coincident points in quadruple test; perturb the input");
  Eigen::MatrixXd d(3, 4);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) d(r, c) = (*pts[r + 1])[c] - p1[c];
  return relative_rank(d, tol::kRank) <= 2;
}

}  // namespace hypervor
