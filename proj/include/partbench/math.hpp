#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace partbench {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
};

constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
constexpr Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
constexpr Vec3 operator*(double s, Vec3 a) { return a * s; }
constexpr Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }
constexpr Vec3 operator*(Vec3 a, Vec3 b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }
constexpr Vec3& operator+=(Vec3& a, Vec3 b) { return a = a + b; }
constexpr Vec3& operator-=(Vec3& a, Vec3 b) { return a = a - b; }
constexpr Vec3& operator*=(Vec3& a, double s) { return a = a * s; }
constexpr bool operator==(Vec3 a, Vec3 b) { return a.x == b.x && a.y == b.y && a.z == b.z; }

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length(Vec3 a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalize(Vec3 a) {
  auto l = length(a);
  return l > 0 ? a / l : a;
}
constexpr Vec3 min(Vec3 a, Vec3 b) {
  return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
constexpr Vec3 max(Vec3 a, Vec3 b) {
  return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}
inline Vec3 abs(Vec3 a) { return {std::abs(a.x), std::abs(a.y), std::abs(a.z)}; }
constexpr double max_component(Vec3 a) { return std::max({a.x, a.y, a.z}); }
inline bool isfinite(Vec3 a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

constexpr double radians(double degrees) { return degrees * std::numbers::pi / 180.0; }

// Row-major 3x3 matrix.
struct Mat3 {
  std::array<Vec3, 3> rows = {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};

  constexpr Vec3 operator*(Vec3 v) const { return {dot(rows[0], v), dot(rows[1], v), dot(rows[2], v)}; }
  constexpr Vec3 column(int j) const { return {rows[0][j], rows[1][j], rows[2][j]}; }
  constexpr Mat3 transposed() const { return {{column(0), column(1), column(2)}}; }
  // R^T v without materializing the transpose.
  constexpr Vec3 transpose_mul(Vec3 v) const { return {dot(column(0), v), dot(column(1), v), dot(column(2), v)}; }
};

constexpr Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.rows[i][j] = dot(a.rows[i], b.column(j));
  return r;
}

// Unit quaternion (w, x, y, z).
struct Quat {
  double w = 1, x = 0, y = 0, z = 0;

  static Quat axis_angle(Vec3 axis, double angle) {
    auto a = normalize(axis);
    auto s = std::sin(angle / 2);
    return {std::cos(angle / 2), a.x * s, a.y * s, a.z * s};
  }
  // Shortest-arc rotation taking unit vector `from` onto unit vector `to`.
  static Quat between(Vec3 from, Vec3 to) {
    auto c = dot(from, to);
    if (c < -1 + 1e-12) {
      auto ortho = std::abs(from.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
      return axis_angle(cross(from, ortho), std::numbers::pi);
    }
    auto v = cross(from, to);
    Quat q{1 + c, v.x, v.y, v.z};
    auto n = std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
    return {q.w / n, q.x / n, q.y / n, q.z / n};
  }

  // Normalizes on the fly so rounded (serialized) quaternions still give orthonormal matrices.
  Mat3 matrix() const {
    auto n = std::sqrt(w * w + x * x + y * y + z * z);
    auto a = w / n, b = x / n, c = y / n, d = z / n;
    Mat3 m;
    m.rows[0] = {1 - 2 * (c * c + d * d), 2 * (b * c - a * d), 2 * (b * d + a * c)};
    m.rows[1] = {2 * (b * c + a * d), 1 - 2 * (b * b + d * d), 2 * (c * d - a * b)};
    m.rows[2] = {2 * (b * d - a * c), 2 * (c * d + a * b), 1 - 2 * (b * b + c * c)};
    return m;
  }
};

constexpr Quat operator*(Quat a, Quat b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

struct Aabb {
  Vec3 lo{0, 0, 0};
  Vec3 hi{0, 0, 0};

  Vec3 center() const { return (lo + hi) * 0.5; }
  Vec3 size() const { return hi - lo; }
  bool contains(Vec3 p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z && p.z <= hi.z;
  }
  void expand(Vec3 p) {
    lo = min(lo, p);
    hi = max(hi, p);
  }
  void expand(const Aabb& b) {
    lo = min(lo, b.lo);
    hi = max(hi, b.hi);
  }
};

struct Ray {
  Vec3 origin;
  Vec3 dir;  // unit length

  Vec3 at(double t) const { return origin + dir * t; }
};

// Slab test; returns false when the ray misses. t_near may be negative when the origin is inside.
inline bool intersect(const Ray& ray, const Aabb& box, double& t_near, double& t_far) {
  t_near = -INFINITY;
  t_far = INFINITY;
  for (int i = 0; i < 3; ++i) {
    if (ray.dir[i] == 0) {
      if (ray.origin[i] < box.lo[i] || ray.origin[i] > box.hi[i]) return false;
      continue;
    }
    auto inv = 1.0 / ray.dir[i];
    auto t0 = (box.lo[i] - ray.origin[i]) * inv;
    auto t1 = (box.hi[i] - ray.origin[i]) * inv;
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
  }
  return t_near <= t_far;
}

inline bool intersect_sphere(const Ray& ray, Vec3 center, double radius, double& t_near, double& t_far) {
  auto oc = ray.origin - center;
  auto b = dot(oc, ray.dir);
  auto c = dot(oc, oc) - radius * radius;
  auto disc = b * b - c;
  if (disc < 0) return false;
  auto s = std::sqrt(disc);
  t_near = -b - s;
  t_far = -b + s;
  return t_far >= 0;
}

}  // namespace partbench
