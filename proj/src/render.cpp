#include "partbench/render.hpp"

#include <cmath>

#include "partbench/error.hpp"

namespace partbench {

Camera::Camera(double azimuth_deg, double elevation_deg, double distance, double fov_deg, int height, int width,
               Vec3 target)
    : azimuth_(azimuth_deg),
      elevation_(elevation_deg),
      distance_(distance),
      fov_(fov_deg),
      height_(height),
      width_(width),
      target_(target) {
  if (!(fov_deg > 10 && fov_deg < 120)) throw Error("invalid-camera", "fov must lie in (10, 120) degrees");
  if (!(distance > 0)) throw Error("invalid-camera", "distance must be positive");
  if (height <= 0 || width <= 0) throw Error("invalid-camera", "image size must be positive");
  // The camera sits at R_y(azimuth) applied to the +z axis, raised by the elevation. Turning the
  // asset by +90 degrees about +y therefore shows in the camera 90 degrees further round.
  auto az = radians(azimuth_deg), el = radians(elevation_deg);
  position_ = target + Vec3{std::cos(el) * std::sin(az), std::sin(el), std::cos(el) * std::cos(az)} * distance;
  forward_ = normalize(target - position_);
  right_ = normalize(cross(forward_, Vec3{0, 1, 0}));
  up_ = cross(right_, forward_);
  tan_half_ = std::tan(radians(fov_deg) / 2);
}

Ray Camera::ray(int row, int col) const {
  auto aspect = static_cast<double>(width_) / height_;
  auto x = (2.0 * (col + 0.5) / width_ - 1.0) * tan_half_ * aspect;
  auto y = (1.0 - 2.0 * (row + 0.5) / height_) * tan_half_;
  return {position_, normalize(forward_ + right_ * x + up_ * y)};
}

std::optional<Camera::Projection> Camera::project(Vec3 p) const {
  auto v = p - position_;
  auto z = dot(v, forward_);
  if (z <= 0) return std::nullopt;
  auto aspect = static_cast<double>(width_) / height_;
  auto x = dot(v, right_) / z / (tan_half_ * aspect);
  auto y = dot(v, up_) / z / tan_half_;
  return Projection{(1.0 - y) / 2.0 * height_, (x + 1.0) / 2.0 * width_, length(v)};
}

Rig make_rig(int height, int width, double distance, double fov) {
  return {Camera(0, kRigElevation, distance, fov, height, width), Camera(90, kRigElevation, distance, fov, height, width),
          Camera(180, kRigElevation, distance, fov, height, width),
          Camera(270, kRigElevation, distance, fov, height, width)};
}

Mask ViewBundle::part_silhouette(int k) const {
  const auto& d = part_depth[k];
  Mask m(d.height, d.width);
  for (std::size_t i = 0; i < d.data.size(); ++i)
    if (std::isfinite(d.data[i])) m.set(i);
  return m;
}

Rgb shade(Vec3 albedo, Vec3 normal, const Camera& cam, Shading shading) {
  if (shading == Shading::albedo_flat)
    return {static_cast<float>(albedo.x), static_cast<float>(albedo.y), static_cast<float>(albedo.z)};
  auto light = normalize(cam.right() * 0.4 + cam.up() * 0.6 - cam.forward() * 0.7);
  auto k = 0.2 + 0.8 * std::max(0.0, dot(normal, light));
  auto c = [&](double a) { return static_cast<float>(std::min(1.0, a * k)); };
  return {c(albedo.x), c(albedo.y), c(albedo.z)};
}

namespace {

struct BoundSphere {
  Vec3 center;
  double radius;
};

std::vector<BoundSphere> part_spheres(const Asset& asset) {
  std::vector<BoundSphere> out;
  for (const auto& part : asset.parts) {
    auto c = part.bounds().center();
    double r = 0;
    for (const auto& prim : part.primitives) r = std::max(r, length(prim.bound_center() - c) + prim.bound_radius());
    if (!isfinite(c) || !std::isfinite(r) || !std::isfinite(part.sdf(c)))
      throw Error("geometry-nan", "non-finite part geometry");
    out.push_back({c, r * 1.001 + 1e-6});
  }
  return out;
}

Vec3 part_normal(const Part& part, Vec3 p) {
  constexpr double h = 1e-5;
  const Vec3 k0{1, -1, -1}, k1{-1, -1, 1}, k2{-1, 1, -1}, k3{1, 1, 1};
  return normalize(k0 * part.sdf(p + k0 * h) + k1 * part.sdf(p + k1 * h) + k2 * part.sdf(p + k2 * h) +
                   k3 * part.sdf(p + k3 * h));
}

struct PartHit {
  float depth;
  Rgb color;
};

PartHit hit_part(const Part& part, const BoundSphere& bs, const Ray& ray, const Camera& cam, const MarchConfig& cfg) {
  auto t = trace_part(part, ray, cfg, bs.center, bs.radius);
  if (!std::isfinite(t)) return {std::numeric_limits<float>::infinity(), {0, 0, 0}};
  auto p = ray.at(t);
  return {static_cast<float>(t), shade(part.eval(p).albedo, part_normal(part, p), cam, cfg.shading)};
}

}  // namespace

double trace_part(const Part& part, const Ray& ray, const MarchConfig& cfg, Vec3 bound_center, double bound_radius) {
  double t_near, t_far;
  if (!intersect_sphere(ray, bound_center, bound_radius, t_near, t_far)) return INFINITY;
  double t = std::max(t_near, 0.0);
  const double t_end = std::min(t_far, cfg.far_limit);
  for (int i = 0; i < cfg.max_steps && t <= t_end; ++i) {
    auto d = part.sdf(ray.at(t));
    if (!std::isfinite(d)) throw Error("geometry-nan", "non-finite SDF value");
    if (d < cfg.hit_epsilon) return t;
    t += d;
  }
  return INFINITY;
}

ViewBundle render_views(const Asset& asset, const Rig& rig, const MarchConfig& cfg) {
  const int h = rig[0].height(), w = rig[0].width();
  const int parts = static_cast<int>(asset.parts.size());
  ViewBundle b;
  b.tile_height = h;
  b.tile_width = w;
  b.rig.assign(rig.begin(), rig.end());
  b.rgb = Image(2 * h, 2 * w);
  b.part_depth.assign(parts, DepthMap(2 * h, 2 * w));
  b.part_rgb.assign(parts, Image(2 * h, 2 * w));
  auto spheres = part_spheres(asset);
  for (int tile = 0; tile < 4; ++tile) {
    const auto& cam = rig[tile];
    auto o = tile_origin(tile, h, w);
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        auto ray = cam.ray(r, c);
        for (int s = 0; s < parts; ++s) {
          auto hit = hit_part(asset.parts[s], spheres[s], ray, cam, cfg);
          b.part_depth[s].set(o.row + r, o.col + c, hit.depth);
          b.part_rgb[s].set(o.row + r, o.col + c, hit.color);
        }
      }
  }
  b.part_masks = derive_masks(b.part_depth);
  b.foreground = Mask(2 * h, 2 * w);
  // The composite shows whichever part wins the depth test, shaded exactly as in its isolated render.
  for (int s = 0; s < parts; ++s) {
    b.foreground |= b.part_masks[s];
    for (int r = 0; r < 2 * h; ++r)
      for (int c = 0; c < 2 * w; ++c)
        if (b.part_masks[s].get(r, c)) b.rgb.set(r, c, b.part_rgb[s].get(r, c));
  }
  return b;
}

CameraRender render_camera(const Asset& asset, const Camera& cam, const MarchConfig& cfg) {
  CameraRender out{Image(cam.height(), cam.width()), Mask(cam.height(), cam.width())};
  auto spheres = part_spheres(asset);
  for (int r = 0; r < cam.height(); ++r)
    for (int c = 0; c < cam.width(); ++c) {
      auto ray = cam.ray(r, c);
      PartHit best{std::numeric_limits<float>::infinity(), {0, 0, 0}};
      for (std::size_t s = 0; s < asset.parts.size(); ++s) {
        auto hit = hit_part(asset.parts[s], spheres[s], ray, cam, cfg);
        if (hit.depth < best.depth) best = hit;
      }
      if (std::isfinite(best.depth)) {
        out.rgb.set(r, c, best.color);
        out.foreground.set(r, c);
      }
    }
  return out;
}

std::vector<Mask> derive_masks(const std::vector<DepthMap>& depths) {
  if (depths.empty()) return {};
  const int h = depths[0].height, w = depths[0].width;
  for (const auto& d : depths)
    if (d.height != h || d.width != w) throw Error("size-mismatch", "depth maps differ in resolution");
  std::vector<Mask> masks(depths.size(), Mask(h, w));
  const std::size_t n = static_cast<std::size_t>(h) * w;
  for (std::size_t i = 0; i < n; ++i) {
    int best = -1;
    float best_depth = std::numeric_limits<float>::infinity();
    for (std::size_t k = 0; k < depths.size(); ++k)
      if (depths[k].data[i] < best_depth) {
        best_depth = depths[k].data[i];
        best = static_cast<int>(k);
      }
    if (best >= 0) masks[best].set(i);
  }
  return masks;
}

double foreground_psnr(const Image& reference, const Image& estimate, const Mask& mask) {
  if (reference.height != estimate.height || reference.width != estimate.width ||
      mask.height() != reference.height || mask.width() != reference.width)
    throw Error("size-mismatch", "PSNR inputs differ in resolution");
  double sum = 0;
  std::size_t n = 0;
  for (int r = 0; r < reference.height; ++r)
    for (int c = 0; c < reference.width; ++c) {
      if (!mask.get(r, c)) continue;
      auto a = reference.get(r, c), b = estimate.get(r, c);
      for (int ch = 0; ch < 3; ++ch) {
        double d = static_cast<double>(a[ch]) - static_cast<double>(b[ch]);
        sum += d * d;
      }
      ++n;
    }
  if (n == 0) throw Error("empty-foreground");
  double mse = sum / (3.0 * n);
  if (mse == 0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

}  // namespace partbench
