#pragma once

#include <array>
#include <optional>
#include <vector>

#include "partbench/image.hpp"
#include "partbench/math.hpp"
#include "partbench/scene.hpp"

namespace partbench {

inline constexpr double kRigElevation = 20.0;
inline constexpr double kDefaultFov = 40.0;
inline constexpr double kDefaultDistanceFactor = 2.7;  // times the asset radius
inline constexpr int kDefaultTile = 128;

// Pinhole camera looking at `target` with world +y up.
class Camera {
 public:
  Camera(double azimuth_deg, double elevation_deg, double distance, double fov_deg, int height, int width,
         Vec3 target = {});

  double azimuth() const { return azimuth_; }
  double elevation() const { return elevation_; }
  double distance() const { return distance_; }
  double fov() const { return fov_; }
  int height() const { return height_; }
  int width() const { return width_; }
  Vec3 target() const { return target_; }

  Vec3 position() const { return position_; }
  Vec3 forward() const { return forward_; }
  Vec3 right() const { return right_; }
  Vec3 up() const { return up_; }

  // Ray through the centre of pixel (row, col).
  Ray ray(int row, int col) const;

  struct Projection {
    double row;  // continuous pixel coordinates; pixel (r, c) spans [r, r+1) x [c, c+1)
    double col;
    double depth;  // distance from the camera centre
  };
  // Empty when the point is behind the camera.
  std::optional<Projection> project(Vec3 p) const;

 private:
  double azimuth_, elevation_, distance_, fov_;
  int height_, width_;
  Vec3 target_, position_, forward_, right_, up_;
  double tan_half_;
};

using Rig = std::array<Camera, 4>;

// Azimuths 0/90/180/270 at 20 degrees elevation; tile k sits at grid row k/2, column k%2.
// Throws Error("invalid-camera") for fov outside (10, 120), non-positive distance or size.
Rig make_rig(int height, int width, double distance, double fov = kDefaultFov);

enum class Shading { lambert_fixed_light, albedo_flat };

struct MarchConfig {
  int max_steps = 256;
  double hit_epsilon = 1e-4;
  double far_limit = 100.0;
  Shading shading = Shading::lambert_fixed_light;
};

struct ViewBundle {
  int tile_height = 0;
  int tile_width = 0;
  std::vector<Camera> rig;
  Image rgb;                          // 2H x 2W grid
  std::vector<DepthMap> part_depth;   // per part, rendered in isolation
  std::vector<Image> part_rgb;        // per part, rendered in isolation
  std::vector<Mask> part_masks;       // depth-argmin visibility masks
  Mask foreground;

  int part_count() const { return static_cast<int>(part_depth.size()); }
  int grid_height() const { return 2 * tile_height; }
  int grid_width() const { return 2 * tile_width; }
  // Pixels where part k exists in its isolated render.
  Mask part_silhouette(int k) const;
};

// Shade of a surface hit: albedo * (0.2 ambient + 0.8 max(0, n.l)) with the light fixed in the camera frame.
Rgb shade(Vec3 albedo, Vec3 normal, const Camera& cam, Shading shading);

ViewBundle render_views(const Asset& asset, const Rig& rig, const MarchConfig& cfg = {});

// Single-camera render of the whole asset (tile image + foreground).
struct CameraRender {
  Image rgb;
  Mask foreground;
};
CameraRender render_camera(const Asset& asset, const Camera& cam, const MarchConfig& cfg = {});

// Sphere-trace one part along a ray; returns +inf on a miss.
double trace_part(const Part& part, const Ray& ray, const MarchConfig& cfg, Vec3 bound_center, double bound_radius);

// M^k(i,j) = [k = argmin_l depth^l(i,j)] with a finite minimum; ties go to the lowest index.
std::vector<Mask> derive_masks(const std::vector<DepthMap>& depths);

inline constexpr double kPsnrCap = 99.0;
// PSNR over masked pixels with peak 1.0, capped at 99 dB. Throws Error("empty-foreground").
double foreground_psnr(const Image& reference, const Image& estimate, const Mask& mask);

}  // namespace partbench
