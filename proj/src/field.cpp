#include "partbench/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bytes.hpp"
#include "field_march.hpp"
#include "partbench/error.hpp"

namespace partbench {

PartField::PartField(int res, Aabb box, double k)
    : resolution(res), bounds(box), kappa(k), sigma(voxel_count(), 0.0f), rgb(voxel_count() * 3, 0.0f) {}

Vec3 PartField::voxel_center(int x, int y, int z) const {
  auto vs = voxel_size();
  return bounds.lo + Vec3{(x + 0.5) * vs.x, (y + 0.5) * vs.y, (z + 0.5) * vs.z};
}

PartField::Sample PartField::sample(Vec3 p) const {
  const auto vs = voxel_size();
  const double u[3] = {(p.x - bounds.lo.x) / vs.x - 0.5, (p.y - bounds.lo.y) / vs.y - 0.5,
                       (p.z - bounds.lo.z) / vs.z - 0.5};
  int i0[3];
  double f[3];
  for (int a = 0; a < 3; ++a) {
    if (!(u[a] > -1.0 && u[a] < resolution)) return {0, {}};
    auto fl = std::floor(u[a]);
    i0[a] = static_cast<int>(fl);
    f[a] = u[a] - fl;
  }
  Sample s{0, {}};
  for (int corner = 0; corner < 8; ++corner) {
    int ix = i0[0] + (corner & 1), iy = i0[1] + ((corner >> 1) & 1), iz = i0[2] + ((corner >> 2) & 1);
    if (ix < 0 || iy < 0 || iz < 0 || ix >= resolution || iy >= resolution || iz >= resolution) continue;
    auto i = index(ix, iy, iz);
    if (sigma[i] == 0) continue;
    double w = ((corner & 1) ? f[0] : 1 - f[0]) * (((corner >> 1) & 1) ? f[1] : 1 - f[1]) *
               (((corner >> 2) & 1) ? f[2] : 1 - f[2]);
    double ws = w * sigma[i];
    s.sigma += ws;
    s.premultiplied += Vec3{rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]} * ws;
  }
  return s;
}

double PartField::total_sigma() const {
  double s = 0;
  for (auto v : sigma) s += v;
  return s;
}

bool PartField::support(Aabb& out) const {
  int lo[3] = {resolution, resolution, resolution}, hi[3] = {-1, -1, -1};
  for (int z = 0; z < resolution; ++z)
    for (int y = 0; y < resolution; ++y)
      for (int x = 0; x < resolution; ++x) {
        if (sigma[index(x, y, z)] <= 0) continue;
        const int v[3] = {x, y, z};
        for (int a = 0; a < 3; ++a) {
          lo[a] = std::min(lo[a], v[a]);
          hi[a] = std::max(hi[a], v[a]);
        }
      }
  if (hi[0] < 0) return false;
  auto vs = voxel_size();
  for (int a = 0; a < 3; ++a) {
    out.lo[a] = bounds.lo[a] + (lo[a] - 0.5) * vs[a] - 1e-9;
    out.hi[a] = bounds.lo[a] + (hi[a] + 1.5) * vs[a] + 1e-9;
  }
  return true;
}

CarveResult carve(const Image& part_views, const Mask& part_masks, const Rig& rig, int tile_height, int tile_width,
                  const Aabb& bounds, const CarveConfig& cfg) {
  if (cfg.resolution < 32 || cfg.resolution > 256 || !(cfg.kappa > 0))
    throw Error("invalid-carve-config", "resolution must lie in [32, 256] and kappa be positive");
  if (part_masks.height() != 2 * tile_height || part_masks.width() != 2 * tile_width ||
      part_views.height != 2 * tile_height || part_views.width != 2 * tile_width)
    throw Error("size-mismatch", "carve inputs do not match the tile size");
  CarveResult result{PartField(cfg.resolution, bounds, cfg.kappa), part_masks.empty()};
  if (result.empty) return result;
  auto& field = result.field;
  const int res = cfg.resolution;

  // Grid pixel index of a voxel centre in each view; -1 when it falls outside the tile.
  auto pixel_of = [&](int view, Vec3 p) -> long {
    auto proj = rig[view].project(p);
    if (!proj) return -1;
    auto r = static_cast<long>(std::floor(proj->row)), c = static_cast<long>(std::floor(proj->col));
    if (r < 0 || c < 0 || r >= tile_height || c >= tile_width) return -1;
    auto o = tile_origin(view, tile_height, tile_width);
    return (o.row + r) * static_cast<long>(2 * tile_width) + o.col + c;
  };

  std::vector<std::uint8_t> occupied(field.voxel_count(), 0);
  for (int z = 0; z < res; ++z)
    for (int y = 0; y < res; ++y)
      for (int x = 0; x < res; ++x) {
        auto p = field.voxel_center(x, y, z);
        bool inside = true;
        int seen = 0;
        for (int v = 0; v < 4 && inside; ++v) {
          auto px = pixel_of(v, p);
          if (px < 0) {
            if (cfg.rule == CarveRule::all_views) inside = false;
            continue;
          }
          ++seen;
          inside = part_masks.get(static_cast<std::size_t>(px));
        }
        if (inside && seen > 0) occupied[field.index(x, y, z)] = 1;
      }

  const std::size_t pixels = part_masks.size();
  std::vector<std::vector<float>> zbuf(4, std::vector<float>(pixels, std::numeric_limits<float>::infinity()));
  for (int z = 0; z < res; ++z)
    for (int y = 0; y < res; ++y)
      for (int x = 0; x < res; ++x) {
        if (!occupied[field.index(x, y, z)]) continue;
        auto p = field.voxel_center(x, y, z);
        for (int v = 0; v < 4; ++v) {
          auto px = pixel_of(v, p);
          if (px < 0) continue;
          auto d = static_cast<float>(length(p - rig[v].position()));
          auto& slot = zbuf[v][static_cast<std::size_t>(px)];
          slot = std::min(slot, d);
        }
      }

  const double tolerance = length(field.voxel_size());
  for (int z = 0; z < res; ++z)
    for (int y = 0; y < res; ++y)
      for (int x = 0; x < res; ++x) {
        auto i = field.index(x, y, z);
        if (!occupied[i]) continue;
        auto p = field.voxel_center(x, y, z);
        Vec3 front{}, any{};
        int n_front = 0, n_any = 0;
        for (int v = 0; v < 4; ++v) {
          auto px = pixel_of(v, p);
          if (px < 0) continue;
          auto r = static_cast<int>(px / (2 * tile_width)), c = static_cast<int>(px % (2 * tile_width));
          auto rgb = part_views.get(r, c);
          Vec3 col{rgb[0], rgb[1], rgb[2]};
          any += col;
          ++n_any;
          if (length(p - rig[v].position()) <= zbuf[v][static_cast<std::size_t>(px)] + tolerance) {
            front += col;
            ++n_front;
          }
        }
        auto col = n_front ? front / n_front : any / std::max(n_any, 1);
        field.sigma[i] = static_cast<float>(cfg.kappa);
        field.rgb[3 * i] = static_cast<float>(col.x);
        field.rgb[3 * i + 1] = static_cast<float>(col.y);
        field.rgb[3 * i + 2] = static_cast<float>(col.z);
      }
  return result;
}

namespace detail {

bool sample_span(const Ray& ray, const Aabb& box, double step, long& first, long& last) {
  double t0, t1;
  if (!intersect(ray, box, t0, t1) || t1 < 0) return false;
  t0 = std::max(t0, 0.0);
  first = static_cast<long>(std::ceil(t0 / step - 0.5));
  last = static_cast<long>(std::floor(t1 / step - 0.5));
  first = std::max(first, 0L);
  return first <= last;
}

}  // namespace detail

FieldRender render_field(const PartField& field, const Camera& cam, double step) {
  if (!(step > 0)) throw Error("invalid-step", "step must be positive");
  FieldRender out{Image(cam.height(), cam.width()), std::vector<float>(static_cast<std::size_t>(cam.height()) * cam.width(), 0)};
  Aabb support;
  if (!field.support(support)) return out;
  for (int r = 0; r < cam.height(); ++r)
    for (int c = 0; c < cam.width(); ++c) {
      auto ray = cam.ray(r, c);
      long first, last;
      if (!detail::sample_span(ray, support, step, first, last)) continue;
      double tau = 0, t_prev = 1;
      Vec3 color{};
      for (long j = first; j <= last; ++j) {
        auto s = field.sample(ray.at((static_cast<double>(j) + 0.5) * step));
        if (!(s.sigma > 0)) continue;
        tau += step * s.sigma;
        double t = std::exp(-tau);
        double weight = t_prev - t;
        Vec3 f = s.premultiplied / s.sigma;
        color += weight * f;
        t_prev = t;
      }
      out.rgb.set(r, c, {static_cast<float>(color.x), static_cast<float>(color.y), static_cast<float>(color.z)});
      out.alpha[static_cast<std::size_t>(r) * cam.width() + c] = static_cast<float>(1 - t_prev);
    }
  return out;
}

std::vector<double> ray_transmittance(const PartField& field, const Ray& ray, double step, double t_max) {
  if (!(step > 0)) throw Error("invalid-step", "step must be positive");
  std::vector<double> out;
  double tau = 0;
  for (long j = 0; (static_cast<double>(j) + 0.5) * step <= t_max; ++j) {
    tau += step * field.sample(ray.at((static_cast<double>(j) + 0.5) * step)).sigma;
    out.push_back(std::exp(-tau));
  }
  return out;
}

std::vector<std::uint8_t> serialize_field(const PartField& f) {
  detail::ByteWriter w;
  w.raw("PBPF", 4);
  w.u32(1);
  w.u32(static_cast<std::uint32_t>(f.resolution));
  w.f32(static_cast<float>(f.kappa));
  for (int a = 0; a < 3; ++a) w.f32(static_cast<float>(f.bounds.lo[a]));
  for (int a = 0; a < 3; ++a) w.f32(static_cast<float>(f.bounds.hi[a]));
  for (auto v : f.sigma) w.f32(v);
  for (int ch = 0; ch < 3; ++ch)
    for (std::size_t i = 0; i < f.voxel_count(); ++i) w.f32(f.rgb[3 * i + ch]);
  return w.take();
}

PartField parse_field(const std::vector<std::uint8_t>& bytes) {
  detail::ByteReader r(bytes);
  if (!r.magic("PBPF", 4)) throw Error("bad-format", "not a part field file");
  if (r.u32() != 1) throw Error("bad-format", "unsupported part field version");
  int res = static_cast<int>(r.u32());
  if (res <= 0 || res > 1024) throw Error("bad-format", "implausible field resolution");
  double kappa = r.f32();
  Aabb box;
  for (int a = 0; a < 3; ++a) box.lo[a] = r.f32();
  for (int a = 0; a < 3; ++a) box.hi[a] = r.f32();
  PartField f(res, box, kappa);
  if (r.remaining() != f.voxel_count() * 16) throw Error("bad-format", "part field payload size mismatch");
  for (auto& v : f.sigma) v = r.f32();
  for (int ch = 0; ch < 3; ++ch)
    for (std::size_t i = 0; i < f.voxel_count(); ++i) f.rgb[3 * i + ch] = r.f32();
  return f;
}

}  // namespace partbench
