#include "partbench/composer.hpp"

#include <cmath>

#include "field_march.hpp"
#include "partbench/error.hpp"

namespace partbench {

namespace {

// Density-weighted mix of already-sampled parts; returns the total density.
double mix(const std::vector<PartField::Sample>& samples, std::vector<double>& weights, Vec3& color) {
  double total = 0;
  for (const auto& s : samples) total += s.sigma;
  color = {};
  for (std::size_t h = 0; h < samples.size(); ++h) {
    const auto& s = samples[h];
    if (!(s.sigma > 0) || !(total > 0)) {
      weights[h] = 0;
      continue;
    }
    weights[h] = s.sigma / total;
    Vec3 f = s.premultiplied / s.sigma;
    color += weights[h] * f;
  }
  return total;
}

}  // namespace

MixedSample mix_at(const Assembly& assembly, Vec3 p) {
  std::vector<PartField::Sample> samples;
  for (const auto& f : assembly.fields) samples.push_back(f.sample(p));
  MixedSample out;
  out.weights.resize(samples.size());
  out.sigma = mix(samples, out.weights, out.color);
  return out;
}

std::vector<double> composite_transmittance(const Assembly& assembly, const Ray& ray, double step, double t_max) {
  if (!(step > 0)) throw Error("invalid-step", "step must be positive");
  std::vector<double> out;
  double tau = 0;
  for (long j = 0; (static_cast<double>(j) + 0.5) * step <= t_max; ++j) {
    auto x = ray.at((static_cast<double>(j) + 0.5) * step);
    for (const auto& f : assembly.fields) tau += step * f.sample(x).sigma;
    out.push_back(std::exp(-tau));
  }
  return out;
}

ComposeRender compose_render(const Assembly& assembly, const Camera& cam, double step) {
  if (!(step > 0)) throw Error("invalid-step", "step must be positive");
  const std::size_t n = assembly.fields.size();
  const std::size_t pixels = static_cast<std::size_t>(cam.height()) * cam.width();
  ComposeRender out{Image(cam.height(), cam.width()), std::vector<float>(pixels, 0),
                    std::vector<std::vector<float>>(n, std::vector<float>(pixels, 0))};

  std::vector<Aabb> supports(n);
  std::vector<bool> active(n, false);
  Aabb all;
  bool any = false;
  for (std::size_t h = 0; h < n; ++h) {
    active[h] = assembly.fields[h].support(supports[h]);
    if (!active[h]) continue;
    if (!any)
      all = supports[h];
    else
      all.expand(supports[h]);
    any = true;
  }
  if (!any) return out;

  std::vector<long> first(n), last(n);
  std::vector<bool> hit(n);
  std::vector<PartField::Sample> samples(n);
  std::vector<double> weights(n), visibility(n);
  for (int r = 0; r < cam.height(); ++r)
    for (int c = 0; c < cam.width(); ++c) {
      auto ray = cam.ray(r, c);
      long j0, j1;
      if (!detail::sample_span(ray, all, step, j0, j1)) continue;
      for (std::size_t h = 0; h < n; ++h)
        hit[h] = active[h] && detail::sample_span(ray, supports[h], step, first[h], last[h]);
      std::fill(visibility.begin(), visibility.end(), 0.0);
      double tau = 0, t_prev = 1;
      Vec3 color{};
      for (long j = j0; j <= j1; ++j) {
        auto x = ray.at((static_cast<double>(j) + 0.5) * step);
        for (std::size_t h = 0; h < n; ++h)
          samples[h] = (hit[h] && j >= first[h] && j <= last[h]) ? assembly.fields[h].sample(x) : PartField::Sample{0, {}};
        Vec3 mixed;
        double total = mix(samples, weights, mixed);
        if (!(total > 0)) continue;
        tau += step * total;
        double t = std::exp(-tau);
        double weight = t_prev - t;
        color += weight * mixed;
        for (std::size_t h = 0; h < n; ++h) visibility[h] += weight * weights[h];
        t_prev = t;
      }
      auto i = static_cast<std::size_t>(r) * cam.width() + c;
      out.rgb.set(r, c, {static_cast<float>(color.x), static_cast<float>(color.y), static_cast<float>(color.z)});
      out.alpha[i] = static_cast<float>(1 - t_prev);
      for (std::size_t h = 0; h < n; ++h) out.part_visibility[h][i] = static_cast<float>(visibility[h]);
    }
  return out;
}

PartField merge_fields(const Assembly& assembly) {
  if (assembly.fields.empty()) throw Error("invalid-argument", "cannot merge an empty assembly");
  const auto& first = assembly.fields.front();
  bool shared = true;
  for (const auto& f : assembly.fields)
    shared = shared && f.resolution == first.resolution && f.bounds.lo == first.bounds.lo && f.bounds.hi == first.bounds.hi;

  if (shared) {
    PartField out(first.resolution, first.bounds, first.kappa);
    for (std::size_t i = 0; i < out.voxel_count(); ++i) {
      double sigma = 0;
      Vec3 premultiplied{};
      for (const auto& f : assembly.fields) {
        sigma += f.sigma[i];
        premultiplied += Vec3{f.rgb[3 * i], f.rgb[3 * i + 1], f.rgb[3 * i + 2]} * static_cast<double>(f.sigma[i]);
      }
      out.sigma[i] = static_cast<float>(sigma);
      if (sigma > 0)
        for (int ch = 0; ch < 3; ++ch) out.rgb[3 * i + ch] = static_cast<float>(premultiplied[ch] / sigma);
    }
    return out;
  }

  Aabb box = first.bounds;
  int res = 0;
  for (const auto& f : assembly.fields) {
    box.expand(f.bounds);
    res = std::max(res, f.resolution);
  }
  PartField out(res, box, first.kappa);
  for (int z = 0; z < res; ++z)
    for (int y = 0; y < res; ++y)
      for (int x = 0; x < res; ++x) {
        auto p = out.voxel_center(x, y, z);
        auto i = out.index(x, y, z);
        double sigma = 0;
        Vec3 premultiplied{};
        for (const auto& f : assembly.fields) {
          auto s = f.sample(p);
          sigma += s.sigma;
          premultiplied += s.premultiplied;
        }
        out.sigma[i] = static_cast<float>(sigma);
        if (sigma > 0)
          for (int ch = 0; ch < 3; ++ch) out.rgb[3 * i + ch] = static_cast<float>(premultiplied[ch] / sigma);
      }
  return out;
}

}  // namespace partbench
