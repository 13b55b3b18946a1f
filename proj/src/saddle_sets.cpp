#include <cmath>

#include "saddlescope/certify.hpp"
#include "saddlescope/errors.hpp"

namespace saddlescope {

namespace {
constexpr double kTau = 6.283185307179586476925;

Vec normalized_or(const Vec& v, const Vec& fallback) {
  double n = norm2(v);
  if (n < 1e-12) return fallback;
  Vec u = v;
  for (double& x : u) x /= n;
  return u;
}
}  // namespace

SaddleSetDescriptor line_set(const std::string& name, const Vec& direction, double param_range) {
  SaddleSetDescriptor s;
  s.name = name;
  s.ambient_dim = static_cast<int>(direction.size());
  s.param_dim = 1;
  s.param_box = {{-param_range, param_range}};
  Vec u = direction;
  double n = norm2(u);
  for (double& x : u) x /= n;
  s.embed = [u](const Vec& theta) {
    Vec p(u.size());
    for (size_t i = 0; i < u.size(); ++i) p[i] = theta[0] * u[i];
    return p;
  };
  s.project = [u](const Vec& p) {
    double c = dot(p, u);
    Vec y(u.size());
    for (size_t i = 0; i < u.size(); ++i) y[i] = c * u[i];
    return std::vector<Vec>{y};
  };
  s.distance = [u](const Vec& p) {
    double c = dot(p, u);
    double acc = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
      double d = p[i] - c * u[i];
      acc += d * d;
    }
    return std::sqrt(acc);
  };
  s.normal_spec_dim = s.ambient_dim;
  s.normal_at = [u](const Vec&, const Vec& spec) {
    Vec w = spec;
    double c = dot(w, u);
    for (size_t i = 0; i < u.size(); ++i) w[i] -= c * u[i];
    // Deterministic fallback when the spec is (anti)parallel to the line.
    Vec fb(u.size(), 0.0);
    size_t k = 0;
    for (size_t i = 1; i < u.size(); ++i)
      if (std::fabs(u[i]) < std::fabs(u[k])) k = i;
    fb[k] = 1.0;
    double c2 = dot(fb, u);
    for (size_t i = 0; i < u.size(); ++i) fb[i] -= c2 * u[i];
    double n2 = norm2(fb);
    for (double& x : fb) x /= n2;
    return normalized_or(w, fb);
  };
  return s;
}

SaddleSetDescriptor point_set(const std::string& name, const Vec& point) {
  SaddleSetDescriptor s;
  s.name = name;
  s.ambient_dim = static_cast<int>(point.size());
  s.param_dim = 0;
  s.embed = [point](const Vec&) { return point; };
  s.project = [point](const Vec&) { return std::vector<Vec>{point}; };
  s.distance = [point](const Vec& p) {
    double acc = 0.0;
    for (size_t i = 0; i < point.size(); ++i) acc += (p[i] - point[i]) * (p[i] - point[i]);
    return std::sqrt(acc);
  };
  s.normal_spec_dim = s.ambient_dim;
  s.normal_at = [](const Vec&, const Vec& spec) {
    Vec fb(spec.size(), 0.0);
    fb[0] = 1.0;
    return normalized_or(spec, fb);
  };
  return s;
}

SaddleSetDescriptor circle_set(const std::string& name, double radius, const Vec& fixed_tail) {
  SaddleSetDescriptor s;
  s.name = name;
  s.ambient_dim = 2 + static_cast<int>(fixed_tail.size());
  s.param_dim = 1;
  s.param_box = {{0.0, kTau}};
  const Vec tail = fixed_tail;
  s.embed = [radius, tail](const Vec& theta) {
    Vec p{radius * std::cos(theta[0]), radius * std::sin(theta[0])};
    p.insert(p.end(), tail.begin(), tail.end());
    return p;
  };
  s.project = [radius, tail](const Vec& p) {
    double rho = std::hypot(p[0], p[1]);
    std::vector<Vec> out;
    if (rho > 1e-12) {
      Vec y{radius * p[0] / rho, radius * p[1] / rho};
      y.insert(y.end(), tail.begin(), tail.end());
      out.push_back(y);
    } else {
      // The axis point is equidistant from the whole circle; return a ring
      // of representatives (the projection is genuinely set-valued here).
      for (int k = 0; k < 16; ++k) {
        double th = kTau * k / 16.0;
        Vec y{radius * std::cos(th), radius * std::sin(th)};
        y.insert(y.end(), tail.begin(), tail.end());
        out.push_back(y);
      }
    }
    return out;
  };
  s.distance = [radius, tail](const Vec& p) {
    double rho = std::hypot(p[0], p[1]);
    double acc = (rho - radius) * (rho - radius);
    for (size_t i = 0; i < tail.size(); ++i) acc += (p[2 + i] - tail[i]) * (p[2 + i] - tail[i]);
    return std::sqrt(acc);
  };
  s.normal_spec_dim = 1 + static_cast<int>(fixed_tail.size());
  s.normal_at = [radius, tail](const Vec& y, const Vec& spec) {
    // Normal space at a circle point: the radial direction plus every pinned
    // tail coordinate.
    Vec eta(2 + tail.size(), 0.0);
    eta[0] = spec[0] * y[0] / radius;
    eta[1] = spec[0] * y[1] / radius;
    for (size_t i = 0; i < tail.size(); ++i) eta[2 + i] = spec[1 + i];
    Vec fb(eta.size(), 0.0);
    fb[0] = y[0] / radius;
    fb[1] = y[1] / radius;
    return normalized_or(eta, fb);
  };
  return s;
}

SaddleSetDescriptor halfline_set(const std::string& name, double param_range) {
  SaddleSetDescriptor s;
  s.name = name;
  s.ambient_dim = 2;
  s.param_dim = 1;
  s.param_box = {{-param_range, 0.0}};
  s.embed = [](const Vec& theta) { return Vec{theta[0], 0.0}; };
  s.project = [](const Vec& p) { return std::vector<Vec>{{std::min(p[0], 0.0), 0.0}}; };
  s.distance = [](const Vec& p) {
    return p[0] <= 0.0 ? std::fabs(p[1]) : std::hypot(p[0], p[1]);
  };
  s.normal_spec_dim = 2;
  s.normal_at = [](const Vec& y, const Vec& spec) {
    if (y[0] < -1e-12) {
      // Interior of the half line: normals are vertical.
      return Vec{0.0, spec[1] >= 0.0 ? 1.0 : -1.0};
    }
    // Endpoint: the proximal normal cone is the right half plane.
    Vec eta{std::max(spec[0], 0.0), spec[1]};
    return normalized_or(eta, Vec{1.0, 0.0});
  };
  return s;
}

}  // namespace saddlescope
