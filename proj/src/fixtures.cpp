#include <cmath>
#include <numbers>

#include "mospline/model_io.hpp"

// Built-in models. Node vectors, orders and weights are the ones from the
// classic worked examples; where those examples never state coordinates the
// geometry is a fixed construction (regular star, rounded T, torus, pentagon
// to circle blend) so that every run produces identical models.

namespace mospline {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr const char* kEpoch = "1970-01-01T00:00:00Z";

double param(const FixtureParams& p, const char* key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

void check_keys(const FixtureParams& p, std::initializer_list<const char*> allowed, std::string_view name) {
  for (const auto& [k, v] : p) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw InvalidArgument("unknown-parameter", "fixture " + std::string(name) + " has no parameter '" + k + "'");
  }
}

ModelDocument wrap(std::string id, std::string name, CurveDesc c) {
  ModelDocument d;
  d.id = std::move(id);
  d.metadata = {std::move(name), kEpoch, kEpoch};
  d.payload = std::move(c);
  return d;
}

ModelDocument wrap(std::string id, std::string name, SurfaceDesc s) {
  ModelDocument d;
  d.id = std::move(id);
  d.metadata = {std::move(name), kEpoch, kEpoch};
  d.payload = std::move(s);
  return d;
}

std::vector<double> arithmetic(int count, double gap) {
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i) t[i] = i * gap;
  return t;
}

// Pentagram: five unit-circle vertices visited with stride two.
CurveDesc star5(int order, double gap) {
  CurveDesc c;
  c.order = order;
  c.closed = true;
  for (int i = 0; i < 5; ++i) {
    const double a = kPi / 2 + 2 * kPi * (2 * i) / 5;
    c.points.emplace_back(std::cos(a), std::sin(a), 0.0);
  }
  c.nodes = arithmetic(6, gap);
  return c;
}

CurveDesc hexagon() {
  CurveDesc c;
  c.order = 4;
  c.closed = true;
  c.points = {{-0.9, 0, 0}, {-0.5, -0.9, 0}, {0.5, -0.9, 0}, {0.9, 0, 0}, {0.5, 0.9, 0}, {-0.5, 0.9, 0}};
  c.nodes = {0, 1, 3.2, 4.2, 5.3, 8.2, 9.2};
  return c;
}

// Open bottle outline: up the right side, over the neck, down the left.
CurveDesc bottle() {
  CurveDesc c;
  c.order = 4;
  c.points = {{1.0, 0, 0},     {1.0, 2.0, 0},    {0.35, 3.0, 0}, {0.35, 4.2, 0},
              {-0.35, 4.2, 0}, {-0.35, 3.0, 0},  {-1.0, 2.0, 0}, {-1.0, 0, 0}};
  c.nodes = {0, 1.3, 2.7, 4.0, 5.8, 7.1, 8.5, 9.8};
  return c;
}

// 20-vertex star: radii alternate between 1 and 0.55.
CurveDesc polygon20(double a, int order) {
  CurveDesc c;
  c.order = order;
  c.closed = true;
  for (int i = 0; i < 20; ++i) {
    const double r = (i % 2 == 0) ? 1.0 : 0.55;
    const double ang = 2 * kPi * i / 20;
    c.points.emplace_back(r * std::cos(ang), r * std::sin(ang), 0.0);
  }
  c.nodes = arithmetic(21, a);
  return c;
}

// T silhouette, counter-clockwise from the bottom right corner of the stem.
CurveDesc tshape() {
  CurveDesc c;
  c.order = 4;
  c.closed = true;
  c.points = {{0.5, 0, 0},   {0.5, 1.5, 0},   {0.5, 3, 0},    {1.25, 3, 0},  {2, 3, 0},
              {2, 3.5, 0},   {2, 4, 0},       {1, 4, 0},      {0, 4, 0},     {-1, 4, 0},
              {-2, 4, 0},    {-2, 3.5, 0},    {-2, 3, 0},     {-1.25, 3, 0}, {-0.5, 3, 0},
              {-0.5, 2, 0},  {-0.5, 1.3, 0},  {-0.5, 0.6, 0}, {-0.5, 0, 0},  {0, 0, 0}};
  c.nodes = {0, 3, 4, 5, 7, 9, 10, 11, 14, 16, 18, 20, 23, 24, 25, 27, 29, 30, 32, 34, 36};
  return c;
}

// Torus net: 8 points around the tube (s), 20 around the axis (t), stored
// with the duplicated closing row and column.
SurfaceDesc ring(double s_gap, double t_gap) {
  constexpr int m = 8, n = 20;
  constexpr double major = 3.0, minor = 1.0;
  SurfaceDesc sd;
  sd.orders = {4, 4};
  sd.closed_s = sd.closed_t = true;
  sd.set_separable_nodes(arithmetic(m + 1, s_gap), arithmetic(n + 1, t_gap));
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= n; ++j) {
      const double th = 2 * kPi * (i % m) / m;
      const double ph = 2 * kPi * (j % n) / n;
      const double r = major + minor * std::cos(th);
      sd.points.emplace_back(r * std::cos(ph), r * std::sin(ph), minor * std::sin(th));
    }
  }
  return sd;
}

// Tunnel: 8 cross sections along s blending a unit circle (i = 0) into a
// regular pentagon (i = 7), 25 points each plus the closing column. The
// t nodes squeeze towards the pentagon corners as d_i = (i/7)^2 grows.
SurfaceDesc tunnel() {
  constexpr int m = 7, n = 25;
  constexpr double depth = 0.6;
  SurfaceDesc sd;
  sd.orders = {4, 4};
  sd.closed_t = true;
  sd.rows = m + 1;
  sd.cols = n + 1;

  auto corner = [](int c) {
    const double a = kPi / 2 + 2 * kPi * (c % 5) / 5;
    return Vec3(std::cos(a), std::sin(a), 0.0);
  };
  for (int i = 0; i <= m; ++i) {
    const double alpha = static_cast<double>(i) / m;
    const double d = alpha * alpha;
    for (int j = 0; j <= n; ++j) {
      const int jj = j % n;
      const double ph = kPi / 2 + 2 * kPi * jj / n;
      const Vec3 circle(std::cos(ph), std::sin(ph), 0.0);
      const int c = jj / 5;
      const double f = (jj % 5) / 5.0;
      const Vec3 pent = corner(c) + f * (corner(c + 1) - corner(c));
      Vec3 p = (1.0 - alpha) * circle + alpha * pent;
      p.z() = i * depth;
      sd.points.push_back(p);

      sd.s_nodes.push_back(i);
      double t = j;
      switch (j % 5) {
        case 1: t = j + d; break;
        case 2: t = j + d / 3; break;
        case 3: t = j - d / 3; break;
        case 4: t = j - d; break;
        default: break;
      }
      sd.t_nodes.push_back(t);
    }
  }
  return sd;
}

std::string fmt_param(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

std::vector<std::string> fixture_names() {
  return {"star5_linear", "star5_cubic", "hexagon", "weighted_hexagon_03", "weighted_hexagon_3",
          "bottle",       "polygon20",   "tshape",  "ring",                "tunnel"};
}

ModelDocument make_fixture(std::string_view name, const FixtureParams& p) {
  if (name == "star5_linear") {
    check_keys(p, {}, name);
    return wrap("star5_linear", "Pentagram, linear moving B-spline, node gap 0.8", star5(2, 0.8));
  }
  if (name == "star5_cubic") {
    check_keys(p, {}, name);
    return wrap("star5_cubic", "Pentagram, cubic moving B-spline, node gap 1.4", star5(4, 1.4));
  }
  if (name == "hexagon") {
    check_keys(p, {}, name);
    return wrap("hexagon", "Hexagon with sharp and rounded corners", hexagon());
  }
  if (name == "weighted_hexagon_03" || name == "weighted_hexagon_3") {
    check_keys(p, {}, name);
    CurveDesc c = hexagon();
    const double w3 = name == "weighted_hexagon_3" ? 3.0 : 0.3;
    c.weights.assign(c.points.size(), 1.0);
    c.weights[3] = w3;
    return wrap(std::string(name), "Hexagon with weight " + fmt_param(w3) + " on P_3", std::move(c));
  }
  if (name == "bottle") {
    check_keys(p, {}, name);
    return wrap("bottle", "Open bottle outline", bottle());
  }
  if (name == "polygon20") {
    check_keys(p, {"a", "k"}, name);
    const double a = param(p, "a", 2.0);
    const int k = static_cast<int>(param(p, "k", 4));
    return wrap("polygon20", "20-gon star, uniform node interval " + fmt_param(a) + ", order " + std::to_string(k),
                polygon20(a, k));
  }
  if (name == "tshape") {
    check_keys(p, {}, name);
    return wrap("tshape", "T silhouette with non-uniform nodes", tshape());
  }
  if (name == "ring") {
    check_keys(p, {"s_gap", "t_gap"}, name);
    const double sg = param(p, "s_gap", 1.0), tg = param(p, "t_gap", 1.8);
    return wrap("ring", "Torus net, node gaps " + fmt_param(sg) + " x " + fmt_param(tg), ring(sg, tg));
  }
  if (name == "tunnel") {
    check_keys(p, {}, name);
    return wrap("tunnel", "Tunnel from a circle to a pentagon", tunnel());
  }
  throw InvalidArgument("unknown-fixture", "unknown fixture '" + std::string(name) + "'");
}

ModelDocument make_fixture_spec(std::string_view spec) {
  const auto q = spec.find('?');
  FixtureParams params;
  if (q != std::string_view::npos) {
    std::string_view rest = spec.substr(q + 1);
    while (!rest.empty()) {
      const auto amp = rest.find('&');
      const std::string_view kv = rest.substr(0, amp);
      const auto eq = kv.find('=');
      if (eq == std::string_view::npos) {
        throw InvalidArgument("fixture parameter must be key=value: " + std::string(kv));
      }
      const std::string key(kv.substr(0, eq));
      const std::string val(kv.substr(eq + 1));
      size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(val, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != val.size() || val.empty()) throw InvalidArgument("fixture parameter is not a number: " + std::string(kv));
      params[key] = x;
      if (amp == std::string_view::npos) break;
      rest = rest.substr(amp + 1);
    }
  }
  return make_fixture(spec.substr(0, q), params);
}

}  // namespace mospline
