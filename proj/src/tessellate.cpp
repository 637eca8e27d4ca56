#include "mospline/tessellate.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace mospline {

std::string format_g9(double x) {
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

Polyline tessellate_curve(const MovingCurve& c, int per_gap) {
  if (per_gap < 2) throw InvalidArgument("samples per node gap must be >= 2");
  const Interval dom = c.domain();
  const auto& nodes = c.desc().nodes;

  std::vector<double> cuts{dom.lo};
  for (double t : nodes) {
    if (t > dom.lo && t < dom.hi) cuts.push_back(t);
  }
  cuts.push_back(dom.hi);

  Polyline pl;
  pl.dimension = c.dimension();
  pl.closed = c.closed();
  for (size_t g = 0; g + 1 < cuts.size(); ++g) {
    const double a = cuts[g], b = cuts[g + 1];
    for (int q = 0; q < per_gap; ++q) {
      const double t = a + (b - a) * q / per_gap;
      pl.samples.push_back({t, c.eval(t)});
    }
  }
  if (!pl.closed) pl.samples.push_back({dom.hi, c.eval(dom.hi)});
  return pl;
}

QuadMesh tessellate_surface(const MovingSurface& sf, int res_s, int res_t) {
  if (res_s < 2 || res_t < 2) throw InvalidArgument("surface resolution must be at least 2 x 2");
  const auto& dom = sf.domain();
  if (!dom.box) {
    throw InvalidArgument("tessellation needs a rectangular parameter domain (closed or separable nodes per direction)");
  }
  QuadMesh mesh;
  mesh.res_s = res_s;
  mesh.res_t = res_t;
  mesh.closed_s = dom.periodic_s;
  mesh.closed_t = dom.periodic_t;

  auto params = [](const Interval& iv, int res, bool periodic) {
    std::vector<double> out(res);
    for (int q = 0; q < res; ++q) {
      out[q] = periodic ? iv.lo + iv.length() * q / res : iv.lo + iv.length() * q / (res - 1);
    }
    if (!periodic) out.back() = iv.hi;
    return out;
  };
  mesh.s_params = params((*dom.box)[0], res_s, mesh.closed_s);
  mesh.t_params = params((*dom.box)[1], res_t, mesh.closed_t);

  mesh.positions.reserve(static_cast<size_t>(res_s) * res_t);
  mesh.normals.reserve(mesh.positions.capacity());
  for (double s : mesh.s_params) {
    for (double t : mesh.t_params) {
      mesh.positions.push_back(sf.eval(s, t));
      try {
        mesh.normals.push_back(sf.normal(s, t));
      } catch (const DegenerateNormal&) {
        mesh.normals.push_back(Vec3::Zero());
      }
    }
  }

  const int quads_s = mesh.closed_s ? res_s : res_s - 1;
  const int quads_t = mesh.closed_t ? res_t : res_t - 1;
  for (int i = 0; i < quads_s; ++i) {
    const int i1 = (i + 1) % res_s;
    for (int j = 0; j < quads_t; ++j) {
      const int j1 = (j + 1) % res_t;
      mesh.quads.push_back({i * res_t + j, i1 * res_t + j, i1 * res_t + j1, i * res_t + j1});
    }
  }
  return mesh;
}

SvgOptions svg_overlay_for(const MovingCurve& c) {
  SvgOptions opt;
  opt.control_polygon = c.desc().points;
  opt.overlay_closed = c.closed();
  const Interval dom = c.domain();
  for (double t : c.desc().nodes) {
    if (t >= dom.lo && t <= dom.hi) opt.markers.push_back(c.eval(t));
  }
  return opt;
}

std::string export_svg(const Polyline& pl, const SvgOptions& opt) {
  if (pl.samples.empty()) throw InvalidArgument("cannot export an empty polyline");

  auto flip = [](const Vec3& p) { return Vec3(p.x(), -p.y(), 0.0); };
  std::vector<Vec3> drawn;
  for (const auto& s : pl.samples) drawn.push_back(flip(s.point));
  for (const auto& p : opt.control_polygon) drawn.push_back(flip(p));
  for (const auto& p : opt.markers) drawn.push_back(flip(p));
  const BoundingBox box = bounding_box(drawn);

  double w = box.max.x() - box.min.x();
  double h = box.max.y() - box.min.y();
  const double extent = std::max({w, h, 1e-9});
  const double pad_x = 0.05 * (w > 0.0 ? w : extent);
  const double pad_y = 0.05 * (h > 0.0 ? h : extent);
  const double vx = box.min.x() - pad_x, vy = box.min.y() - pad_y;
  const double vw = w + 2 * pad_x, vh = h + 2 * pad_y;
  const double stroke = opt.stroke_fraction * std::hypot(vw, vh);

  auto xy = [&](const Vec3& p) {
    const Vec3 q = flip(p);
    return format_g9(q.x()) + " " + format_g9(q.y());
  };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"" << format_g9(vx) << ' '
     << format_g9(vy) << ' ' << format_g9(vw) << ' ' << format_g9(vh) << "\">\n";

  if (!opt.control_polygon.empty()) {
    os << "  <" << (opt.overlay_closed ? "polygon" : "polyline") << " fill=\"none\" stroke=\""
       << opt.overlay_stroke << "\" stroke-width=\"" << format_g9(0.5 * stroke) << "\" points=\"";
    for (size_t i = 0; i < opt.control_polygon.size(); ++i) {
      const Vec3 q = flip(opt.control_polygon[i]);
      os << (i ? " " : "") << format_g9(q.x()) << ',' << format_g9(q.y());
    }
    os << "\"/>\n";
  }

  os << "  <path fill=\"none\" stroke=\"" << opt.stroke << "\" stroke-width=\"" << format_g9(stroke)
     << "\" d=\"M " << xy(pl.samples.front().point);
  if (pl.samples.size() > 1) {
    os << " L";
    for (size_t i = 1; i < pl.samples.size(); ++i) os << ' ' << xy(pl.samples[i].point);
  }
  if (pl.closed) os << " Z";
  os << "\"/>\n";

  for (const auto& p : opt.markers) {
    const Vec3 q = flip(p);
    os << "  <circle cx=\"" << format_g9(q.x()) << "\" cy=\"" << format_g9(q.y()) << "\" r=\""
       << format_g9(1.5 * stroke) << "\" fill=\"" << opt.marker_fill << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string export_obj(const QuadMesh& mesh) {
  if (mesh.positions.empty() || mesh.quads.empty()) throw InvalidArgument("cannot export an empty mesh");
  std::ostringstream os;
  os << "# mospline quad mesh " << mesh.res_s << " x " << mesh.res_t << "\n";
  for (const auto& p : mesh.positions) {
    os << "v " << format_g9(p.x()) << ' ' << format_g9(p.y()) << ' ' << format_g9(p.z()) << '\n';
  }
  for (const auto& n : mesh.normals) {
    os << "vn " << format_g9(n.x()) << ' ' << format_g9(n.y()) << ' ' << format_g9(n.z()) << '\n';
  }
  for (const auto& q : mesh.quads) {
    os << 'f';
    for (int v : q) os << ' ' << v + 1 << "//" << v + 1;
    os << '\n';
  }
  return os.str();
}

}  // namespace mospline
