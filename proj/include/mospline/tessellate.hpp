#pragma once

#include <array>
#include <string>
#include <vector>

#include "mospline/curve.hpp"
#include "mospline/surface.hpp"

namespace mospline {

struct PolylineSample {
  double t = 0.0;
  Vec3 point = Vec3::Zero();
};

/// Parameters strictly increase; a closed polyline does not repeat its seam.
struct Polyline {
  int dimension = 2;
  bool closed = false;
  std::vector<PolylineSample> samples;
};

/// res_s x res_t vertex grid, row-major (vertex id = i * res_t + j).
struct QuadMesh {
  int res_s = 0;
  int res_t = 0;
  bool closed_s = false;
  bool closed_t = false;
  std::vector<double> s_params;
  std::vector<double> t_params;
  std::vector<Vec3> positions;
  /// Unit length, or zero where the surface normal is degenerate.
  std::vector<Vec3> normals;
  /// Zero-based vertex ids, counter-clockwise about dP/ds x dP/dt.
  std::vector<std::array<int, 4>> quads;
};

/// Samples the domain piecewise uniformly: the domain is cut at every node
/// inside it and each piece gets `samples_per_node_gap` steps.
Polyline tessellate_curve(const MovingCurve& curve, int samples_per_node_gap);

/// Samples the rectangular parameter box. Closed directions are sampled
/// without repeating the seam and their quads wrap around.
QuadMesh tessellate_surface(const MovingSurface& surface, int res_s, int res_t);

struct SvgOptions {
  std::string stroke = "#1f4e9c";
  std::string overlay_stroke = "#9a9a9a";
  std::string marker_fill = "#d62728";
  /// Stroke width as a fraction of the viewBox diagonal.
  double stroke_fraction = 0.004;
  /// Overlay the control polygon (closed when `overlay_closed`).
  std::vector<Vec3> control_polygon;
  bool overlay_closed = false;
  /// Marker positions, typically P(t_i) at the nodes.
  std::vector<Vec3> markers;
};

/// Overlay options: control polygon plus markers
/// on the curve at every node inside the domain.
SvgOptions svg_overlay_for(const MovingCurve& curve);

/**
 * SVG 1.1 document with one <path> for the polyline. y is flipped so the
 * drawing is upright; the viewBox is the bounding box of everything drawn
 * (in flipped coordinates) padded by 5% of its width and height per side.
 * Throws InvalidArgument on an empty polyline.
 */
std::string export_svg(const Polyline& polyline, const SvgOptions& options = {});

/// Wavefront OBJ with v / vn / f records, 1-based, row-major.
/// Throws InvalidArgument on an empty mesh.
std::string export_obj(const QuadMesh& mesh);

/// Fixed-precision number formatting shared by the exporters.
std::string format_g9(double x);

}  // namespace mospline
