#pragma once

#include <array>
#include <optional>
#include <vector>

#include "mospline/basis.hpp"
#include "mospline/error.hpp"
#include "mospline/geometry.hpp"

namespace mospline {

/**
 * Plain description of a moving tensor-product surface.
 *
 * The control net has `rows` x `cols` points stored row-major; row index i
 * runs along s, column index j along t. Every point owns its node pair
 * (s_ij, t_ij). A surface closed in s stores the duplicated last row
 * (P_{0j} == P_{mj}); closed in t stores the duplicated last column.
 */
struct SurfaceDesc {
  std::array<int, 2> orders{4, 4};
  bool closed_s = false;
  bool closed_t = false;
  bool allow_discontinuity = false;
  int rows = 0;
  int cols = 0;
  std::vector<Vec3> points;
  std::vector<double> s_nodes;
  std::vector<double> t_nodes;
  /// Empty means all weights are 1.
  std::vector<double> weights;

  size_t at(int i, int j) const { return static_cast<size_t>(i) * cols + j; }

  /// Fill per-point nodes from s_ij = s[i], t_ij = t[j].
  void set_separable_nodes(const std::vector<double>& s, const std::vector<double>& t);

  bool operator==(const SurfaceDesc&) const = default;
};

Diagnostics validate_surface(const SurfaceDesc& desc);

/// An axis-aligned node rectangle D_ij = [s_ij -+ k1/2] x [t_ij -+ k2/2].
struct NodeRect {
  int i = 0;
  int j = 0;
  Interval s;
  Interval t;
};

/**
 * Parameter domain: the union of the node rectangles. When each direction
 * is either closed or has separable nodes, the domain is also described by
 * a single box, and only that box is accepted by evaluation.
 */
struct SurfaceDomain {
  std::vector<NodeRect> rectangles;
  std::optional<std::array<Interval, 2>> box;
  bool periodic_s = false;
  bool periodic_t = false;
  double period_s = 0.0;
  double period_t = 0.0;

  /// Membership after periodic reduction: inside the box when there is one,
  /// otherwise strictly inside some rectangle.
  bool contains(double s, double t) const;
};

/**
 * Moving B-spline surface
 *
 *   P(s,t) = sum w_ij P_ij N_k1(s - s_ij) N_k2(t - t_ij) / sum w_ij N_k1(s - s_ij) N_k2(t - t_ij)
 *
 * The ghost row / column of a closed direction is excluded from the sums
 * and offsets along closed directions wrap with the period.
 */
class MovingSurface {
 public:
  /// Throws ValidationError on invalid input.
  explicit MovingSurface(SurfaceDesc desc);

  const SurfaceDesc& desc() const noexcept { return desc_; }
  int rows() const noexcept { return desc_.rows; }
  int cols() const noexcept { return desc_.cols; }
  const Vec3& point(int i, int j) const { return desc_.points[desc_.at(i, j)]; }
  const SurfaceDomain& domain() const noexcept { return domain_; }

  Vec3 eval(double s, double t) const;

  /// Partial derivative d^(r1+r2) P / ds^r1 dt^r2 with r1 + r2 in {1, 2}.
  Vec3 partial(double s, double t, int r1, int r2) const;

  /// Unit normal dP/ds x dP/dt. Throws DegenerateNormal when the partials
  /// vanish or are parallel.
  Vec3 normal(double s, double t) const;

  /// Normalized blend weights at (s, t) keyed by (i, j); they sum to 1.
  struct BlendValue {
    int i;
    int j;
    double value;
  };
  std::vector<BlendValue> basis_values(double s, double t) const;

  BoundingBox control_bbox() const;

 private:
  struct Term {
    int i;
    int j;
    double ds;
    double dt;
  };
  std::pair<double, double> reduce(double s, double t) const;
  std::vector<Term> active_terms(double s, double t) const;

  SurfaceDesc desc_;
  UniformBSpline kernel_s_;
  UniformBSpline kernel_t_;
  SurfaceDomain domain_;
};

SurfaceDomain surface_domain(const MovingSurface& sf);

}  // namespace mospline
