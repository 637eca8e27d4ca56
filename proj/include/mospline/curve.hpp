#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mospline/basis.hpp"
#include "mospline/error.hpp"
#include "mospline/geometry.hpp"

namespace mospline {

/**
 * Plain description of a moving B-spline curve, before validation.
 *
 * Open curves carry n+1 points and n+1 nodes. Closed curves carry n distinct
 * points and n+1 nodes; the last node t_n fixes the period T = t_n - t_0 and
 * P_n = P_0 is implied. 2D curves keep z = 0.
 */
struct CurveDesc {
  int dimension = 2;
  int order = 4;
  bool closed = false;
  /// Accept node gaps >= order (the curve then has undefined pockets).
  bool allow_discontinuity = false;
  std::vector<Vec3> points;
  std::vector<double> nodes;
  /// Empty means all weights are 1.
  std::vector<double> weights;

  bool operator==(const CurveDesc&) const = default;
};

/// Structured findings; empty when every invariant holds.
Diagnostics validate_curve(const CurveDesc& desc);

/// A normalized basis value R_i(t) (or its weighted variant) at one index.
struct BasisValue {
  int index = 0;
  double value = 0.0;
};

/**
 * Moving B-spline curve
 *
 *   P(t) = sum_i w_i P_i N_k(t - t_i) / sum_i w_i N_k(t - t_i)
 *
 * Immutable once built; every query is const and thread-safe.
 */
class MovingCurve {
 public:
  /// Throws ValidationError when validate_curve reports an error.
  explicit MovingCurve(CurveDesc desc);

  const CurveDesc& desc() const noexcept { return desc_; }
  int order() const noexcept { return desc_.order; }
  int dimension() const noexcept { return desc_.dimension; }
  bool closed() const noexcept { return desc_.closed; }
  int num_points() const noexcept { return static_cast<int>(desc_.points.size()); }
  const Vec3& point(int i) const { return desc_.points[i]; }
  double weight(int i) const { return desc_.weights[i]; }

  /// Node with index extension: closed curves repeat with period T, open
  /// curves return -inf / +inf outside [0, n].
  double node(int i) const;

  /// Period T; 0 for open curves.
  double period() const noexcept { return period_; }

  /// Open: [t_1 - k/2, t_{n-1} + k/2]. Closed: [t_0, t_n].
  Interval domain() const noexcept { return domain_; }

  /// Throws OutOfDomain or UndefinedPoint.
  Vec3 eval(double t) const;

  /// Nonzero normalized basis values at t, ordered by index; they sum to 1.
  std::vector<BasisValue> basis_values(double t) const;

  /// r-th derivative, r in {1, 2}, by the quotient rule.
  Vec3 derivative(double t, int r) const;

  BoundingBox control_bbox() const;

 private:
  struct Term {
    int index;
    double offset;
  };
  double reduce(double t) const;
  std::vector<Term> active_terms(double t) const;

  CurveDesc desc_;
  UniformBSpline kernel_;
  double period_ = 0.0;
  Interval domain_;
};

enum class VertexClass { Sharp, Rounded };
enum class EdgeClass { FullStraight, PartialStraight, None };

struct VertexFeature {
  int index = 0;
  VertexClass kind = VertexClass::Rounded;
  /// Parameter interval on which P(t) == P_i; set only for Sharp vertices.
  std::optional<Interval> constancy;
};

struct EdgeFeature {
  int from = 0;
  int to = 0;
  EdgeClass kind = EdgeClass::None;
  /// Interval on which only R_from and R_to are active; unset for None.
  std::optional<Interval> straight;
};

struct FeatureReport {
  std::vector<VertexFeature> vertices;
  std::vector<EdgeFeature> edges;
};

/// Classify every control vertex as sharp or rounded and every control
/// polygon edge as fully, partially or not straight. Decided from the
/// nodes and order alone.
FeatureReport classify_features(const MovingCurve& curve);

std::string to_string(VertexClass c);
std::string to_string(EdgeClass c);

}  // namespace mospline
