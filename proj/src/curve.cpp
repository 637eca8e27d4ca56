#include "mospline/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace mospline {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTinyDenominator = 1e-300;

// Node comparisons against the order use a relative slack so that nodes
// such as 8.2 - 4.2 classify the way their decimal values do.
double slack(double a, double b) { return 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

std::string idx_path(const char* field, size_t i) { return std::string(field) + "/" + std::to_string(i); }

}  // namespace

Diagnostics validate_curve(const CurveDesc& d) {
  Diagnostics out;
  auto error = [&](std::string code, std::string path, std::string msg) {
    out.push_back({Severity::Error, std::move(code), std::move(path), std::move(msg)});
  };

  if (d.dimension != 2 && d.dimension != 3) {
    error("dimension", "dimension", "dimension must be 2 or 3, got " + std::to_string(d.dimension));
  }
  if (d.order < 2 || d.order > kMaxOrder) {
    error("order", "order", "order must lie in [2, " + std::to_string(kMaxOrder) + "], got " +
                                std::to_string(d.order));
  }

  const size_t np = d.points.size();
  const size_t expected_nodes = d.closed ? np + 1 : np;
  if (np < 3) {
    error("too-few-points", "points", "a curve needs at least 3 control points, got " + std::to_string(np));
  }
  if (d.nodes.size() != expected_nodes) {
    error("count-mismatch", "nodes",
          "expected " + std::to_string(expected_nodes) + " nodes for " + std::to_string(np) +
              (d.closed ? " points (closed curves add t_n)" : " points") + ", got " +
              std::to_string(d.nodes.size()));
  }
  if (!d.weights.empty() && d.weights.size() != np) {
    error("count-mismatch", "weights",
          "expected " + std::to_string(np) + " weights, got " + std::to_string(d.weights.size()));
  }

  for (size_t i = 0; i < np; ++i) {
    if (!d.points[i].allFinite()) error("non-finite", idx_path("points", i), "non-finite coordinate");
  }
  for (size_t i = 0; i < d.weights.size(); ++i) {
    if (!(d.weights[i] > 0.0) || !std::isfinite(d.weights[i])) {
      error("non-positive-weight", idx_path("weights", i),
            "weight must be positive and finite, got " + std::to_string(d.weights[i]));
    }
  }

  bool nodes_ok = true;
  for (size_t i = 0; i < d.nodes.size(); ++i) {
    if (!std::isfinite(d.nodes[i])) {
      error("non-finite", idx_path("nodes", i), "non-finite node");
      nodes_ok = false;
    }
  }
  for (size_t i = 1; nodes_ok && i < d.nodes.size(); ++i) {
    if (!(d.nodes[i] > d.nodes[i - 1])) {
      error("non-increasing-nodes", idx_path("nodes", i),
            "nodes must be strictly increasing: t_" + std::to_string(i) + " = " +
                std::to_string(d.nodes[i]) + " <= t_" + std::to_string(i - 1) + " = " +
                std::to_string(d.nodes[i - 1]));
      nodes_ok = false;
    }
  }

  if (nodes_ok && d.order >= 2) {
    const Severity gap_sev = d.allow_discontinuity ? Severity::Warning : Severity::Error;
    auto gap = [&](double a, double b, std::string path, const std::string& what) {
      if (b - a >= d.order) {
        out.push_back({gap_sev, "node-gap", std::move(path),
                       what + " " + std::to_string(b - a) + " is not below the order " +
                           std::to_string(d.order) + "; the curve is discontinuous there"});
      }
    };
    // For closed curves the final gap t_n - t_{n-1} is the wrap gap.
    for (size_t i = 1; i < d.nodes.size(); ++i) {
      gap(d.nodes[i - 1], d.nodes[i], idx_path("nodes", i), "node gap");
    }
  }
  return out;
}

MovingCurve::MovingCurve(CurveDesc desc) : desc_(std::move(desc)), kernel_(2) {
  auto diags = validate_curve(desc_);
  if (has_errors(diags)) throw ValidationError(std::move(diags));

  kernel_ = UniformBSpline(desc_.order);
  if (desc_.weights.empty()) desc_.weights.assign(desc_.points.size(), 1.0);
  if (desc_.dimension == 2) {
    for (auto& p : desc_.points) p.z() = 0.0;
  }

  const double h = kernel_.half_support();
  const auto& t = desc_.nodes;
  if (desc_.closed) {
    period_ = t.back() - t.front();
    domain_ = {t.front(), t.back()};
  } else {
    const size_t n = t.size() - 1;
    domain_ = {t[1] - h, t[n - 1] + h};
  }
}

double MovingCurve::node(int i) const {
  const auto& t = desc_.nodes;
  if (desc_.closed) {
    const int n = num_points();
    const int q = (i >= 0) ? i / n : -((-i + n - 1) / n);
    const int r = i - q * n;
    return t[r] + q * period_;
  }
  if (i < 0) return -kInf;
  if (i >= static_cast<int>(t.size())) return kInf;
  return t[i];
}

BoundingBox MovingCurve::control_bbox() const { return bounding_box(desc_.points); }

double MovingCurve::reduce(double t) const {
  if (!std::isfinite(t)) throw OutOfDomain("parameter is not finite");
  if (desc_.closed) {
    double r = std::fmod(t - domain_.lo, period_);
    if (r < 0.0) r += period_;
    return domain_.lo + r;
  }
  const double eps = slack(domain_.lo, domain_.hi) * 1e-3;
  if (t < domain_.lo - eps || t > domain_.hi + eps) {
    throw OutOfDomain("parameter " + std::to_string(t) + " outside curve domain [" +
                      std::to_string(domain_.lo) + ", " + std::to_string(domain_.hi) + "]");
  }
  return std::clamp(t, domain_.lo, domain_.hi);
}

// Indices whose shifted kernel has t - t_i in [-k/2, k/2). The closed
// form sums every periodic image; when T >= k at most one image of each
// node is within reach, which is exactly the wrapped offset min{|t-t_i|,
// |t-t_i+T|, |t-t_i-T|}.
std::vector<MovingCurve::Term> MovingCurve::active_terms(double t) const {
  std::vector<Term> terms;
  const double h = kernel_.half_support();
  const auto& nodes = desc_.nodes;
  if (!desc_.closed) {
    auto first = std::upper_bound(nodes.begin(), nodes.end(), t - h);
    auto last = std::upper_bound(nodes.begin(), nodes.end(), t + h);
    for (auto it = first; it != last; ++it) {
      terms.push_back({static_cast<int>(it - nodes.begin()), t - *it});
    }
    return terms;
  }
  const int n = num_points();
  const int reach = static_cast<int>(std::ceil(h / period_)) + 1;
  for (int m = -reach; m <= reach; ++m) {
    for (int i = 0; i < n; ++i) {
      const double off = t - (nodes[i] + m * period_);
      if (off >= -h && off < h) terms.push_back({i, off});
    }
  }
  return terms;
}

Vec3 MovingCurve::eval(double t) const {
  const double u = reduce(t);
  Vec3 num = Vec3::Zero();
  double den = 0.0;
  for (const auto& term : active_terms(u)) {
    const double b = desc_.weights[term.index] * kernel_(term.offset);
    num += b * desc_.points[term.index];
    den += b;
  }
  if (!(den > kTinyDenominator)) {
    throw UndefinedPoint("no moving B-spline covers parameter " + std::to_string(t));
  }
  return num / den;
}

std::vector<BasisValue> MovingCurve::basis_values(double t) const {
  const double u = reduce(t);
  std::map<int, double> acc;
  double den = 0.0;
  for (const auto& term : active_terms(u)) {
    const double b = desc_.weights[term.index] * kernel_(term.offset);
    if (b > 0.0) {
      acc[term.index] += b;
      den += b;
    }
  }
  if (!(den > kTinyDenominator)) {
    throw UndefinedPoint("no moving B-spline covers parameter " + std::to_string(t));
  }
  std::vector<BasisValue> out;
  out.reserve(acc.size());
  for (const auto& [i, b] : acc) out.push_back({i, b / den});
  return out;
}

Vec3 MovingCurve::derivative(double t, int r) const {
  if (r != 1 && r != 2) throw InvalidArgument("curve derivative order must be 1 or 2");
  const double u = reduce(t);
  Vec3 a0 = Vec3::Zero(), a1 = Vec3::Zero(), a2 = Vec3::Zero();
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  for (const auto& term : active_terms(u)) {
    const double w = desc_.weights[term.index];
    const Vec3& p = desc_.points[term.index];
    const double n0 = w * kernel_(term.offset);
    const double n1 = w * kernel_.derivative(term.offset, 1);
    a0 += n0 * p;
    a1 += n1 * p;
    b0 += n0;
    b1 += n1;
    if (r == 2) {
      const double n2 = w * kernel_.derivative(term.offset, 2);
      a2 += n2 * p;
      b2 += n2;
    }
  }
  if (!(b0 > kTinyDenominator)) {
    throw UndefinedPoint("no moving B-spline covers parameter " + std::to_string(t));
  }
  const Vec3 p = a0 / b0;
  const Vec3 d1 = (a1 - b1 * p) / b0;
  if (r == 1) return d1;
  return (a2 - 2.0 * b1 * d1 - b2 * p) / b0;
}

FeatureReport classify_features(const MovingCurve& c) {
  FeatureReport rep;
  const double k = c.order();
  const double h = 0.5 * k;
  const int np = c.num_points();
  const Interval dom = c.domain();
  const bool closed = c.closed();

  auto clip = [&](Interval iv) { return closed ? iv : iv.intersect(dom); };
  auto at_least_k = [&](double a, double b) { return b - a >= k - slack(a, b); };
  auto more_than_k = [&](double a, double b) { return b - a > k + slack(a, b); };

  std::vector<bool> sharp(np, false);
  for (int i = 0; i < np; ++i) {
    VertexFeature v;
    v.index = i;
    const double prev = c.node(i - 1), next = c.node(i + 1);
    if (at_least_k(prev, next)) {
      v.kind = VertexClass::Sharp;
      sharp[i] = true;
      Interval iv = clip({prev + h, next - h});
      // Node snapping can leave hi a hair below lo for exactly-k gaps.
      if (iv.hi < iv.lo) iv.hi = iv.lo;
      v.constancy = iv;
    }
    rep.vertices.push_back(v);
  }

  const int num_edges = closed ? np : np - 1;
  for (int i = 0; i < num_edges; ++i) {
    EdgeFeature e;
    e.from = i;
    e.to = (i + 1) % np;
    const double tm1 = c.node(i - 1), t0 = c.node(i), t1 = c.node(i + 1), t2 = c.node(i + 2);
    const bool covered = t1 - t0 < k;
    if (covered && sharp[i] && sharp[e.to]) {
      e.kind = EdgeClass::FullStraight;
      e.straight = clip({tm1 + h, t2 - h});
    } else if (covered && more_than_k(tm1, t2)) {
      const Interval iv = clip({std::max(tm1 + h, t1 - h), std::min(t0 + h, t2 - h)});
      if (iv.lo < iv.hi) {
        e.kind = EdgeClass::PartialStraight;
        e.straight = iv;
      }
    }
    rep.edges.push_back(e);
  }
  return rep;
}

std::string to_string(VertexClass c) { return c == VertexClass::Sharp ? "Sharp" : "Rounded"; }

std::string to_string(EdgeClass c) {
  switch (c) {
    case EdgeClass::FullStraight:
      return "FullStraight";
    case EdgeClass::PartialStraight:
      return "PartialStraight";
    case EdgeClass::None:
      break;
  }
  return "None";
}

}  // namespace mospline
