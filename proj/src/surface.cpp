#include "mospline/surface.hpp"

#include <cmath>
#include <map>
#include <string>

namespace mospline {
namespace {

constexpr double kTinyDenominator = 1e-300;

double slack(double a, double b) { return 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

double wrap(double x, double base, double period) {
  double r = std::fmod(x - base, period);
  if (r < 0.0) r += period;
  return base + r;
}

std::string grid_path(const char* field, int i, int j) {
  return std::string(field) + "/" + std::to_string(i) + "/" + std::to_string(j);
}

}  // namespace

void SurfaceDesc::set_separable_nodes(const std::vector<double>& s, const std::vector<double>& t) {
  rows = static_cast<int>(s.size());
  cols = static_cast<int>(t.size());
  s_nodes.resize(static_cast<size_t>(rows) * cols);
  t_nodes.resize(s_nodes.size());
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      s_nodes[at(i, j)] = s[i];
      t_nodes[at(i, j)] = t[j];
    }
  }
}

Diagnostics validate_surface(const SurfaceDesc& d) {
  Diagnostics out;
  auto error = [&](std::string code, std::string path, std::string msg) {
    out.push_back({Severity::Error, std::move(code), std::move(path), std::move(msg)});
  };

  for (int a = 0; a < 2; ++a) {
    if (d.orders[a] < 2 || d.orders[a] > kMaxOrder) {
      error("order", "orders/" + std::to_string(a),
            "order must lie in [2, " + std::to_string(kMaxOrder) + "], got " + std::to_string(d.orders[a]));
    }
  }
  if (d.rows < 3 || d.cols < 3) {
    error("too-few-points", "points",
          "a surface needs at least 3 x 3 control points, got " + std::to_string(d.rows) + " x " +
              std::to_string(d.cols));
  }
  const size_t count = static_cast<size_t>(std::max(d.rows, 0)) * std::max(d.cols, 0);
  if (d.points.size() != count) {
    error("shape", "points", "expected " + std::to_string(count) + " points, got " + std::to_string(d.points.size()));
  }
  if (d.s_nodes.size() != count || d.t_nodes.size() != count) {
    error("shape", "nodes", "node grids must match the " + std::to_string(d.rows) + " x " +
                                std::to_string(d.cols) + " control net");
  }
  if (!d.weights.empty() && d.weights.size() != count) {
    error("shape", "weights", "expected " + std::to_string(count) + " weights, got " + std::to_string(d.weights.size()));
  }
  if (!out.empty()) return out;

  for (int i = 0; i < d.rows; ++i) {
    for (int j = 0; j < d.cols; ++j) {
      const size_t k = d.at(i, j);
      if (!d.points[k].allFinite()) error("non-finite", grid_path("points", i, j), "non-finite coordinate");
      if (!std::isfinite(d.s_nodes[k]) || !std::isfinite(d.t_nodes[k])) {
        error("non-finite", grid_path("nodes", i, j), "non-finite node");
      }
      if (!d.weights.empty() && !(d.weights[k] > 0.0 && std::isfinite(d.weights[k]))) {
        error("non-positive-weight", grid_path("weights", i, j),
              "weight must be positive and finite, got " + std::to_string(d.weights[k]));
      }
    }
  }
  if (!out.empty()) return out;

  const double scale = std::max(1.0, bounding_box(d.points).diagonal());
  const double point_tol = 1e-12 * scale;
  const int m = d.rows - 1, n = d.cols - 1;

  if (d.closed_s) {
    const double span = d.s_nodes[d.at(m, 0)] - d.s_nodes[d.at(0, 0)];
    for (int j = 0; j <= n; ++j) {
      if ((d.points[d.at(0, j)] - d.points[d.at(m, j)]).norm() > point_tol) {
        error("closure-s", grid_path("points", m, j), "closed in s requires P_0j == P_mj");
      }
      const double sj = d.s_nodes[d.at(m, j)] - d.s_nodes[d.at(0, j)];
      if (std::abs(sj - span) > slack(sj, span)) {
        error("closure-s", grid_path("nodes", m, j), "closed in s requires s_mj - s_0j == s_m0 - s_00");
      }
    }
  }
  if (d.closed_t) {
    const double span = d.t_nodes[d.at(0, n)] - d.t_nodes[d.at(0, 0)];
    for (int i = 0; i <= m; ++i) {
      if ((d.points[d.at(i, 0)] - d.points[d.at(i, n)]).norm() > point_tol) {
        error("closure-t", grid_path("points", i, n), "closed in t requires P_i0 == P_in");
      }
      const double ti = d.t_nodes[d.at(i, n)] - d.t_nodes[d.at(i, 0)];
      if (std::abs(ti - span) > slack(ti, span)) {
        error("closure-t", grid_path("nodes", i, n), "closed in t requires t_in - t_i0 == t_0n - t_00");
      }
    }
  }

  // Along every parameter line nodes must increase with gaps below the order.
  const Severity gap_sev = d.allow_discontinuity ? Severity::Warning : Severity::Error;
  auto check_line = [&](const std::vector<double>& nodes, int fixed, bool along_s, int order) {
    const int len = along_s ? d.rows : d.cols;
    for (int q = 1; q < len; ++q) {
      const size_t a = along_s ? d.at(q - 1, fixed) : d.at(fixed, q - 1);
      const size_t b = along_s ? d.at(q, fixed) : d.at(fixed, q);
      const std::string path = along_s ? grid_path("nodes/s", q, fixed) : grid_path("nodes/t", fixed, q);
      const double gap = nodes[b] - nodes[a];
      if (!(gap > 0.0)) {
        error("non-increasing-nodes", path, std::string(along_s ? "s" : "t") + " nodes must increase along the grid");
      } else if (gap >= order) {
        out.push_back({gap_sev, "node-gap", path,
                       std::string(along_s ? "s" : "t") + " node gap " + std::to_string(gap) +
                           " is not below the order " + std::to_string(order)});
      }
    }
  };
  for (int j = 0; j <= n; ++j) check_line(d.s_nodes, j, true, d.orders[0]);
  for (int i = 0; i <= m; ++i) check_line(d.t_nodes, i, false, d.orders[1]);
  return out;
}

bool SurfaceDomain::contains(double s, double t) const {
  if (!std::isfinite(s) || !std::isfinite(t)) return false;
  if (box) {
    const auto& b = *box;
    if (periodic_s) s = wrap(s, b[0].lo, period_s);
    if (periodic_t) t = wrap(t, b[1].lo, period_t);
    return b[0].contains(s) && b[1].contains(t);
  }
  auto inside = [](double x, const Interval& iv, bool periodic, double period) {
    if (!periodic) return x > iv.lo && x < iv.hi;
    const double c = 0.5 * (iv.lo + iv.hi);
    const double off = x - c - period * std::round((x - c) / period);
    return std::abs(off) < 0.5 * iv.length();
  };
  for (const auto& r : rectangles) {
    if (inside(s, r.s, periodic_s, period_s) && inside(t, r.t, periodic_t, period_t)) return true;
  }
  return false;
}

MovingSurface::MovingSurface(SurfaceDesc desc) : desc_(std::move(desc)), kernel_s_(2), kernel_t_(2) {
  auto diags = validate_surface(desc_);
  if (has_errors(diags)) throw ValidationError(std::move(diags));
  kernel_s_ = UniformBSpline(desc_.orders[0]);
  kernel_t_ = UniformBSpline(desc_.orders[1]);
  if (desc_.weights.empty()) desc_.weights.assign(desc_.points.size(), 1.0);

  const int m = desc_.rows - 1, n = desc_.cols - 1;
  const double h1 = kernel_s_.half_support(), h2 = kernel_t_.half_support();
  const auto& S = desc_.s_nodes;
  const auto& T = desc_.t_nodes;
  auto& dom = domain_;
  dom.periodic_s = desc_.closed_s;
  dom.periodic_t = desc_.closed_t;
  if (desc_.closed_s) dom.period_s = S[desc_.at(m, 0)] - S[desc_.at(0, 0)];
  if (desc_.closed_t) dom.period_t = T[desc_.at(0, n)] - T[desc_.at(0, 0)];

  const int rows_eff = desc_.closed_s ? m : m + 1;
  const int cols_eff = desc_.closed_t ? n : n + 1;
  for (int i = 0; i < rows_eff; ++i) {
    for (int j = 0; j < cols_eff; ++j) {
      const size_t k = desc_.at(i, j);
      dom.rectangles.push_back({i, j, {S[k] - h1, S[k] + h1}, {T[k] - h2, T[k] + h2}});
    }
  }

  bool sep_s = true, sep_t = true;
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= n; ++j) {
      sep_s = sep_s && S[desc_.at(i, j)] == S[desc_.at(i, 0)];
      sep_t = sep_t && T[desc_.at(i, j)] == T[desc_.at(0, j)];
    }
  }
  std::optional<Interval> box_s, box_t;
  if (desc_.closed_s) {
    box_s = Interval{S[desc_.at(0, 0)], S[desc_.at(0, 0)] + dom.period_s};
  } else if (sep_s) {
    box_s = Interval{S[desc_.at(1, 0)] - h1, S[desc_.at(m - 1, 0)] + h1};
  }
  if (desc_.closed_t) {
    box_t = Interval{T[desc_.at(0, 0)], T[desc_.at(0, 0)] + dom.period_t};
  } else if (sep_t) {
    box_t = Interval{T[desc_.at(0, 1)] - h2, T[desc_.at(0, n - 1)] + h2};
  }
  if (box_s && box_t) dom.box = std::array<Interval, 2>{*box_s, *box_t};
}

SurfaceDomain surface_domain(const MovingSurface& sf) { return sf.domain(); }

BoundingBox MovingSurface::control_bbox() const { return bounding_box(desc_.points); }

std::pair<double, double> MovingSurface::reduce(double s, double t) const {
  if (!std::isfinite(s) || !std::isfinite(t)) throw OutOfDomain("parameter is not finite");
  const auto& dom = domain_;
  if (dom.box) {
    const auto& b = *dom.box;
    if (dom.periodic_s) s = wrap(s, b[0].lo, dom.period_s);
    if (dom.periodic_t) t = wrap(t, b[1].lo, dom.period_t);
    const double es = 1e-12 * std::max({1.0, std::abs(b[0].lo), std::abs(b[0].hi)});
    const double et = 1e-12 * std::max({1.0, std::abs(b[1].lo), std::abs(b[1].hi)});
    if (s < b[0].lo - es || s > b[0].hi + es || t < b[1].lo - et || t > b[1].hi + et) {
      throw OutOfDomain("parameter (" + std::to_string(s) + ", " + std::to_string(t) +
                        ") outside surface domain [" + std::to_string(b[0].lo) + ", " +
                        std::to_string(b[0].hi) + "] x [" + std::to_string(b[1].lo) + ", " +
                        std::to_string(b[1].hi) + "]");
    }
    return {std::clamp(s, b[0].lo, b[0].hi), std::clamp(t, b[1].lo, b[1].hi)};
  }
  const auto& S = desc_.s_nodes;
  const auto& T = desc_.t_nodes;
  if (dom.periodic_s) s = wrap(s, S[0], dom.period_s);
  if (dom.periodic_t) t = wrap(t, T[0], dom.period_t);
  return {s, t};
}

std::vector<MovingSurface::Term> MovingSurface::active_terms(double s, double t) const {
  std::vector<Term> terms;
  const double h1 = kernel_s_.half_support(), h2 = kernel_t_.half_support();
  const auto& dom = domain_;
  const int reach_s = dom.periodic_s ? static_cast<int>(std::ceil(h1 / dom.period_s)) + 1 : 0;
  const int reach_t = dom.periodic_t ? static_cast<int>(std::ceil(h2 / dom.period_t)) + 1 : 0;
  for (const auto& r : dom.rectangles) {
    const size_t k = desc_.at(r.i, r.j);
    for (int ms = -reach_s; ms <= reach_s; ++ms) {
      const double ds = s - (desc_.s_nodes[k] + ms * dom.period_s);
      if (ds < -h1 || ds >= h1) continue;
      for (int mt = -reach_t; mt <= reach_t; ++mt) {
        const double dt = t - (desc_.t_nodes[k] + mt * dom.period_t);
        if (dt < -h2 || dt >= h2) continue;
        terms.push_back({r.i, r.j, ds, dt});
      }
    }
  }
  return terms;
}

namespace {

void require_covered(double den, bool boxed, double s, double t) {
  if (den > kTinyDenominator) return;
  const std::string where = "(" + std::to_string(s) + ", " + std::to_string(t) + ")";
  if (boxed) throw UndefinedPoint("zero denominator at " + where);
  throw OutOfDomain("parameter " + where + " lies outside every node rectangle");
}

}  // namespace

Vec3 MovingSurface::eval(double s, double t) const {
  const auto [u, v] = reduce(s, t);
  Vec3 num = Vec3::Zero();
  double den = 0.0;
  for (const auto& term : active_terms(u, v)) {
    const size_t k = desc_.at(term.i, term.j);
    const double b = desc_.weights[k] * kernel_s_(term.ds) * kernel_t_(term.dt);
    num += b * desc_.points[k];
    den += b;
  }
  require_covered(den, domain_.box.has_value(), s, t);
  return num / den;
}

std::vector<MovingSurface::BlendValue> MovingSurface::basis_values(double s, double t) const {
  const auto [u, v] = reduce(s, t);
  std::map<std::pair<int, int>, double> acc;
  double den = 0.0;
  for (const auto& term : active_terms(u, v)) {
    const size_t k = desc_.at(term.i, term.j);
    const double b = desc_.weights[k] * kernel_s_(term.ds) * kernel_t_(term.dt);
    if (b > 0.0) {
      acc[{term.i, term.j}] += b;
      den += b;
    }
  }
  require_covered(den, domain_.box.has_value(), s, t);
  std::vector<BlendValue> out;
  for (const auto& [ij, b] : acc) out.push_back({ij.first, ij.second, b / den});
  return out;
}

Vec3 MovingSurface::partial(double s, double t, int r1, int r2) const {
  if (r1 < 0 || r2 < 0 || r1 + r2 < 1 || r1 + r2 > 2) {
    throw InvalidArgument("partial derivative orders must satisfy r1 + r2 in {1, 2}");
  }
  const auto [u, v] = reduce(s, t);
  // Numerator A and denominator B with their partials, indexed [ds][dt].
  Vec3 a[3][3];
  double b[3][3] = {};
  for (auto& row : a)
    for (auto& x : row) x.setZero();

  for (const auto& term : active_terms(u, v)) {
    const size_t k = desc_.at(term.i, term.j);
    const double w = desc_.weights[k];
    const Vec3& p = desc_.points[k];
    double ns[3] = {kernel_s_(term.ds), 0.0, 0.0};
    double nt[3] = {kernel_t_(term.dt), 0.0, 0.0};
    for (int q = 1; q <= r1; ++q) ns[q] = kernel_s_.derivative(term.ds, q);
    for (int q = 1; q <= r2; ++q) nt[q] = kernel_t_.derivative(term.dt, q);
    for (int x = 0; x <= r1; ++x) {
      for (int y = 0; y <= r2; ++y) {
        const double c = w * ns[x] * nt[y];
        a[x][y] += c * p;
        b[x][y] += c;
      }
    }
  }
  require_covered(b[0][0], domain_.box.has_value(), s, t);

  const double den = b[0][0];
  const Vec3 p = a[0][0] / den;
  if (r1 + r2 == 1) {
    return (a[r1][r2] - b[r1][r2] * p) / den;
  }
  if (r1 == 2 || r2 == 2) {
    const int x = r1 / 2, y = r2 / 2;  // unit step along the differentiated axis
    const Vec3 d1 = (a[x][y] - b[x][y] * p) / den;
    return (a[r1][r2] - 2.0 * b[x][y] * d1 - b[r1][r2] * p) / den;
  }
  const Vec3 ps = (a[1][0] - b[1][0] * p) / den;
  const Vec3 pt = (a[0][1] - b[0][1] * p) / den;
  return (a[1][1] - b[1][0] * pt - b[0][1] * ps - b[1][1] * p) / den;
}

Vec3 MovingSurface::normal(double s, double t) const {
  const Vec3 ps = partial(s, t, 1, 0);
  const Vec3 pt = partial(s, t, 0, 1);
  const Vec3 n = ps.cross(pt);
  const double scale = std::max(control_bbox().diagonal(), 1e-300);
  const double tiny = 1e-12 * scale;
  if (ps.norm() <= tiny || pt.norm() <= tiny || n.norm() <= 1e-10 * ps.norm() * pt.norm()) {
    throw DegenerateNormal("surface normal is undefined at (" + std::to_string(s) + ", " +
                           std::to_string(t) + ")");
  }
  return n.normalized();
}

}  // namespace mospline
