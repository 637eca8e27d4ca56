#include <doctest.h>

#include <random>

#include "mospline/curve.hpp"
#include "mospline/model_io.hpp"
#include "oracles.hpp"

using namespace mospline;

namespace {

CurveDesc random_curve(std::mt19937& rng, int n_points, int order, bool closed, int dim = 2,
                       bool unit_gaps = false, bool weighted = false) {
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  std::uniform_real_distribution<double> gap(0.3, order - 0.2);
  std::uniform_real_distribution<double> w(0.2, 5.0);
  CurveDesc d;
  d.dimension = dim;
  d.order = order;
  d.closed = closed;
  for (int i = 0; i < n_points; ++i) d.points.emplace_back(coord(rng), coord(rng), dim == 3 ? coord(rng) : 0.0);
  double t = coord(rng);
  const int n_nodes = closed ? n_points + 1 : n_points;
  for (int i = 0; i < n_nodes; ++i) {
    d.nodes.push_back(t);
    t += unit_gaps ? 1.0 : gap(rng);
  }
  if (weighted) {
    for (int i = 0; i < n_points; ++i) d.weights.push_back(w(rng));
  }
  return d;
}

double bbox_diag(const MovingCurve& c) { return c.control_bbox().diagonal(); }

// Kernel breakpoints sit at t_i - k/2 + j; derivatives are only piecewise smooth there.
bool near_breakpoint(const MovingCurve& c, double t, double margin) {
  const int n_nodes = c.num_points();
  for (int shift = -1; shift <= 1; ++shift) {
    if (!c.closed() && shift != 0) continue;
    for (int i = 0; i < n_nodes; ++i) {
      const double base = c.desc().nodes[i] + shift * c.period() - 0.5 * c.order();
      for (int j = 0; j <= c.order(); ++j) {
        if (std::abs(t - base - j) < margin) return true;
      }
    }
  }
  return false;
}

std::vector<oracle::Vec3> points_of(const MovingCurve& c) {
  std::vector<oracle::Vec3> out;
  for (int i = 0; i < c.num_points(); ++i) out.push_back(c.point(i));
  return out;
}

}  // namespace

TEST_CASE("curve_domain examples") {
  const MovingCurve bottle(make_fixture("bottle").curve());
  CHECK(bottle.domain().lo == doctest::Approx(-0.7).epsilon(1e-15));
  CHECK(bottle.domain().hi == doctest::Approx(10.5).epsilon(1e-15));

  CurveDesc d;
  d.order = 2;
  d.points = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}};
  d.nodes = {0, 1, 2};
  const MovingCurve c(d);
  CHECK(c.domain() == Interval{0.0, 2.0});

  const MovingCurve hex(make_fixture("hexagon").curve());
  CHECK(hex.domain() == Interval{0.0, 9.2});
  CHECK(hex.period() == doctest::Approx(9.2));
}

TEST_CASE("open curve interpolates its end points") {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 2 + trial % 5;
    const MovingCurve c(random_curve(rng, 4 + trial % 6, k, false, 2 + trial % 2));
    const double tol = 1e-13 * bbox_diag(c);
    CHECK((c.eval(c.domain().lo) - c.point(0)).norm() < tol);
    CHECK((c.eval(c.domain().hi) - c.point(c.num_points() - 1)).norm() < tol);
  }
}

TEST_CASE("unit-gap nodes reproduce the uniform B-spline curve") {
  std::mt19937 rng(22);
  for (int k = 2; k <= 6; ++k) {
    CurveDesc d = random_curve(rng, 9, k, false, 3, true);
    const MovingCurve c(d);
    const auto knots = oracle::unit_gap_knots(k, c.num_points(), d.nodes[0]);
    const auto ctrl = points_of(c);
    const auto [lo, hi] = oracle::uniform_span(k, knots, c.num_points());
    CHECK(c.domain().lo <= lo);
    CHECK(c.domain().hi >= hi);
    for (int q = 0; q <= 200; ++q) {
      const double t = lo + (hi - lo) * q / 200.0;
      CHECK((c.eval(t) - oracle::de_boor(k, knots, ctrl, t)).norm() < 1e-10);
    }
  }
}

TEST_CASE("uniform weight scaling leaves points unchanged") {
  std::mt19937 rng(23);
  CurveDesc d = random_curve(rng, 8, 4, false, 2, false, true);
  const MovingCurve a(d);
  for (double& w : d.weights) w *= 37.5;
  const MovingCurve b(d);
  for (int q = 0; q <= 100; ++q) {
    const double t = a.domain().lo + a.domain().length() * q / 100.0;
    CHECK((a.eval(t) - b.eval(t)).norm() < 1e-12 * bbox_diag(a));
  }
}

TEST_CASE("closed curves are periodic") {
  const MovingCurve hex(make_fixture("hexagon").curve());
  std::mt19937 rng(24);
  std::uniform_real_distribution<double> u(0.0, 9.2);
  for (int q = 0; q < 200; ++q) {
    const double t = u(rng);
    CHECK((hex.eval(t) - hex.eval(t + hex.period())).norm() < 1e-12);
    CHECK((hex.eval(t) - hex.eval(t - hex.period())).norm() < 1e-12);
  }
  CHECK((hex.eval(0.0) - hex.eval(9.2)).norm() < 1e-12);
}

TEST_CASE("closed curve agrees with the periodic uniform B-spline") {
  std::vector<oracle::Vec3> poly;
  CurveDesc d;
  d.order = 4;
  d.closed = true;
  for (int i = 0; i < 7; ++i) {
    d.points.emplace_back(std::cos(i * 0.9) * (2 + i % 3), std::sin(i * 1.3), 0.0);
    poly.push_back(d.points.back());
  }
  for (int i = 0; i <= 7; ++i) d.nodes.push_back(i);
  const MovingCurve c(d);
  for (int q = 0; q < 140; ++q) {
    const double t = 7.0 * q / 140.0;
    CHECK((c.eval(t) - oracle::periodic_uniform(4, poly, t)).norm() < 1e-10);
  }
}

TEST_CASE("evaluation outside the domain and in node-gap pockets") {
  const MovingCurve bottle(make_fixture("bottle").curve());
  CHECK_THROWS_AS(bottle.eval(-0.71), OutOfDomain);
  CHECK_THROWS_AS(bottle.eval(10.6), OutOfDomain);
  CHECK_THROWS_AS(bottle.eval(std::nan("")), OutOfDomain);

  CurveDesc d;
  d.order = 2;
  d.allow_discontinuity = true;
  d.points = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
  d.nodes = {0, 1, 4, 5};
  const MovingCurve gapped(d);
  CHECK(gapped.eval(0.5).x() == doctest::Approx(0.5));
  CHECK_THROWS_AS(gapped.eval(2.5), UndefinedPoint);
}

TEST_CASE("basis values") {
  CurveDesc d;
  d.order = 4;
  for (int i = 0; i < 8; ++i) {
    d.points.emplace_back(i, i * i, 0.0);
    d.nodes.push_back(i);
  }
  const MovingCurve c(d);
  const auto vals = c.basis_values(3.0);
  REQUIRE(vals.size() == 3);
  CHECK(vals[0].index == 2);
  CHECK(vals[0].value == doctest::Approx(oracle::centered_bspline(4, 1.0)));
  CHECK(vals[1].value == doctest::Approx(oracle::centered_bspline(4, 0.0)));
  CHECK(vals[2].value == doctest::Approx(oracle::centered_bspline(4, -1.0)));

  const MovingCurve hex(make_fixture("hexagon").curve());
  const auto sharp = hex.basis_values(6.2);
  for (const auto& b : sharp) {
    if (b.index == 4) {
      CHECK(b.value == doctest::Approx(1.0).epsilon(1e-15));
    } else {
      CHECK(b.value < 1e-15);
    }
  }

  std::mt19937 rng(25);
  const MovingCurve w(make_fixture("weighted_hexagon_3").curve());
  std::uniform_real_distribution<double> u(0.0, 9.2);
  for (int q = 0; q < 200; ++q) {
    double sum = 0.0;
    for (const auto& b : w.basis_values(u(rng))) {
      CHECK(b.value >= 0.0);
      sum += b.value;
    }
    CHECK(std::abs(sum - 1.0) < 1e-13);
  }
}

TEST_CASE("affine invariance") {
  std::mt19937 rng(26);
  CurveDesc d = random_curve(rng, 9, 4, false, 3, false, true);
  const MovingCurve a(d);
  Eigen::Matrix3d A;
  A << 1.2, -0.4, 0.3, 0.1, 0.9, -0.7, 0.5, 0.2, 1.6;
  const Vec3 shift(3.0, -2.0, 0.5);
  for (auto& p : d.points) p = A * p + shift;
  const MovingCurve b(d);
  for (int q = 0; q <= 100; ++q) {
    const double t = a.domain().lo + a.domain().length() * q / 100.0;
    CHECK((A * a.eval(t) + shift - b.eval(t)).norm() < 1e-12 * std::max(1.0, bbox_diag(b)));
  }
}

TEST_CASE("points lie in the convex hull of the active control points") {
  std::mt19937 rng(27);
  for (int trial = 0; trial < 10; ++trial) {
    const MovingCurve c(random_curve(rng, 8, 3 + trial % 3, trial % 2 == 1, 3, false, true));
    for (int q = 0; q < 50; ++q) {
      const double t = c.domain().lo + c.domain().length() * (q + 0.5) / 50.0;
      std::vector<oracle::Vec3> active;
      for (const auto& b : c.basis_values(t)) active.push_back(c.point(b.index));
      CHECK(oracle::hull_excess(c.eval(t), active, rng) < 1e-10);
    }
  }
}

TEST_CASE("derivatives") {
  CurveDesc flat;
  flat.order = 4;
  for (int i = 0; i < 6; ++i) {
    flat.points.emplace_back(1.5, -2.0, 0.0);
    flat.nodes.push_back(i * 1.3);
  }
  const MovingCurve constant(flat);
  CHECK(constant.derivative(3.0, 1).norm() < 1e-14);
  CHECK(constant.derivative(3.0, 2).norm() < 1e-13);
  CHECK_THROWS_AS(constant.derivative(3.0, 3), InvalidArgument);

  std::mt19937 rng(28);
  for (int trial = 0; trial < 12; ++trial) {
    const MovingCurve c(random_curve(rng, 8, 3 + trial % 4, trial % 2 == 1, 3, false, true));
    std::uniform_real_distribution<double> u(c.domain().lo + 0.01, c.domain().hi - 0.01);
    auto f = [&](double t) -> oracle::Vec3 { return c.eval(t); };
    auto d1 = [&](double t) -> oracle::Vec3 { return c.derivative(t, 1); };
    for (int q = 0; q < 40; ++q) {
      const double t = u(rng);
      if (near_breakpoint(c, t, 1e-3)) continue;
      const oracle::Vec3 fd1 = oracle::central_diff(f, t, 1e-5);
      const oracle::Vec3 fd2 = oracle::central_diff(d1, t, 1e-5);
      if (c.order() >= 3) CHECK((c.derivative(t, 1) - fd1).norm() <= 1e-6 * std::max(1.0, fd1.norm()));
      if (c.order() >= 4) CHECK((c.derivative(t, 2) - fd2).norm() <= 1e-6 * std::max(1.0, fd2.norm()));
    }
  }
}

TEST_CASE("second derivative on a straight interval lies along the edge") {
  const MovingCurve hex(make_fixture("hexagon").curve());
  const auto rep = classify_features(hex);
  for (const auto& e : rep.edges) {
    if (!e.straight) continue;
    const Vec3 dir = (hex.point(e.to) - hex.point(e.from)).normalized();
    for (int q = 1; q < 20; ++q) {
      const double t = e.straight->lo + e.straight->length() * q / 20.0;
      const Vec3 p2 = hex.derivative(t, 2);
      CHECK((p2 - p2.dot(dir) * dir).norm() < 1e-10 * bbox_diag(hex));
    }
  }
}

TEST_CASE("hexagon features") {
  const MovingCurve hex(make_fixture("hexagon").curve());
  const auto rep = classify_features(hex);
  REQUIRE(rep.vertices.size() == 6);
  REQUIRE(rep.edges.size() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(rep.vertices[i].index == i);
    CHECK(rep.vertices[i].kind == (i == 4 ? VertexClass::Sharp : VertexClass::Rounded));
  }
  REQUIRE(rep.vertices[4].constancy);
  CHECK(rep.vertices[4].constancy->lo == doctest::Approx(6.2));
  CHECK(rep.vertices[4].constancy->hi == doctest::Approx(6.2));

  const auto& bottom = rep.edges[1];
  CHECK(bottom.from == 1);
  CHECK(bottom.to == 2);
  CHECK(bottom.kind == EdgeClass::PartialStraight);
  REQUIRE(bottom.straight);
  CHECK(bottom.straight->lo == doctest::Approx(2.0));
  CHECK(bottom.straight->hi == doctest::Approx(2.2));
  CHECK(rep.edges[5].from == 5);
  CHECK(rep.edges[5].to == 0);
}

TEST_CASE("sharp corners hold the control point on their constancy interval") {
  for (const char* name : {"tshape", "bottle", "polygon20", "star5_linear"}) {
    const MovingCurve c(make_fixture(name).curve());
    for (const auto& v : classify_features(c).vertices) {
      if (v.kind != VertexClass::Sharp) continue;
      for (int q = 0; q <= 100; ++q) {
        const double t = v.constancy->lo + v.constancy->length() * q / 100.0;
        CHECK((c.eval(t) - c.point(v.index)).norm() < 1e-12 * bbox_diag(c));
      }
    }
  }
}

TEST_CASE("reported straight intervals are collinear and well-formed") {
  for (const auto& name : fixture_names()) {
    const auto doc = make_fixture(name);
    if (!doc.is_curve()) continue;
    const MovingCurve c(doc.curve());
    const auto rep = classify_features(c);
    for (const auto& e : rep.edges) {
      CHECK(e.straight.has_value() == (e.kind != EdgeClass::None));
      if (!e.straight) continue;
      CHECK(e.straight->lo < e.straight->hi);
      if (!c.closed()) CHECK(c.domain().contains(e.straight->lo));
      if (!c.closed()) CHECK(c.domain().contains(e.straight->hi));
      if (e.kind == EdgeClass::FullStraight) {
        CHECK(rep.vertices[e.from].kind == VertexClass::Sharp);
        CHECK(rep.vertices[e.to].kind == VertexClass::Sharp);
      }
      for (int q = 0; q <= 100; ++q) {
        const double t = e.straight->lo + e.straight->length() * q / 100.0;
        CHECK(oracle::line_distance(c.eval(t), c.point(e.from), c.point(e.to)) < 1e-10 * bbox_diag(c));
      }
    }
  }
}

TEST_CASE("classification follows the node inequality") {
  // Large node gaps make every vertex sharp and every edge fully straight.
  const MovingCurve p(make_fixture("polygon20", {{"a", 2.0}}).curve());
  for (const auto& v : classify_features(p).vertices) CHECK(v.kind == VertexClass::Sharp);
  for (const auto& e : classify_features(p).edges) CHECK(e.kind == EdgeClass::FullStraight);

  const MovingCurve q(make_fixture("polygon20", {{"a", 1.0}}).curve());
  for (const auto& v : classify_features(q).vertices) CHECK(v.kind == VertexClass::Rounded);
  for (const auto& e : classify_features(q).edges) CHECK(e.kind == EdgeClass::None);

  const MovingCurve star(make_fixture("star5_cubic").curve());
  for (const auto& v : classify_features(star).vertices) CHECK(v.kind == VertexClass::Rounded);

  const MovingCurve bottle(make_fixture("bottle").curve());
  const auto rep = classify_features(bottle);
  CHECK(rep.vertices.front().kind == VertexClass::Sharp);
  CHECK(rep.vertices.back().kind == VertexClass::Sharp);
  CHECK(rep.vertices.front().constancy->lo == doctest::Approx(-0.7));
  CHECK(rep.vertices.back().constancy->hi == doctest::Approx(10.5));
}

TEST_CASE("weights pull the curve toward their control point") {
  const auto base = make_fixture("hexagon").curve();
  const int i0 = 3;
  double previous = INFINITY;
  double last = 0.0;
  double diag = 0.0;
  for (double w : {1.0, 3.0, 10.0, 100.0, 1e6}) {
    CurveDesc d = base;
    d.weights.assign(d.points.size(), 1.0);
    d.weights[i0] = w;
    const MovingCurve c(d);
    diag = bbox_diag(c);
    last = (c.eval(d.nodes[i0]) - c.point(i0)).norm();
    CHECK(last <= previous);
    previous = last;
  }
  CHECK(last < 1e-3 * diag);

  const MovingCurve low(make_fixture("weighted_hexagon_03").curve());
  const MovingCurve plain(make_fixture("hexagon").curve());
  CHECK((low.eval(4.2) - low.point(i0)).norm() > (plain.eval(4.2) - plain.point(i0)).norm());
}

TEST_CASE("validate_curve diagnostics") {
  CurveDesc d;
  d.order = 4;
  d.points = {{0, 0, 0}, {1, 0, 0}, {2, 1, 0}};
  d.nodes = {0, 1, 2};
  CHECK(validate_curve(d).empty());

  auto codes = [](const Diagnostics& diags) {
    std::vector<std::string> out;
    for (const auto& g : diags) out.push_back(g.code);
    return out;
  };

  CurveDesc gap = d;
  gap.nodes = {0, 5, 6};
  auto diags = validate_curve(gap);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].code == "node-gap");
  CHECK(diags[0].path == "nodes/1");
  CHECK(diags[0].severity == Severity::Error);
  CHECK_THROWS_AS(MovingCurve{gap}, ValidationError);
  gap.allow_discontinuity = true;
  diags = validate_curve(gap);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].severity == Severity::Warning);
  CHECK_NOTHROW(MovingCurve{gap});

  CurveDesc w = d;
  w.weights = {1.0, 0.0, 1.0};
  CHECK(codes(validate_curve(w)) == std::vector<std::string>{"non-positive-weight"});
  CHECK(validate_curve(w)[0].path == "weights/1");

  CurveDesc inc = d;
  inc.nodes = {0, 2, 1};
  CHECK(codes(validate_curve(inc)) == std::vector<std::string>{"non-increasing-nodes"});

  CurveDesc cnt = d;
  cnt.nodes = {0, 1};
  CHECK(codes(validate_curve(cnt)) == std::vector<std::string>{"count-mismatch"});
  CurveDesc closed = d;
  closed.closed = true;
  CHECK(codes(validate_curve(closed)) == std::vector<std::string>{"count-mismatch"});
  closed.nodes = {0, 1, 2, 3};
  CHECK(validate_curve(closed).empty());
  closed.nodes = {0, 1, 2, 6};
  CHECK(codes(validate_curve(closed)) == std::vector<std::string>{"node-gap"});

  CurveDesc few = d;
  few.points.pop_back();
  few.nodes.pop_back();
  CHECK(codes(validate_curve(few)) == std::vector<std::string>{"too-few-points"});

  CurveDesc dim = d;
  dim.dimension = 4;
  CHECK(codes(validate_curve(dim)) == std::vector<std::string>{"dimension"});

  CurveDesc ord = d;
  ord.order = 1;
  CHECK(codes(validate_curve(ord)) == std::vector<std::string>{"order"});
}

TEST_CASE("2D curves drop z") {
  CurveDesc d;
  d.points = {{0, 0, 5}, {1, 0, 5}, {2, 1, 5}};
  d.nodes = {0, 1, 2};
  const MovingCurve c(d);
  CHECK(c.eval(1.0).z() == 0.0);
}
