#include "mospline/model_io.hpp"

#include <cmath>
#include <cstdio>
#include <set>

namespace mospline {

using nlohmann::json;

namespace {

// Reading ------------------------------------------------------------------

[[noreturn]] void fail(const std::string& path, const std::string& msg) { throw ParseError(path, path + ": " + msg); }

const json& member(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "/" + key, "missing required field");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected a boolean");
  return v.get<bool>();
}

const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  return v;
}

std::vector<double> number_list(const json& v, const std::string& path) {
  as_array(v, path);
  std::vector<double> out;
  out.reserve(v.size());
  for (size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path + "/" + std::to_string(i)));
  return out;
}

Vec3 as_point(const json& v, int dim, const std::string& path) {
  as_array(v, path);
  if (static_cast<int>(v.size()) != dim) {
    fail(path, "expected " + std::to_string(dim) + " coordinates, got " + std::to_string(v.size()));
  }
  Vec3 p = Vec3::Zero();
  for (int a = 0; a < dim; ++a) p[a] = as_number(v[a], path + "/" + std::to_string(a));
  return p;
}

json leftovers(const json& obj, std::initializer_list<const char*> known) {
  std::set<std::string> k(known.begin(), known.end());
  json out = json::object();
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!k.count(it.key())) out[it.key()] = it.value();
  }
  return out;
}

CurveDesc read_curve(const json& p, const std::string& base) {
  CurveDesc c;
  c.dimension = as_int(member(p, "dimension", base), base + "/dimension");
  if (c.dimension != 2 && c.dimension != 3) fail(base + "/dimension", "dimension must be 2 or 3");
  c.order = as_int(member(p, "order", base), base + "/order");
  c.closed = as_bool(member(p, "closed", base), base + "/closed");
  if (auto it = p.find("allow_discontinuity"); it != p.end()) {
    c.allow_discontinuity = as_bool(*it, base + "/allow_discontinuity");
  }
  const json& pts = as_array(member(p, "points", base), base + "/points");
  for (size_t i = 0; i < pts.size(); ++i) {
    c.points.push_back(as_point(pts[i], c.dimension, base + "/points/" + std::to_string(i)));
  }
  c.nodes = number_list(member(p, "nodes", base), base + "/nodes");
  if (auto it = p.find("weights"); it != p.end()) c.weights = number_list(*it, base + "/weights");
  return c;
}

std::vector<double> grid_numbers(const json& v, int rows, int cols, const std::string& path) {
  as_array(v, path);
  if (static_cast<int>(v.size()) != rows) fail(path, "expected " + std::to_string(rows) + " rows");
  std::vector<double> out;
  for (int i = 0; i < rows; ++i) {
    const std::string rp = path + "/" + std::to_string(i);
    auto row = number_list(v[i], rp);
    if (static_cast<int>(row.size()) != cols) fail(rp, "expected " + std::to_string(cols) + " columns");
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

SurfaceDesc read_surface(const json& p, const std::string& base) {
  SurfaceDesc sd;
  const json& ord = as_array(member(p, "orders", base), base + "/orders");
  if (ord.size() != 2) fail(base + "/orders", "expected [k1, k2]");
  sd.orders = {as_int(ord[0], base + "/orders/0"), as_int(ord[1], base + "/orders/1")};
  sd.closed_s = as_bool(member(p, "closed_s", base), base + "/closed_s");
  sd.closed_t = as_bool(member(p, "closed_t", base), base + "/closed_t");
  if (auto it = p.find("allow_discontinuity"); it != p.end()) {
    sd.allow_discontinuity = as_bool(*it, base + "/allow_discontinuity");
  }

  const std::string pp = base + "/points";
  const json& grid = as_array(member(p, "points", base), pp);
  sd.rows = static_cast<int>(grid.size());
  if (sd.rows == 0) fail(pp, "empty control net");
  sd.cols = static_cast<int>(as_array(grid[0], pp + "/0").size());
  for (int i = 0; i < sd.rows; ++i) {
    const std::string rp = pp + "/" + std::to_string(i);
    const json& row = as_array(grid[i], rp);
    if (static_cast<int>(row.size()) != sd.cols) fail(rp, "ragged control net");
    for (int j = 0; j < sd.cols; ++j) sd.points.push_back(as_point(row[j], 3, rp + "/" + std::to_string(j)));
  }

  const std::string np = base + "/nodes";
  const json& nodes = member(p, "nodes", base);
  if (!nodes.is_object()) fail(np, "expected an object with \"s\" and \"t\"");
  const json& s = as_array(member(nodes, "s", np), np + "/s");
  const json& t = as_array(member(nodes, "t", np), np + "/t");
  const bool per_point = !s.empty() && s[0].is_array();
  if (per_point) {
    sd.s_nodes = grid_numbers(s, sd.rows, sd.cols, np + "/s");
    sd.t_nodes = grid_numbers(t, sd.rows, sd.cols, np + "/t");
  } else {
    // Separable shorthand: s_ij = s[i], t_ij = t[j].
    auto sv = number_list(s, np + "/s");
    auto tv = number_list(t, np + "/t");
    if (static_cast<int>(sv.size()) != sd.rows) fail(np + "/s", "expected " + std::to_string(sd.rows) + " s nodes");
    if (static_cast<int>(tv.size()) != sd.cols) fail(np + "/t", "expected " + std::to_string(sd.cols) + " t nodes");
    sd.set_separable_nodes(sv, tv);
  }
  if (auto it = p.find("weights"); it != p.end()) {
    sd.weights = grid_numbers(*it, sd.rows, sd.cols, base + "/weights");
  }
  return sd;
}

// Writing ------------------------------------------------------------------

json point_json(const Vec3& p, int dim) {
  json a = json::array();
  for (int i = 0; i < dim; ++i) a.push_back(p[i]);
  return a;
}

json grid_json(const std::vector<double>& v, int rows, int cols) {
  json g = json::array();
  for (int i = 0; i < rows; ++i) {
    json row = json::array();
    for (int j = 0; j < cols; ++j) row.push_back(v[static_cast<size_t>(i) * cols + j]);
    g.push_back(std::move(row));
  }
  return g;
}

json write_curve(const CurveDesc& c) {
  json p = json::object();
  p["dimension"] = c.dimension;
  p["order"] = c.order;
  p["closed"] = c.closed;
  if (c.allow_discontinuity) p["allow_discontinuity"] = true;
  json pts = json::array();
  for (const auto& q : c.points) pts.push_back(point_json(q, c.dimension));
  p["points"] = std::move(pts);
  p["nodes"] = c.nodes;
  if (!c.weights.empty()) p["weights"] = c.weights;
  return p;
}

json write_surface(const SurfaceDesc& s) {
  json p = json::object();
  p["orders"] = {s.orders[0], s.orders[1]};
  p["closed_s"] = s.closed_s;
  p["closed_t"] = s.closed_t;
  if (s.allow_discontinuity) p["allow_discontinuity"] = true;
  json grid = json::array();
  for (int i = 0; i < s.rows; ++i) {
    json row = json::array();
    for (int j = 0; j < s.cols; ++j) row.push_back(point_json(s.points[s.at(i, j)], 3));
    grid.push_back(std::move(row));
  }
  p["points"] = std::move(grid);
  p["nodes"] = {{"s", grid_json(s.s_nodes, s.rows, s.cols)}, {"t", grid_json(s.t_nodes, s.rows, s.cols)}};
  if (!s.weights.empty()) p["weights"] = grid_json(s.weights, s.rows, s.cols);
  return p;
}

// Canonical rendering ------------------------------------------------------

std::string format_real(double x) {
  if (!std::isfinite(x)) return "null";
  if (x == 0.0) return "0.0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s = buf;
  // Keep the value typed as a real when %g drops the fraction.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

bool is_scalar_array(const json& j) {
  for (const auto& v : j) {
    if (v.is_structured()) return false;
  }
  return true;
}

void render(const json& j, std::string& out, int indent) {
  const std::string pad(static_cast<size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map order: sorted keys
        if (!first) out += ",\n";
        first = false;
        out += inner + json(it.key()).dump() + ": ";
        render(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      if (is_scalar_array(j)) {
        out += "[";
        for (size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          render(j[i], out, indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        render(j[i], out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float:
      out += format_real(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

ModelDocument model_from_json(const json& j) {
  if (!j.is_object()) fail("", "document must be a JSON object");
  ModelDocument doc;

  const json& id = member(j, "id", "");
  if (!id.is_string() || id.get<std::string>().empty()) fail("id", "id must be a nonempty string");
  doc.id = id.get<std::string>();

  const json& kind = member(j, "kind", "");
  if (!kind.is_string() || (kind != "curve" && kind != "surface")) fail("kind", "kind must be \"curve\" or \"surface\"");

  if (auto it = j.find("metadata"); it != j.end()) {
    if (!it->is_object()) fail("metadata", "expected an object");
    auto text = [&](const char* key, std::string& dst) {
      if (auto f = it->find(key); f != it->end()) {
        if (!f->is_string()) fail(std::string("metadata/") + key, "expected a string");
        dst = f->get<std::string>();
      }
    };
    text("name", doc.metadata.name);
    text("created", doc.metadata.created);
    text("modified", doc.metadata.modified);
    doc.extra_metadata = leftovers(*it, {"name", "created", "modified"});
  }

  const json& payload = member(j, "payload", "");
  if (!payload.is_object()) fail("payload", "expected an object");
  if (kind == "curve") {
    doc.payload = read_curve(payload, "payload");
    doc.extra_payload = leftovers(payload, {"dimension", "order", "closed", "allow_discontinuity", "points", "nodes", "weights"});
  } else {
    doc.payload = read_surface(payload, "payload");
    doc.extra_payload = leftovers(payload, {"orders", "closed_s", "closed_t", "allow_discontinuity", "points", "nodes", "weights"});
  }
  doc.extra = leftovers(j, {"id", "kind", "metadata", "payload"});

  auto diags = validate_model(doc);
  if (has_errors(diags)) {
    const auto& first = *std::find_if(diags.begin(), diags.end(),
                                      [](const Diagnostic& d) { return d.severity == Severity::Error; });
    const std::string path = "payload/" + first.path;
    throw ParseError(path, path + ": " + first.message, std::move(diags));
  }
  return doc;
}

ModelDocument parse_model(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("malformed JSON: ") + e.what());
  }
  return model_from_json(j);
}

json model_to_json(const ModelDocument& doc) {
  json j = doc.extra.is_object() ? doc.extra : json::object();
  j["id"] = doc.id;
  j["kind"] = doc.kind();
  json meta = doc.extra_metadata.is_object() ? doc.extra_metadata : json::object();
  meta["name"] = doc.metadata.name;
  meta["created"] = doc.metadata.created;
  meta["modified"] = doc.metadata.modified;
  j["metadata"] = std::move(meta);
  json payload = doc.is_curve() ? write_curve(doc.curve()) : write_surface(doc.surface());
  if (doc.extra_payload.is_object()) {
    for (auto it = doc.extra_payload.begin(); it != doc.extra_payload.end(); ++it) {
      if (!payload.contains(it.key())) payload[it.key()] = it.value();
    }
  }
  j["payload"] = std::move(payload);
  return j;
}

std::string canonical_json(const json& j) {
  std::string out;
  render(j, out, 0);
  out += "\n";
  return out;
}

std::string serialize_model(const ModelDocument& doc) { return canonical_json(model_to_json(doc)); }

Diagnostics validate_model(const ModelDocument& doc) {
  return doc.is_curve() ? validate_curve(doc.curve()) : validate_surface(doc.surface());
}

// Wire formats -------------------------------------------------------------

json point_to_json(const Vec3& p, int dimension) { return point_json(p, dimension); }

json to_json(const Diagnostics& diags) {
  json a = json::array();
  for (const auto& d : diags) {
    a.push_back({{"severity", to_string(d.severity)}, {"code", d.code}, {"path", d.path}, {"message", d.message}});
  }
  return a;
}

json to_json(const FeatureReport& r) {
  json vs = json::array();
  for (const auto& v : r.vertices) {
    json e = {{"index", v.index}, {"class", to_string(v.kind)}};
    if (v.constancy) e["constancy"] = {v.constancy->lo, v.constancy->hi};
    vs.push_back(std::move(e));
  }
  json es = json::array();
  for (const auto& e : r.edges) {
    json o = {{"from", e.from}, {"to", e.to}, {"class", to_string(e.kind)}};
    if (e.straight) o["interval"] = {e.straight->lo, e.straight->hi};
    es.push_back(std::move(o));
  }
  return {{"vertices", std::move(vs)}, {"edges", std::move(es)}};
}

json to_json(const Polyline& pl) {
  json params = json::array(), pts = json::array();
  for (const auto& s : pl.samples) {
    params.push_back(s.t);
    pts.push_back(point_json(s.point, pl.dimension));
  }
  return {{"type", "polyline"}, {"closed", pl.closed}, {"dimension", pl.dimension},
          {"params", std::move(params)}, {"points", std::move(pts)}};
}

json to_json(const QuadMesh& m) {
  json pos = json::array(), nor = json::array(), quads = json::array();
  for (const auto& p : m.positions) pos.push_back(point_json(p, 3));
  for (const auto& n : m.normals) nor.push_back(point_json(n, 3));
  for (const auto& q : m.quads) quads.push_back({q[0], q[1], q[2], q[3]});
  return {{"type", "quadmesh"},
          {"res", {m.res_s, m.res_t}},
          {"closed", {m.closed_s, m.closed_t}},
          {"s_params", m.s_params},
          {"t_params", m.t_params},
          {"positions", std::move(pos)},
          {"normals", std::move(nor)},
          {"quads", std::move(quads)}};
}

}  // namespace mospline
