#include "mospline/service.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <mutex>
#include <sstream>

namespace mospline {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::variant<MovingCurve, MovingSurface> build(const ModelDocument& doc) {
  if (doc.is_curve()) return MovingCurve(doc.curve());
  return MovingSurface(doc.surface());
}

// Everything except the timestamps decides whether a PUT changes anything.
json content_key(const ModelDocument& doc) {
  json j = model_to_json(doc);
  j["metadata"].erase("created");
  j["metadata"].erase("modified");
  return j;
}

}  // namespace

// ModelStore ---------------------------------------------------------------

ModelStore::ModelStore(std::optional<fs::path> data_dir) : data_dir_(std::move(data_dir)) {
  if (data_dir_) {
    fs::create_directories(*data_dir_);
    load_snapshots();
  }
}

bool ModelStore::valid_id(const std::string& id) {
  if (id.empty() || id.size() > 128 || id.front() == '.') return false;
  for (char c : id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    if (!ok) return false;
  }
  return true;
}

std::vector<std::shared_ptr<const StoredModel>> ModelStore::list() const {
  std::shared_lock lock(mutex_);
  std::vector<std::shared_ptr<const StoredModel>> out;
  for (const auto& [id, m] : models_) out.push_back(m);
  return out;
}

std::shared_ptr<const StoredModel> ModelStore::get(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = models_.find(id);
  return it == models_.end() ? nullptr : it->second;
}

ModelStore::PutResult ModelStore::put(ModelDocument doc, std::optional<std::uint64_t> expected) {
  if (!valid_id(doc.id)) throw InvalidArgument("invalid-id", "model id must match [A-Za-z0-9_.-]+");
  auto diags = validate_model(doc);
  if (has_errors(diags)) throw ValidationError(std::move(diags));
  auto model = build(doc);  // outside the lock: may be slow for big nets

  std::unique_lock lock(mutex_);
  auto it = models_.find(doc.id);
  const std::uint64_t current = it == models_.end() ? 0 : it->second->revision;
  if (expected && *expected != current) return {PutStatus::Conflict, current};

  if (it != models_.end() && content_key(it->second->doc) == content_key(doc)) {
    return {PutStatus::Unchanged, current};
  }

  const std::string now = utc_now();
  if (it != models_.end()) {
    doc.metadata.created = it->second->doc.metadata.created;
  } else if (doc.metadata.created.empty()) {
    doc.metadata.created = now;
  }
  doc.metadata.modified = now;

  auto& last = last_revision_[doc.id];
  last = std::max(last, current) + 1;
  auto stored = std::make_shared<const StoredModel>(StoredModel{std::move(doc), last, std::move(model)});
  const PutStatus status = it == models_.end() ? PutStatus::Created : PutStatus::Updated;
  models_[stored->doc.id] = stored;
  persist(*stored);
  return {status, stored->revision};
}

bool ModelStore::erase(const std::string& id) {
  std::unique_lock lock(mutex_);
  auto it = models_.find(id);
  if (it == models_.end()) return false;
  models_.erase(it);
  if (data_dir_) {
    std::error_code ec;
    fs::remove(*data_dir_ / (id + ".json"), ec);
  }
  return true;
}

void ModelStore::persist(const StoredModel& m) const {
  if (!data_dir_) return;
  const fs::path target = *data_dir_ / (m.doc.id + ".json");
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << serialize_model(m.doc);
  }
  fs::rename(tmp, target);
}

void ModelStore::load_snapshots() {
  for (const auto& entry : fs::directory_iterator(*data_dir_)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      ModelDocument doc = parse_model(ss.str());
      if (!valid_id(doc.id)) continue;
      auto model = build(doc);
      const std::string id = doc.id;
      models_[id] = std::make_shared<const StoredModel>(StoredModel{std::move(doc), 1, std::move(model)});
      last_revision_[id] = 1;
    } catch (const Error& e) {
      spdlog::warn("skipping snapshot {}: {}", entry.path().string(), e.what());
    }
  }
}

// HTTP ---------------------------------------------------------------------

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(canonical_json(body), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message,
                const json& diagnostics = json::array()) {
  send_json(res, status, {{"error", code}, {"message", message}, {"diagnostics", diagnostics}});
}

json single_diag(const std::string& code, const std::string& path, const std::string& message) {
  return to_json(Diagnostics{{Severity::Error, code, path, message}});
}

// Maps library errors onto statuses; domain problems are never 500.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const json::exception& e) {
    send_error(res, 400, "malformed-request", e.what());
  } catch (const ParseError& e) {
    if (e.diagnostics().empty() && e.path().empty()) {
      send_error(res, 400, "malformed-json", e.what());
    } else {
      json diags = e.diagnostics().empty() ? single_diag("schema", e.path(), e.what()) : to_json(e.diagnostics());
      send_error(res, 422, "validation-failed", e.what(), diags);
    }
  } catch (const ValidationError& e) {
    send_error(res, 422, e.code(), e.what(), to_json(e.diagnostics()));
  } catch (const InvalidArgument& e) {
    send_error(res, 400, e.code(), e.what());
  } catch (const Error& e) {
    send_error(res, 422, e.code(), e.what(), single_diag(e.code(), "", e.what()));
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    send_error(res, 500, "internal", e.what());
  }
}

json parse_body(const httplib::Request& req, bool allow_empty) {
  if (req.body.empty()) {
    if (allow_empty) return json::object();
    throw ParseError("", "request body is empty");
  }
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("malformed JSON: ") + e.what());
  }
}

std::optional<std::uint64_t> if_match(const httplib::Request& req) {
  if (!req.has_header("If-Match")) return std::nullopt;
  std::string v = req.get_header_value("If-Match");
  std::string digits;
  for (char c : v) {
    if (std::isdigit(static_cast<unsigned char>(c))) digits += c;
  }
  if (digits.empty()) throw InvalidArgument("If-Match must carry a revision number");
  return std::stoull(digits);
}

void set_revision(httplib::Response& res, std::uint64_t rev) { res.set_header("ETag", "\"" + std::to_string(rev) + "\""); }

json summary(const StoredModel& m) {
  json meta = {{"name", m.doc.metadata.name}, {"created", m.doc.metadata.created}, {"modified", m.doc.metadata.modified}};
  return {{"id", m.doc.id}, {"kind", m.doc.kind()}, {"revision", m.revision}, {"metadata", meta}};
}

const char* status_name(ModelStore::PutStatus s) {
  switch (s) {
    case ModelStore::PutStatus::Created: return "created";
    case ModelStore::PutStatus::Updated: return "updated";
    case ModelStore::PutStatus::Unchanged: return "unchanged";
    case ModelStore::PutStatus::Conflict: return "conflict";
  }
  return "";
}

json evaluate(const StoredModel& m, const json& body) {
  const json& params = body.at("params");
  if (!params.is_array()) throw InvalidArgument("malformed-request", "params must be an array");
  json points = json::array();
  json diags = json::array();
  for (size_t q = 0; q < params.size(); ++q) {
    const json& p = params[q];
    const std::string path = "params/" + std::to_string(q);
    const size_t want = std::holds_alternative<MovingCurve>(m.model) ? 1 : 2;
    if (!p.is_array() || p.size() != want) {
      throw InvalidArgument("malformed-request", path + ": expected " + std::to_string(want) + " parameter value(s)");
    }
    for (const auto& x : p) {
      if (!x.is_number()) throw InvalidArgument("malformed-request", path + ": parameters must be numbers");
    }
    try {
      if (const auto* c = std::get_if<MovingCurve>(&m.model)) {
        points.push_back(point_to_json(c->eval(p[0].get<double>()), c->dimension()));
      } else {
        const auto& sf = std::get<MovingSurface>(m.model);
        points.push_back(point_to_json(sf.eval(p[0].get<double>(), p[1].get<double>()), 3));
      }
    } catch (const Error& e) {
      diags.push_back({{"severity", "error"}, {"code", e.code()}, {"path", path}, {"message", e.what()}});
    }
  }
  if (!diags.empty()) return {{"error", diags[0]["code"]}, {"diagnostics", diags}};
  return {{"revision", m.revision}, {"points", points}};
}

json tessellate(const StoredModel& m, const json& body) {
  if (const auto* c = std::get_if<MovingCurve>(&m.model)) {
    int per_gap = 32;
    if (auto it = body.find("samples_per_gap"); it != body.end()) per_gap = it->get<int>();
    json out = to_json(tessellate_curve(*c, per_gap));
    out["revision"] = m.revision;
    return out;
  }
  int rs = 32, rt = 32;
  if (auto it = body.find("res"); it != body.end()) {
    if (!it->is_array() || it->size() != 2) throw InvalidArgument("malformed-request", "res must be [res_s, res_t]");
    rs = (*it)[0].get<int>();
    rt = (*it)[1].get<int>();
  }
  json out = to_json(tessellate_surface(std::get<MovingSurface>(m.model), rs, rt));
  out["revision"] = m.revision;
  return out;
}

}  // namespace

Service::Service(ServiceOptions options) : options_(std::move(options)), store_(options_.data_dir) {}

void Service::install(httplib::Server& srv) {
  const std::string origin = options_.cors_origin;
  srv.set_default_headers({{"Access-Control-Allow-Origin", origin},
                           {"Access-Control-Allow-Methods", "GET, PUT, POST, DELETE, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type, If-Match"},
                           {"Access-Control-Expose-Headers", "ETag"}});
  srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  srv.set_logger([](const httplib::Request& req, const httplib::Response& res) {
    spdlog::info("{} {} -> {}", req.method, req.path, res.status);
  });

  srv.Get("/api/models", [this](const httplib::Request&, httplib::Response& res) {
    json arr = json::array();
    for (const auto& m : store_.list()) arr.push_back(summary(*m));
    send_json(res, 200, {{"models", arr}});
  });

  srv.Get(R"(/api/models/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    auto m = store_.get(req.matches[1]);
    if (!m) return send_error(res, 404, "not-found", "no model '" + std::string(req.matches[1]) + "'");
    set_revision(res, m->revision);
    send_json(res, 200, {{"revision", m->revision}, {"document", model_to_json(m->doc)}});
  });

  srv.Put(R"(/api/models/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string id = req.matches[1];
      if (!ModelStore::valid_id(id)) throw InvalidArgument("invalid-id", "model id must match [A-Za-z0-9_.-]+");
      json body = parse_body(req, false);
      if (body.is_object() && !body.contains("id")) body["id"] = id;
      ModelDocument doc = model_from_json(body);
      if (doc.id != id) throw InvalidArgument("id-mismatch", "document id '" + doc.id + "' differs from URL id '" + id + "'");
      const auto warnings = validate_model(doc);
      const auto r = store_.put(std::move(doc), if_match(req));
      set_revision(res, r.revision);
      if (r.status == ModelStore::PutStatus::Conflict) {
        return send_error(res, 409, "revision-conflict",
                          "stale revision; current revision is " + std::to_string(r.revision));
      }
      send_json(res, r.status == ModelStore::PutStatus::Created ? 201 : 200,
                {{"id", id}, {"revision", r.revision}, {"status", status_name(r.status)}, {"diagnostics", to_json(warnings)}});
    });
  });

  srv.Delete(R"(/api/models/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    if (!store_.erase(req.matches[1])) {
      return send_error(res, 404, "not-found", "no model '" + std::string(req.matches[1]) + "'");
    }
    res.status = 204;
  });

  srv.Post(R"(/api/models/([^/]+)/evaluate)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto m = store_.get(req.matches[1]);
      if (!m) return send_error(res, 404, "not-found", "no model '" + std::string(req.matches[1]) + "'");
      json out = evaluate(*m, parse_body(req, false));
      set_revision(res, m->revision);
      if (out.contains("error")) {
        return send_error(res, 422, out["error"].get<std::string>(), "evaluation failed", out["diagnostics"]);
      }
      send_json(res, 200, out);
    });
  });

  srv.Post(R"(/api/models/([^/]+)/tessellate)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto m = store_.get(req.matches[1]);
      if (!m) return send_error(res, 404, "not-found", "no model '" + std::string(req.matches[1]) + "'");
      json out = tessellate(*m, parse_body(req, true));
      set_revision(res, m->revision);
      send_json(res, 200, out);
    });
  });

  srv.Get(R"(/api/models/([^/]+)/features)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto m = store_.get(req.matches[1]);
      if (!m) return send_error(res, 404, "not-found", "no model '" + std::string(req.matches[1]) + "'");
      const auto* c = std::get_if<MovingCurve>(&m->model);
      if (!c) return send_error(res, 422, "not-a-curve", "feature classification is defined for curves");
      json out = to_json(classify_features(*c));
      out["revision"] = m->revision;
      set_revision(res, m->revision);
      send_json(res, 200, out);
    });
  });

  srv.Get("/api/fixtures", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"fixtures", fixture_names()}});
  });

  srv.Post(R"(/api/fixtures/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req, true);
      FixtureParams params;
      if (auto it = body.find("params"); it != body.end()) {
        for (auto p = it->begin(); p != it->end(); ++p) params[p.key()] = p.value().get<double>();
      }
      ModelDocument doc;
      try {
        doc = make_fixture(std::string(req.matches[1]), params);
      } catch (const InvalidArgument& e) {
        if (e.code() == "unknown-fixture") return send_error(res, 404, e.code(), e.what());
        throw;
      }
      if (auto it = body.find("id"); it != body.end()) doc.id = it->get<std::string>();
      const auto r = store_.put(doc);
      set_revision(res, r.revision);
      auto m = store_.get(doc.id);
      send_json(res, r.status == ModelStore::PutStatus::Created ? 201 : 200,
                {{"id", doc.id}, {"revision", r.revision}, {"status", status_name(r.status)}, {"document", model_to_json(m->doc)}});
    });
  });

  srv.Get("/docs/schema", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(model_schema(), "application/schema+json");
  });

  if (options_.static_dir) {
    srv.set_mount_point("/", options_.static_dir->string());
  } else {
    srv.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("mospline service: see /api/models and /docs/schema\n", "text/plain");
    });
  }
}

bool Service::run() {
  httplib::Server srv;
  install(srv);
  spdlog::info("listening on {}:{}", options_.host, options_.port);
  return srv.listen(options_.host, options_.port);
}

}  // namespace mospline
