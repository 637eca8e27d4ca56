#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <variant>
#include <vector>

#include "mospline/model_io.hpp"

namespace httplib {
class Server;
}

namespace mospline {

/// A stored document at one revision, with its evaluator built once.
struct StoredModel {
  ModelDocument doc;
  std::uint64_t revision = 0;
  std::variant<MovingCurve, MovingSurface> model;
};

/**
 * In-memory id -> document map with per-id revision counters.
 *
 * Readers receive immutable snapshots (shared_ptr) and never observe a
 * half-written revision. Writers replace the snapshot under a short lock.
 * With a data directory every write is mirrored to <dir>/<id>.json.
 */
class ModelStore {
 public:
  explicit ModelStore(std::optional<std::filesystem::path> data_dir = std::nullopt);

  enum class PutStatus { Created, Updated, Unchanged, Conflict };
  struct PutResult {
    PutStatus status;
    std::uint64_t revision;  // current revision after the call
  };

  std::vector<std::shared_ptr<const StoredModel>> list() const;
  std::shared_ptr<const StoredModel> get(const std::string& id) const;

  /// Stores `doc` under doc.id. `expected_revision`, when given, must match
  /// the current revision (0 meaning "absent"). A payload identical to the
  /// stored one keeps the revision. Throws ValidationError for invalid docs.
  PutResult put(ModelDocument doc, std::optional<std::uint64_t> expected_revision = std::nullopt);

  bool erase(const std::string& id);

  static bool valid_id(const std::string& id);

 private:
  void persist(const StoredModel& m) const;
  void load_snapshots();

  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const StoredModel>> models_;
  std::map<std::string, std::uint64_t> last_revision_;  // survives deletes
  std::optional<std::filesystem::path> data_dir_;
};

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> data_dir;
  std::optional<std::filesystem::path> static_dir;
  std::string cors_origin = "*";
};

/// HTTP/JSON front end over a ModelStore.
class Service {
 public:
  explicit Service(ServiceOptions options);

  ModelStore& store() noexcept { return store_; }
  const ServiceOptions& options() const noexcept { return options_; }

  /// Registers every route on `server`.
  void install(httplib::Server& server);

  /// Binds and serves until the process is stopped. Returns false when the
  /// port cannot be bound.
  bool run();

 private:
  ServiceOptions options_;
  ModelStore store_;
};

}  // namespace mospline
