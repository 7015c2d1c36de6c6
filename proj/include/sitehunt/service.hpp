#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include <json.hpp>

#include "sitehunt/corpus.hpp"
#include "sitehunt/engine.hpp"

namespace httplib {
class Server;
}

namespace sitehunt {

/// Inputs a session runs against. `labels` may be null, in which case no
/// label is ever reported.
struct CorpusBundle {
  std::string id;
  std::shared_ptr<const Corpus> corpus;
  std::shared_ptr<const LabelSet> labels;
  std::shared_ptr<const Denylist> denylist;
};

struct ServiceOptions {
  /// When set, every session's execution record is rewritten here after
  /// each state change.
  std::optional<std::filesystem::path> record_dir;
  int default_top_k = 10;
  int default_max_cycles = 30;
  int ranking_depth = 10;
};

struct ApiResponse {
  int status = 200;
  nlohmann::ordered_json body;
};

/// Transport-independent session API. Error bodies are {code, message};
/// a 4xx response never changes state.
///
/// Requests on one session are serialized; requests on different sessions
/// run concurrently.
class SessionService {
 public:
  explicit SessionService(ServiceOptions options = {});

  void add_corpus(CorpusBundle bundle);

  ApiResponse create_session(std::string_view body);
  ApiResponse get_candidates(std::string_view session_id);
  ApiResponse post_seed_choice(std::string_view session_id, std::string_view body);
  ApiResponse get_history(std::string_view session_id);
  ApiResponse export_discovered(std::string_view session_id);
  ApiResponse health() const;

 private:
  struct Entry {
    std::string id;
    CorpusBundle bundle;
    LabelSet empty_labels;
    std::unique_ptr<Session> session;
    mutable std::shared_mutex mutex;
  };

  std::shared_ptr<Entry> find(std::string_view session_id) const;
  nlohmann::ordered_json label_json(const Entry& entry, Label label) const;
  nlohmann::ordered_json descriptor(const Entry& entry) const;
  nlohmann::ordered_json candidates_json(const Entry& entry) const;
  void persist(const Entry& entry) const;

  ServiceOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, CorpusBundle, std::less<>> corpora_;
  std::map<std::string, std::shared_ptr<Entry>, std::less<>> sessions_;
  std::uint64_t next_session_ = 1;
};

/// Routes:
///   POST /sessions                 GET /sessions/{id}/candidates
///   POST /sessions/{id}/seed       GET /sessions/{id}/history
///   GET  /sessions/{id}/export     GET /healthz
void register_routes(httplib::Server& server, SessionService& service);

}  // namespace sitehunt
