#include "sitehunt/service.hpp"

#include <httplib.h>

#include "sitehunt/io.hpp"
#include "sitehunt/record.hpp"

namespace sitehunt {

namespace {

using OJson = nlohmann::ordered_json;
using Json = nlohmann::json;

constexpr std::size_t kSamplePosts = 3;

ApiResponse error(int status, std::string_view code, std::string_view message) {
  OJson body;
  body["code"] = code;
  body["message"] = message;
  return {status, std::move(body)};
}

ApiResponse with_cycle(ApiResponse response, int cycle) {
  response.body["cycle"] = cycle;
  return response;
}

ApiResponse not_found(std::string_view id) {
  return error(404, "not_found", "unknown session '" + std::string(id) + "'");
}

std::optional<Json> parse_body(std::string_view body) {
  try {
    Json j = Json::parse(body.empty() ? std::string_view("{}") : body);
    if (j.is_object()) return j;
  } catch (const Json::parse_error&) {
  }
  return std::nullopt;
}

template <class T>
std::optional<T> optional_field(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

}  // namespace

SessionService::SessionService(ServiceOptions options) : options_(std::move(options)) {}

void SessionService::add_corpus(CorpusBundle bundle) {
  std::lock_guard lock(mutex_);
  std::string id = bundle.id;
  corpora_[id] = std::move(bundle);
}

std::shared_ptr<SessionService::Entry> SessionService::find(std::string_view session_id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(session_id);
  return it == sessions_.end() ? nullptr : it->second;
}

OJson SessionService::label_json(const Entry& entry, Label label) const {
  if (!entry.bundle.labels) return nullptr;
  return to_string(label);
}

OJson SessionService::descriptor(const Entry& entry) const {
  const auto& config = entry.session->record().config;
  OJson j;
  j["session_id"] = entry.id;
  j["corpus"] = entry.bundle.id;
  j["criterion"] = to_string(config.criterion);
  j["status"] = to_string(entry.session->status());
  j["cycle"] = entry.session->execution().current_cycle();
  j["current_cycle"] = entry.session->execution().current_cycle();
  j["top_k"] = config.top_k;
  j["max_cycles"] = config.max_cycles;
  j["labels_available"] = static_cast<bool>(entry.bundle.labels);
  return j;
}

OJson SessionService::candidates_json(const Entry& entry) const {
  const auto& execution = entry.session->execution();
  const Corpus& corpus = execution.corpus();
  OJson list = OJson::array();
  int rank = 0;
  for (const auto& c : entry.session->pending_candidates()) {
    OJson site;
    site["rank"] = ++rank;
    site["website"] = c.score.website;
    site["label"] = label_json(entry, execution.labels().lookup(c.score.website));
    site["h_index"] = c.score.h_index;
    site["most_pop_share_count"] = c.score.most_pop_share_count;
    site["total_shares"] = c.score.total_shares;
    site["total_distinct_sharers"] = c.score.total_distinct_sharers;
    site["fallback"] = c.fallback;
    site["urls"] = OJson::array();
    for (const auto& u : c.urls) {
      OJson url;
      url["url"] = u.url;
      url["total_shares"] = u.total_shares;
      url["distinct_sharers"] = u.distinct_sharers;
      OJson samples = OJson::array();
      if (auto id = corpus.find_url(u.url)) {
        for (auto si : corpus.url_shares(*id)) {
          const auto& share = corpus.shares()[si];
          if (!execution.users().contains(share.user)) continue;
          samples.push_back(corpus.posts()[share.post].post_id);
          if (samples.size() == kSamplePosts) break;
        }
      }
      url["sample_post_ids"] = std::move(samples);
      site["urls"].push_back(std::move(url));
    }
    list.push_back(std::move(site));
  }
  return list;
}

void SessionService::persist(const Entry& entry) const {
  if (!options_.record_dir) return;
  write_file_atomic(*options_.record_dir / (entry.id + ".json"), serialize_record(entry.session->record()));
}

ApiResponse SessionService::create_session(std::string_view body) {
  auto request = parse_body(body);
  if (!request) return error(400, "bad_request", "request body must be a JSON object");

  std::string corpus_id;
  std::string seed;
  ExecutionConfig config;
  try {
    corpus_id = optional_field<std::string>(*request, "corpus").value_or("default");
    auto seed_field = optional_field<std::string>(*request, "initial_seed");
    if (!seed_field) return error(400, "validation", "initial_seed is required");
    seed = *seed_field;
    config.criterion = parse_criterion(optional_field<std::string>(*request, "criterion").value_or("hindex"));
    config.top_k = optional_field<int>(*request, "top_k").value_or(options_.default_top_k);
    config.max_cycles = optional_field<int>(*request, "max_cycles").value_or(options_.default_max_cycles);
    config.rng_seed = optional_field<std::uint64_t>(*request, "rng_seed").value_or(0);
    config.ranking_depth = options_.ranking_depth;
    config.validate();
  } catch (const std::exception& e) {
    return error(400, "validation", e.what());
  }

  CorpusBundle bundle;
  {
    std::lock_guard lock(mutex_);
    auto it = corpora_.find(corpus_id);
    if (it == corpora_.end()) return error(400, "validation", "unknown corpus '" + corpus_id + "'");
    bundle = it->second;
  }

  auto entry = std::make_shared<Entry>();
  entry->bundle = std::move(bundle);
  const LabelSet& labels = entry->bundle.labels ? *entry->bundle.labels : entry->empty_labels;
  try {
    entry->session = std::make_unique<Session>(*entry->bundle.corpus, labels, *entry->bundle.denylist, seed, config);
  } catch (const EngineError& e) {
    return error(400, "validation", e.what());
  }

  {
    std::lock_guard lock(mutex_);
    entry->id = "s" + std::to_string(next_session_++);
    sessions_[entry->id] = entry;
  }
  persist(*entry);
  return {201, descriptor(*entry)};
}

ApiResponse SessionService::get_candidates(std::string_view session_id) {
  auto entry = find(session_id);
  if (!entry) return not_found(session_id);
  std::shared_lock lock(entry->mutex);
  if (entry->session->status() == SessionStatus::finished) {
    const int cycle = entry->session->execution().current_cycle();
    return with_cycle(error(409, "conflict", "session is finished"), cycle);
  }
  OJson j = descriptor(*entry);
  j["candidates"] = candidates_json(*entry);
  return {200, std::move(j)};
}

ApiResponse SessionService::post_seed_choice(std::string_view session_id, std::string_view body) {
  auto entry = find(session_id);
  if (!entry) return not_found(session_id);
  std::unique_lock lock(entry->mutex);
  const int cycle = entry->session->execution().current_cycle();
  auto request = parse_body(body);
  if (!request) return with_cycle(error(400, "bad_request", "request body must be a JSON object"), cycle);
  auto url_field = request->find("url");
  if (url_field == request->end() || !url_field->is_string()) {
    return with_cycle(error(400, "validation", "url must be a string"), cycle);
  }
  if (entry->session->status() == SessionStatus::finished) {
    return with_cycle(error(409, "conflict", "session is finished"), cycle);
  }
  try {
    entry->session->choose_seed(url_field->get<std::string>());
  } catch (const ChoiceError& e) {
    return with_cycle(error(400, "validation", e.what()), cycle);
  }
  persist(*entry);

  OJson j = descriptor(*entry);
  j["cycle"] = cycle;
  const auto& cycles = entry->session->record().cycles;
  j["cycle_record"] = to_json(cycles[static_cast<std::size_t>(cycle - 1)]);
  if (entry->session->status() == SessionStatus::awaiting_choice) {
    j["next_cycle"] = entry->session->execution().current_cycle();
  } else {
    j["next_cycle"] = nullptr;
  }
  return {200, std::move(j)};
}

ApiResponse SessionService::get_history(std::string_view session_id) {
  auto entry = find(session_id);
  if (!entry) return not_found(session_id);
  std::shared_lock lock(entry->mutex);
  OJson j = descriptor(*entry);
  j["record"] = to_json(entry->session->record());
  return {200, std::move(j)};
}

ApiResponse SessionService::export_discovered(std::string_view session_id) {
  auto entry = find(session_id);
  if (!entry) return not_found(session_id);
  std::shared_lock lock(entry->mutex);
  OJson j = descriptor(*entry);
  OJson list = OJson::array();
  for (const auto& d : entry->session->record().discovered) {
    OJson item;
    item["website"] = d.website;
    item["label"] = label_json(*entry, d.label);
    item["cycle"] = d.cycle;
    list.push_back(std::move(item));
  }
  j["discovered"] = std::move(list);
  return {200, std::move(j)};
}

ApiResponse SessionService::health() const {
  OJson j;
  j["status"] = "ok";
  std::lock_guard lock(mutex_);
  j["sessions"] = sessions_.size();
  j["corpora"] = OJson::array();
  for (const auto& [id, bundle] : corpora_) j["corpora"].push_back(id);
  return {200, std::move(j)};
}

void register_routes(httplib::Server& server, SessionService& service) {
  auto reply = [](httplib::Response& res, const ApiResponse& api) {
    res.status = api.status;
    res.set_content(api.body.dump(), "application/json");
  };
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  server.Get("/healthz", [&, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, service.health());
  });
  server.Post("/sessions", [&, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.create_session(req.body));
  });
  server.Get(R"(/sessions/([^/]+)/candidates)", [&, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.get_candidates(req.matches[1].str()));
  });
  server.Post(R"(/sessions/([^/]+)/seed)", [&, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.post_seed_choice(req.matches[1].str(), req.body));
  });
  server.Get(R"(/sessions/([^/]+)/history)", [&, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.get_history(req.matches[1].str()));
  });
  server.Get(R"(/sessions/([^/]+)/export)", [&, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.export_discovered(req.matches[1].str()));
  });
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      OJson body;
      body["code"] = res.status == 404 ? "not_found" : "error";
      body["message"] = "no such endpoint";
      res.set_content(body.dump(), "application/json");
    }
  });
}

}  // namespace sitehunt
