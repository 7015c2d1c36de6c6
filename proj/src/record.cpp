#include "sitehunt/record.hpp"

#include "sitehunt/io.hpp"

namespace sitehunt {

namespace {

using OJson = nlohmann::ordered_json;
using Json = nlohmann::json;

OJson optional_string(const std::optional<std::string>& s) {
  return s ? OJson(*s) : OJson(nullptr);
}

const Json& field(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw RecordError(std::string("missing field '") + key + "'");
  return *it;
}

template <class T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const Json::exception& e) {
    throw RecordError(std::string("field '") + key + "': " + e.what());
  }
}

std::optional<std::string> get_optional_string(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_string()) throw RecordError(std::string("field '") + key + "' must be a string or null");
  return v.get<std::string>();
}

template <class Fn>
auto parse_token(const Json& j, const char* key, Fn&& parse) {
  const auto token = get<std::string>(j, key);
  try {
    return parse(token);
  } catch (const std::exception& e) {
    throw RecordError(std::string("field '") + key + "': " + e.what());
  }
}

Label label_field(const Json& j, const char* key) {
  return parse_token(j, key, [](const std::string& t) { return parse_label(t); });
}

WebsiteScore score_from_json(const Json& j) {
  return {get<std::string>(j, "website"), get<std::uint32_t>(j, "h_index"),
          get<std::uint32_t>(j, "most_pop_share_count"), get<std::uint32_t>(j, "total_shares"),
          get<std::uint32_t>(j, "total_distinct_sharers")};
}

SeedRecord seed_from_json(const Json& j) {
  SeedRecord s;
  s.url = get<std::string>(j, "url");
  s.website = get<std::string>(j, "website");
  s.cycle_added = get<int>(j, "cycle_added");
  s.origin = parse_token(j, "origin", [](const std::string& t) { return parse_seed_origin(t); });
  s.label_at_selection = label_field(j, "label_at_selection");
  return s;
}

CycleRecord cycle_from_json(const Json& j) {
  CycleRecord c;
  c.cycle_no = get<int>(j, "cycle_no");
  c.seed_url = get<std::string>(j, "seed_url");
  c.dead_seed = get<bool>(j, "dead_seed");
  c.new_users_found = get<int>(j, "new_users_found");
  c.cumulative_users = get<int>(j, "cumulative_users");
  c.ranked_websites = get<int>(j, "ranked_websites");
  for (const auto& s : field(j, "ranking")) c.ranking.push_back(score_from_json(s));
  c.top1_website = get_optional_string(j, "top1_website");
  if (c.top1_website) c.top1_label = label_field(j, "top1_label");
  const Json& sel = field(j, "selected_seed");
  if (!sel.is_null()) c.selected_seed = seed_from_json(sel);
  return c;
}

ExecutionConfig config_from_json(const Json& j) {
  ExecutionConfig c;
  c.criterion = parse_token(j, "criterion", [](const std::string& t) { return parse_criterion(t); });
  c.mode = parse_token(j, "mode", [](const std::string& t) { return parse_execution_mode(t); });
  c.seed_set = get_optional_string(j, "seed_set");
  const Json& idx = field(j, "execution_index");
  if (!idx.is_null()) c.execution_index = get<int>(j, "execution_index");
  c.rng_seed = get<std::uint64_t>(j, "rng_seed");
  c.max_cycles = get<int>(j, "max_cycles");
  c.ranking_depth = get<int>(j, "ranking_depth");
  c.top_k = get<int>(j, "top_k");
  return c;
}

}  // namespace

OJson to_json(const WebsiteScore& s) {
  OJson j;
  j["website"] = s.website;
  j["h_index"] = s.h_index;
  j["most_pop_share_count"] = s.most_pop_share_count;
  j["total_shares"] = s.total_shares;
  j["total_distinct_sharers"] = s.total_distinct_sharers;
  return j;
}

OJson to_json(const SeedRecord& s) {
  OJson j;
  j["url"] = s.url;
  j["website"] = s.website;
  j["cycle_added"] = s.cycle_added;
  j["origin"] = to_string(s.origin);
  j["label_at_selection"] = to_string(s.label_at_selection);
  return j;
}

OJson to_json(const CycleRecord& c) {
  OJson j;
  j["cycle_no"] = c.cycle_no;
  j["seed_url"] = c.seed_url;
  j["dead_seed"] = c.dead_seed;
  j["new_users_found"] = c.new_users_found;
  j["cumulative_users"] = c.cumulative_users;
  j["ranked_websites"] = c.ranked_websites;
  j["ranking"] = OJson::array();
  for (const auto& s : c.ranking) j["ranking"].push_back(to_json(s));
  j["top1_website"] = optional_string(c.top1_website);
  j["top1_label"] = c.top1_website ? OJson(to_string(c.top1_label)) : OJson(nullptr);
  j["selected_seed"] = c.selected_seed ? to_json(*c.selected_seed) : OJson(nullptr);
  return j;
}

OJson to_json(const ExecutionConfig& c) {
  OJson j;
  j["criterion"] = to_string(c.criterion);
  j["mode"] = to_string(c.mode);
  j["seed_set"] = optional_string(c.seed_set);
  j["execution_index"] = c.execution_index ? OJson(*c.execution_index) : OJson(nullptr);
  j["rng_seed"] = c.rng_seed;
  j["max_cycles"] = c.max_cycles;
  j["ranking_depth"] = c.ranking_depth;
  j["top_k"] = c.top_k;
  return j;
}

OJson to_json(const DiscoveredWebsite& d) {
  OJson j;
  j["website"] = d.website;
  j["label"] = to_string(d.label);
  j["cycle"] = d.cycle;
  return j;
}

OJson to_json(const ExecutionRecord& r) {
  OJson j;
  j["record_version"] = ExecutionRecord::kVersion;
  j["status"] = to_string(r.status);
  j["config"] = to_json(r.config);
  j["initial_seed"] = to_json(r.initial_seed);
  j["cycles"] = OJson::array();
  for (const auto& c : r.cycles) j["cycles"].push_back(to_json(c));
  j["discovered"] = OJson::array();
  for (const auto& d : r.discovered) j["discovered"].push_back(to_json(d));
  return j;
}

std::string serialize_record(const ExecutionRecord& record) {
  return to_json(record).dump(2) + "\n";
}

ExecutionRecord parse_record(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw RecordError(std::string("malformed record: ") + e.what());
  }
  if (!j.is_object()) throw RecordError("record must be a JSON object");
  const int version = get<int>(j, "record_version");
  if (version != ExecutionRecord::kVersion) {
    throw RecordError("unsupported record_version " + std::to_string(version));
  }
  ExecutionRecord r;
  r.status = parse_token(j, "status", [](const std::string& t) { return parse_execution_status(t); });
  r.config = config_from_json(field(j, "config"));
  r.initial_seed = seed_from_json(field(j, "initial_seed"));
  for (const auto& c : field(j, "cycles")) r.cycles.push_back(cycle_from_json(c));
  for (const auto& d : field(j, "discovered")) {
    r.discovered.push_back({get<std::string>(d, "website"), label_field(d, "label"), get<int>(d, "cycle")});
  }
  return r;
}

ExecutionRecord load_record(const std::filesystem::path& path) {
  try {
    return parse_record(read_file(path));
  } catch (const RecordError& e) {
    throw RecordError(path.string() + ": " + e.what());
  }
}

}  // namespace sitehunt
