#include "sitehunt/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>
#include <utility>

#include <json.hpp>

namespace sitehunt {

namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(ws) - first + 1);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open " + path.string());
  return in;
}

std::string line_prefix(std::size_t line_no) {
  return "line " + std::to_string(line_no) + ": ";
}

Post parse_post(const std::string& line, std::size_t line_no) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw CorpusError(line_prefix(line_no) + "malformed JSON (" + e.what() + ")");
  }
  if (!j.is_object()) throw CorpusError(line_prefix(line_no) + "expected a JSON object");

  auto require = [&](const char* key) -> const Json& {
    auto it = j.find(key);
    if (it == j.end()) throw CorpusError(line_prefix(line_no) + "missing field '" + key + "'");
    return *it;
  };

  Post post;
  const Json& id = require("post_id");
  const Json& user = require("user_id");
  const Json& ts = require("timestamp");
  const Json& urls = require("urls");
  if (!id.is_string() || id.get_ref<const std::string&>().empty()) {
    throw CorpusError(line_prefix(line_no) + "post_id must be a non-empty string");
  }
  if (!user.is_string() || user.get_ref<const std::string&>().empty()) {
    throw CorpusError(line_prefix(line_no) + "user_id must be a non-empty string");
  }
  if (!ts.is_number_integer() || ts.get<std::int64_t>() < 0) {
    throw CorpusError(line_prefix(line_no) + "timestamp must be a non-negative integer");
  }
  if (!urls.is_array()) throw CorpusError(line_prefix(line_no) + "urls must be an array");
  post.post_id = id.get<std::string>();
  post.user_id = user.get<std::string>();
  post.timestamp = ts.get<std::int64_t>();
  for (const auto& u : urls) {
    if (!u.is_string() || u.get_ref<const std::string&>().empty()) {
      throw CorpusError(line_prefix(line_no) + "urls must contain non-empty strings");
    }
    post.urls.push_back(u.get<std::string>());
  }
  return post;
}

template <class Map, class Names>
std::uint32_t intern(Map& ids, Names& names, const std::string& key) {
  auto [it, inserted] = ids.try_emplace(key, static_cast<std::uint32_t>(names.size()));
  if (inserted) names.push_back(key);
  return it->second;
}

std::pair<std::string_view, std::string_view> split_pair(std::string_view line, std::size_t line_no) {
  const auto comma = line.find(',');
  if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
    throw CorpusError(line_prefix(line_no) + "expected two comma-separated fields");
  }
  return {trim(line.substr(0, comma)), trim(line.substr(comma + 1))};
}

// Calls fn(content, line_no) for every non-blank, non-comment line.
template <class Fn>
void for_each_record(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view content = trim(line);
    if (content.empty() || content.starts_with('#')) continue;
    fn(content, line_no);
  }
}

}  // namespace

std::string_view to_string(Label label) {
  switch (label) {
    case Label::fake:
      return "fake";
    case Label::credible:
      return "credible";
    case Label::unknown:
      break;
  }
  return "unknown";
}

Label parse_label(std::string_view token) {
  if (token == "fake") return Label::fake;
  if (token == "credible") return Label::credible;
  if (token == "unknown") return Label::unknown;
  throw CorpusError("unknown label '" + std::string(token) + "'");
}

Corpus::Corpus(std::vector<Post> posts, const SuffixList& suffixes, TimeWindow window) : suffixes_(&suffixes) {
  {
    std::unordered_set<std::string_view> seen;
    for (const auto& p : posts) {
      if (!seen.insert(p.post_id).second) throw CorpusError("duplicate post_id '" + p.post_id + "'");
    }
  }
  posts_.reserve(posts.size());
  for (auto& p : posts) {
    if (window.contains(p.timestamp)) {
      posts_.push_back(std::move(p));
    } else {
      ++filtered_posts_;
    }
  }

  std::vector<UrlId> post_urls;
  for (std::uint32_t pi = 0; pi < posts_.size(); ++pi) {
    const Post& post = posts_[pi];
    const UserId user = intern(user_ids_, users_, post.user_id);
    if (user == user_posts_.size()) {
      user_posts_.emplace_back();
      user_shares_.emplace_back();
    }
    user_posts_[user].push_back(pi);

    post_urls.clear();
    for (const auto& raw : post.urls) {
      NormalizedUrl norm;
      try {
        norm = normalize_url(raw, suffixes);
      } catch (const UrlError&) {
        ++dropped_urls_;
        continue;
      }
      const WebsiteId site = intern(website_ids_, websites_, norm.website);
      if (site == website_urls_.size()) website_urls_.emplace_back();
      const UrlId url = intern(url_ids_, urls_, norm.canonical);
      if (url == url_website_.size()) {
        url_website_.push_back(site);
        url_shares_.emplace_back();
        url_sharers_.emplace_back();
        website_urls_[site].push_back(url);
      }
      if (std::find(post_urls.begin(), post_urls.end(), url) != post_urls.end()) continue;
      post_urls.push_back(url);

      const auto share_index = static_cast<std::uint32_t>(shares_.size());
      shares_.push_back(Share{pi, user, url});
      user_shares_[user].push_back(share_index);
      url_shares_[url].push_back(share_index);
      url_sharers_[url].push_back(user);
    }
  }
  for (auto& sharers : url_sharers_) {
    std::sort(sharers.begin(), sharers.end());
    sharers.erase(std::unique(sharers.begin(), sharers.end()), sharers.end());
  }
}

std::optional<UserId> Corpus::find_user(std::string_view name) const {
  auto it = user_ids_.find(std::string(name));
  if (it == user_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<UrlId> Corpus::find_url(std::string_view canonical) const {
  auto it = url_ids_.find(std::string(canonical));
  if (it == url_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<WebsiteId> Corpus::find_website(std::string_view domain) const {
  auto it = website_ids_.find(std::string(domain));
  if (it == website_ids_.end()) return std::nullopt;
  return it->second;
}

std::map<std::string, std::vector<std::string>> Corpus::user_index() const {
  std::map<std::string, std::vector<std::string>> out;
  for (UserId u = 0; u < users_.size(); ++u) {
    auto& ids = out[users_[u]];
    for (auto pi : user_posts_[u]) ids.push_back(posts_[pi].post_id);
  }
  return out;
}

std::map<std::string, std::set<std::string>> Corpus::url_index() const {
  std::map<std::string, std::set<std::string>> out;
  for (UrlId url = 0; url < urls_.size(); ++url) {
    auto& users = out[urls_[url]];
    for (auto u : url_sharers_[url]) users.insert(users_[u]);
  }
  return out;
}

Corpus read_posts(std::istream& in, const LoadOptions& options) {
  std::vector<Post> posts;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    Post post = parse_post(line, line_no);
    if (!ids.insert(post.post_id).second) {
      throw CorpusError(line_prefix(line_no) + "duplicate post_id '" + post.post_id + "'");
    }
    posts.push_back(std::move(post));
  }
  return Corpus(std::move(posts), *options.suffixes, options.window);
}

Corpus load_posts(const std::filesystem::path& path, const LoadOptions& options) {
  auto in = open_input(path);
  try {
    return read_posts(in, options);
  } catch (const CorpusError& e) {
    throw CorpusError(path.string() + ": " + e.what());
  }
}

std::string format_post(const Post& post) {
  OrderedJson j;
  j["post_id"] = post.post_id;
  j["user_id"] = post.user_id;
  j["timestamp"] = post.timestamp;
  j["urls"] = post.urls;
  return j.dump();
}

void write_posts(std::ostream& out, std::span<const Post> posts) {
  for (const auto& p : posts) out << format_post(p) << '\n';
}

void LabelSet::set(std::string_view domain, Label label) {
  std::string key = normalize_domain(domain);
  if (key.empty()) throw CorpusError("empty domain in label set");
  auto [it, inserted] = labels_.try_emplace(std::move(key), label);
  if (!inserted && it->second != label) {
    throw CorpusError("conflicting labels for domain '" + it->first + "'");
  }
}

Label LabelSet::lookup(std::string_view domain) const {
  auto it = labels_.find(normalize_domain(domain));
  return it == labels_.end() ? Label::unknown : it->second;
}

LabelSet read_labels(std::istream& in) {
  LabelSet labels;
  bool first = true;
  for_each_record(in, [&](std::string_view line, std::size_t line_no) {
    auto [domain, token] = split_pair(line, line_no);
    if (std::exchange(first, false) && domain == "domain" && token == "label") return;
    if (normalize_domain(domain).empty()) throw CorpusError(line_prefix(line_no) + "empty domain");
    if (token != "fake" && token != "credible") {
      throw CorpusError(line_prefix(line_no) + "unknown label '" + std::string(token) + "'");
    }
    try {
      labels.set(domain, parse_label(token));
    } catch (const CorpusError& e) {
      throw CorpusError(line_prefix(line_no) + e.what());
    }
  });
  return labels;
}

LabelSet load_labels(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_labels(in);
  } catch (const CorpusError& e) {
    throw CorpusError(path.string() + ": " + e.what());
  }
}

void write_labels(std::ostream& out, const LabelSet& labels) {
  for (const auto& [domain, label] : labels.entries()) {
    if (label != Label::unknown) out << domain << ',' << to_string(label) << '\n';
  }
}

Denylist::Denylist(std::set<std::string, std::less<>> domains) {
  for (const auto& d : domains) add(d);
}

void Denylist::add(std::string_view domain) {
  std::string key = normalize_domain(domain);
  if (key.empty()) throw CorpusError("empty domain in denylist");
  domains_.insert(std::move(key));
}

Denylist read_denylist(std::istream& in) {
  Denylist list;
  for_each_record(in, [&](std::string_view line, std::size_t line_no) {
    line = trim(line.substr(0, line.find('#')));
    if (normalize_domain(line).empty()) throw CorpusError(line_prefix(line_no) + "empty domain");
    list.add(line);
  });
  return list;
}

Denylist load_denylist(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_denylist(in);
  } catch (const CorpusError& e) {
    throw CorpusError(path.string() + ": " + e.what());
  }
}

PopularityRanks::PopularityRanks(std::int64_t total_indexed) : total_(total_indexed) {
  if (total_indexed < 1) throw CorpusError("total_indexed must be a positive integer");
}

void PopularityRanks::set(std::string_view domain, std::int64_t rank) {
  std::string key = normalize_domain(domain);
  if (key.empty()) throw CorpusError("empty domain in ranks");
  if (rank < 1 || rank > total_) {
    throw CorpusError("rank " + std::to_string(rank) + " of '" + key + "' outside [1, " +
                      std::to_string(total_) + "]");
  }
  if (!ranks_.try_emplace(key, rank).second) throw CorpusError("duplicate domain '" + key + "' in ranks");
}

std::optional<std::int64_t> PopularityRanks::rank(std::string_view domain) const {
  auto it = ranks_.find(normalize_domain(domain));
  if (it == ranks_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> PopularityRanks::percentile(std::string_view domain) const {
  auto r = rank(domain);
  if (!r) return std::nullopt;
  return static_cast<double>(*r) / static_cast<double>(total_);
}

PopularityRanks read_ranks(std::istream& in, std::int64_t total_indexed) {
  PopularityRanks ranks(total_indexed);
  bool first = true;
  for_each_record(in, [&](std::string_view line, std::size_t line_no) {
    auto [domain, value] = split_pair(line, line_no);
    if (std::exchange(first, false) && domain == "domain" && value == "rank") return;
    std::int64_t rank = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), rank);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
      throw CorpusError(line_prefix(line_no) + "rank must be a positive integer");
    }
    try {
      ranks.set(domain, rank);
    } catch (const CorpusError& e) {
      throw CorpusError(line_prefix(line_no) + e.what());
    }
  });
  return ranks;
}

PopularityRanks load_ranks(const std::filesystem::path& path, std::int64_t total_indexed) {
  auto in = open_input(path);
  try {
    return read_ranks(in, total_indexed);
  } catch (const CorpusError& e) {
    throw CorpusError(path.string() + ": " + e.what());
  }
}

}  // namespace sitehunt
