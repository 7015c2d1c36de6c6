#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sitehunt/urlnorm.hpp"

namespace sitehunt {

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Label : std::uint8_t { unknown, fake, credible };

std::string_view to_string(Label label);
/// Accepts "fake", "credible" and "unknown". Throws CorpusError otherwise.
Label parse_label(std::string_view token);

/// One social media publication.
struct Post {
  std::string post_id;
  std::string user_id;
  std::int64_t timestamp = 0;
  std::vector<std::string> urls;

  friend bool operator==(const Post&, const Post&) = default;
};

/// Half-open [begin, end) interval of accepted timestamps.
struct TimeWindow {
  std::optional<std::int64_t> begin;
  std::optional<std::int64_t> end;

  bool contains(std::int64_t t) const {
    return (!begin || t >= *begin) && (!end || t < *end);
  }
};

using UserId = std::uint32_t;
using UrlId = std::uint32_t;
using WebsiteId = std::uint32_t;

/// A post containing a URL. A post that repeats a URL yields one share.
struct Share {
  std::uint32_t post;
  UserId user;
  UrlId url;
};

/// Immutable, indexed post collection.
///
/// Users, canonical URLs and websites are interned to dense ids in order of
/// first appearance, so every derived structure is a pure function of the
/// post sequence. URLs that fail normalization are dropped and counted.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<Post> posts, const SuffixList& suffixes = SuffixList::builtin(),
                  TimeWindow window = {});

  const std::vector<Post>& posts() const { return posts_; }
  /// Suffix list the URLs were normalized with; must outlive the corpus.
  const SuffixList& suffixes() const { return *suffixes_; }
  std::size_t dropped_urls() const { return dropped_urls_; }
  std::size_t filtered_posts() const { return filtered_posts_; }

  std::size_t user_count() const { return users_.size(); }
  std::size_t url_count() const { return urls_.size(); }
  std::size_t website_count() const { return websites_.size(); }

  const std::string& user_name(UserId id) const { return users_[id]; }
  const std::string& url_name(UrlId id) const { return urls_[id]; }
  const std::string& website_name(WebsiteId id) const { return websites_[id]; }
  WebsiteId url_website(UrlId id) const { return url_website_[id]; }

  std::optional<UserId> find_user(std::string_view name) const;
  std::optional<UrlId> find_url(std::string_view canonical) const;
  std::optional<WebsiteId> find_website(std::string_view domain) const;

  std::span<const Share> shares() const { return shares_; }
  /// Indices into shares() authored by `user`, in post order.
  std::span<const std::uint32_t> user_shares(UserId user) const { return user_shares_[user]; }
  /// Indices into shares() of `url`, in post order.
  std::span<const std::uint32_t> url_shares(UrlId url) const { return url_shares_[url]; }
  /// Distinct sharers of `url`, ascending by id.
  std::span<const UserId> url_sharers(UrlId url) const { return url_sharers_[url]; }
  std::span<const UrlId> website_urls(WebsiteId site) const { return website_urls_[site]; }

  /// user_id -> post_ids, in post order.
  std::map<std::string, std::vector<std::string>> user_index() const;
  /// canonical URL -> user_ids that shared it.
  std::map<std::string, std::set<std::string>> url_index() const;

 private:
  std::vector<Post> posts_;
  const SuffixList* suffixes_ = &SuffixList::builtin();
  std::size_t dropped_urls_ = 0;
  std::size_t filtered_posts_ = 0;

  std::vector<std::string> users_;
  std::vector<std::string> urls_;
  std::vector<std::string> websites_;
  std::vector<WebsiteId> url_website_;
  std::unordered_map<std::string, UserId> user_ids_;
  std::unordered_map<std::string, UrlId> url_ids_;
  std::unordered_map<std::string, WebsiteId> website_ids_;

  std::vector<Share> shares_;
  std::vector<std::vector<std::uint32_t>> user_posts_;
  std::vector<std::vector<std::uint32_t>> user_shares_;
  std::vector<std::vector<std::uint32_t>> url_shares_;
  std::vector<std::vector<UserId>> url_sharers_;
  std::vector<std::vector<UrlId>> website_urls_;
};

struct LoadOptions {
  const SuffixList* suffixes = &SuffixList::builtin();
  TimeWindow window;
};

/// Reads line-delimited JSON post records. Blank lines are skipped.
Corpus read_posts(std::istream& in, const LoadOptions& options = {});
Corpus load_posts(const std::filesystem::path& path, const LoadOptions& options = {});
std::string format_post(const Post& post);
void write_posts(std::ostream& out, std::span<const Post> posts);

/// Ground-truth credibility labels keyed by normalized domain.
class LabelSet {
 public:
  /// Throws CorpusError on an empty domain or a conflicting relabel.
  void set(std::string_view domain, Label label);
  /// Never fails; unlisted domains are unknown.
  Label lookup(std::string_view domain) const;
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  const std::map<std::string, Label, std::less<>>& entries() const { return labels_; }

 private:
  std::map<std::string, Label, std::less<>> labels_;
};

LabelSet read_labels(std::istream& in);
LabelSet load_labels(const std::filesystem::path& path);
void write_labels(std::ostream& out, const LabelSet& labels);

/// Domains that never host third-party news (social networks, shorteners...).
class Denylist {
 public:
  Denylist() = default;
  explicit Denylist(std::set<std::string, std::less<>> domains);
  void add(std::string_view domain);
  bool contains(std::string_view domain) const { return domains_.contains(domain); }
  std::size_t size() const { return domains_.size(); }

 private:
  std::set<std::string, std::less<>> domains_;
};

Denylist read_denylist(std::istream& in);
Denylist load_denylist(const std::filesystem::path& path);

/// Popularity rank per domain (1 = most popular) out of `total_indexed`.
class PopularityRanks {
 public:
  explicit PopularityRanks(std::int64_t total_indexed);
  /// Throws CorpusError on duplicates and out-of-range ranks.
  void set(std::string_view domain, std::int64_t rank);
  std::optional<std::int64_t> rank(std::string_view domain) const;
  /// rank / total_indexed, or nullopt for unranked domains.
  std::optional<double> percentile(std::string_view domain) const;
  std::int64_t total_indexed() const { return total_; }
  std::size_t size() const { return ranks_.size(); }

 private:
  std::int64_t total_;
  std::map<std::string, std::int64_t, std::less<>> ranks_;
};

PopularityRanks read_ranks(std::istream& in, std::int64_t total_indexed);
PopularityRanks load_ranks(const std::filesystem::path& path, std::int64_t total_indexed);

}  // namespace sitehunt
