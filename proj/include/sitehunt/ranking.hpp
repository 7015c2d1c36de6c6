#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sitehunt/corpus.hpp"

namespace sitehunt {

class RankingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CriterionKind : std::uint8_t { hindex, mostpop, random };

std::string_view to_string(CriterionKind kind);
/// "hindex", "mostpop" or "random"; throws std::invalid_argument otherwise.
CriterionKind parse_criterion(std::string_view token);

struct Criterion {
  CriterionKind kind = CriterionKind::hindex;
  /// Seed of the permutation stream; only meaningful for random.
  std::uint64_t stream = 0;

  static Criterion hindex() { return {CriterionKind::hindex, 0}; }
  static Criterion mostpop() { return {CriterionKind::mostpop, 0}; }
  static Criterion random(std::uint64_t stream) { return {CriterionKind::random, stream}; }
};

/// Dense membership set over a corpus' user ids; remembers insertion order.
class UserSet {
 public:
  UserSet() = default;
  explicit UserSet(std::size_t universe) : member_(universe, false) {}

  /// Returns true when `user` was not yet a member.
  bool insert(UserId user);
  bool contains(UserId user) const { return user < member_.size() && member_[user]; }
  std::size_t size() const { return order_.size(); }
  bool empty() const { return order_.empty(); }
  const std::vector<UserId>& members() const { return order_; }

 private:
  std::vector<bool> member_;
  std::vector<UserId> order_;
};

struct UrlStats {
  std::uint32_t distinct_sharers = 0;
  std::uint32_t total_shares = 0;

  friend bool operator==(const UrlStats&, const UrlStats&) = default;
};

/// Per-website, per-URL share counts over the posts of an identified user
/// set. Denylisted and excluded websites never appear.
///
/// Holds a pointer to the corpus it was built from; the corpus must outlive it.
class ShareIndex {
 public:
  struct UrlEntry {
    UrlId url;
    UrlStats stats;
  };
  struct SiteEntry {
    WebsiteId website;
    /// Ascending by canonical URL.
    std::vector<UrlEntry> urls;
    /// Distinct users sharing any URL of the site.
    std::uint32_t distinct_sharers = 0;
  };

  const Corpus& corpus() const { return *corpus_; }
  /// Ascending by domain.
  std::span<const SiteEntry> sites() const { return sites_; }
  const SiteEntry* find(std::string_view website) const;
  bool empty() const { return sites_.empty(); }

  std::map<std::string, std::map<std::string, UrlStats>> to_map() const;

 private:
  friend ShareIndex build_index(const Corpus&, const UserSet&, const Denylist&,
                                const std::set<std::string, std::less<>>&);
  const Corpus* corpus_ = nullptr;
  std::vector<SiteEntry> sites_;
};

ShareIndex build_index(const Corpus& corpus, const UserSet& users, const Denylist& denylist,
                       const std::set<std::string, std::less<>>& excluded);

/// Largest h such that at least h of the counts are >= h.
std::uint32_t hindex(std::span<const std::uint32_t> citation_counts);

struct WebsiteScore {
  std::string website;
  std::uint32_t h_index = 0;
  std::uint32_t most_pop_share_count = 0;
  std::uint32_t total_shares = 0;
  std::uint32_t total_distinct_sharers = 0;

  friend bool operator==(const WebsiteScore&, const WebsiteScore&) = default;
};

/// Citations are distinct sharers per URL; the most popular URL is the one
/// with the most share occurrences.
WebsiteScore score_website(const ShareIndex& index, const ShareIndex::SiteEntry& site);

/// Total order over all websites of the index.
///
///   hindex:  h_index, total_distinct_sharers, total_shares desc; domain asc
///   mostpop: most_pop_share_count, total_shares desc; domain asc
///   random:  Fisher-Yates shuffle of the domain order, seeded by the stream
std::vector<WebsiteScore> rank_websites(const ShareIndex& index, const Criterion& criterion);

struct UrlRank {
  std::string url;
  std::uint32_t total_shares = 0;
  std::uint32_t distinct_sharers = 0;

  friend bool operator==(const UrlRank&, const UrlRank&) = default;
};

/// URLs of `website` by total_shares desc, distinct_sharers desc, URL asc.
/// Throws RankingError when the website is not in the index.
std::vector<UrlRank> rank_urls(const ShareIndex& index, std::string_view website);

struct Candidate {
  WebsiteScore score;
  std::vector<UrlRank> urls;
  /// Set when h_index was 0 and the single most shared URL is shown instead.
  bool fallback = false;
};

/// Top-h URLs for each of the first `top_k_websites` ranked websites.
std::vector<Candidate> candidates(std::span<const WebsiteScore> ranking, const ShareIndex& index,
                                  int top_k_websites);

}  // namespace sitehunt
