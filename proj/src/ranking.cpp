#include "sitehunt/ranking.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

#include "sitehunt/rng.hpp"

namespace sitehunt {

std::string_view to_string(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::hindex:
      return "hindex";
    case CriterionKind::mostpop:
      return "mostpop";
    case CriterionKind::random:
      return "random";
  }
  return "hindex";
}

CriterionKind parse_criterion(std::string_view token) {
  if (token == "hindex") return CriterionKind::hindex;
  if (token == "mostpop") return CriterionKind::mostpop;
  if (token == "random") return CriterionKind::random;
  throw std::invalid_argument("unknown criterion '" + std::string(token) + "'");
}

bool UserSet::insert(UserId user) {
  if (user >= member_.size()) member_.resize(user + 1, false);
  if (member_[user]) return false;
  member_[user] = true;
  order_.push_back(user);
  return true;
}

const ShareIndex::SiteEntry* ShareIndex::find(std::string_view website) const {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), website, [&](const SiteEntry& s, std::string_view w) {
    return corpus_->website_name(s.website) < w;
  });
  if (it == sites_.end() || corpus_->website_name(it->website) != website) return nullptr;
  return &*it;
}

std::map<std::string, std::map<std::string, UrlStats>> ShareIndex::to_map() const {
  std::map<std::string, std::map<std::string, UrlStats>> out;
  for (const auto& site : sites_) {
    auto& urls = out[corpus_->website_name(site.website)];
    for (const auto& u : site.urls) urls[corpus_->url_name(u.url)] = u.stats;
  }
  return out;
}

ShareIndex build_index(const Corpus& corpus, const UserSet& users, const Denylist& denylist,
                       const std::set<std::string, std::less<>>& excluded) {
  constexpr auto kNone = std::numeric_limits<UserId>::max();
  ShareIndex index;
  index.corpus_ = &corpus;

  std::vector<bool> eligible(corpus.website_count());
  for (WebsiteId w = 0; w < corpus.website_count(); ++w) {
    const auto& name = corpus.website_name(w);
    eligible[w] = !denylist.contains(name) && !excluded.contains(name);
  }

  std::vector<UrlStats> url_stats(corpus.url_count());
  std::vector<UserId> url_last(corpus.url_count(), kNone);
  std::vector<std::uint32_t> site_distinct(corpus.website_count(), 0);
  std::vector<UserId> site_last(corpus.website_count(), kNone);
  std::vector<bool> site_seen(corpus.website_count(), false);

  // Ascending user order makes the pass independent of insertion order.
  std::vector<UserId> members = users.members();
  std::sort(members.begin(), members.end());
  const auto shares = corpus.shares();
  for (UserId user : members) {
    if (user >= corpus.user_count()) continue;
    for (auto si : corpus.user_shares(user)) {
      const UrlId url = shares[si].url;
      const WebsiteId site = corpus.url_website(url);
      if (!eligible[site]) continue;
      auto& stats = url_stats[url];
      ++stats.total_shares;
      if (url_last[url] != user) {
        url_last[url] = user;
        ++stats.distinct_sharers;
      }
      if (site_last[site] != user) {
        site_last[site] = user;
        ++site_distinct[site];
      }
      site_seen[site] = true;
    }
  }

  for (WebsiteId w = 0; w < corpus.website_count(); ++w) {
    if (!site_seen[w]) continue;
    ShareIndex::SiteEntry entry{w, {}, site_distinct[w]};
    for (UrlId url : corpus.website_urls(w)) {
      if (url_stats[url].total_shares > 0) entry.urls.push_back({url, url_stats[url]});
    }
    std::sort(entry.urls.begin(), entry.urls.end(), [&](const auto& a, const auto& b) {
      return corpus.url_name(a.url) < corpus.url_name(b.url);
    });
    index.sites_.push_back(std::move(entry));
  }
  std::sort(index.sites_.begin(), index.sites_.end(), [&](const auto& a, const auto& b) {
    return corpus.website_name(a.website) < corpus.website_name(b.website);
  });
  return index;
}

std::uint32_t hindex(std::span<const std::uint32_t> citation_counts) {
  const std::size_t n = citation_counts.size();
  // buckets[k] = number of counts equal to k, with counts above n folded into n.
  std::vector<std::uint32_t> buckets(n + 1, 0);
  for (auto c : citation_counts) ++buckets[std::min<std::size_t>(c, n)];
  std::size_t at_least = 0;
  for (std::size_t h = n; h > 0; --h) {
    at_least += buckets[h];
    if (at_least >= h) return static_cast<std::uint32_t>(h);
  }
  return 0;
}

WebsiteScore score_website(const ShareIndex& index, const ShareIndex::SiteEntry& site) {
  WebsiteScore score;
  score.website = index.corpus().website_name(site.website);
  score.total_distinct_sharers = site.distinct_sharers;
  std::vector<std::uint32_t> citations;
  citations.reserve(site.urls.size());
  for (const auto& u : site.urls) {
    citations.push_back(u.stats.distinct_sharers);
    score.total_shares += u.stats.total_shares;
    score.most_pop_share_count = std::max(score.most_pop_share_count, u.stats.total_shares);
  }
  score.h_index = hindex(citations);
  return score;
}

std::vector<WebsiteScore> rank_websites(const ShareIndex& index, const Criterion& criterion) {
  std::vector<WebsiteScore> scores;
  scores.reserve(index.sites().size());
  for (const auto& site : index.sites()) scores.push_back(score_website(index, site));

  switch (criterion.kind) {
    case CriterionKind::hindex:
      std::sort(scores.begin(), scores.end(), [](const WebsiteScore& a, const WebsiteScore& b) {
        return std::tie(b.h_index, b.total_distinct_sharers, b.total_shares, a.website) <
               std::tie(a.h_index, a.total_distinct_sharers, a.total_shares, b.website);
      });
      break;
    case CriterionKind::mostpop:
      std::sort(scores.begin(), scores.end(), [](const WebsiteScore& a, const WebsiteScore& b) {
        return std::tie(b.most_pop_share_count, b.total_shares, a.website) <
               std::tie(a.most_pop_share_count, a.total_shares, b.website);
      });
      break;
    case CriterionKind::random: {
      // scores are already in domain order.
      Rng rng(criterion.stream);
      for (std::size_t i = scores.size(); i > 1; --i) std::swap(scores[i - 1], scores[rng.below(i)]);
      break;
    }
  }
  return scores;
}

std::vector<UrlRank> rank_urls(const ShareIndex& index, std::string_view website) {
  const auto* site = index.find(website);
  if (!site) throw RankingError("website not in index: " + std::string(website));
  std::vector<UrlRank> out;
  out.reserve(site->urls.size());
  for (const auto& u : site->urls) {
    out.push_back({index.corpus().url_name(u.url), u.stats.total_shares, u.stats.distinct_sharers});
  }
  std::sort(out.begin(), out.end(), [](const UrlRank& a, const UrlRank& b) {
    return std::tie(b.total_shares, b.distinct_sharers, a.url) < std::tie(a.total_shares, a.distinct_sharers, b.url);
  });
  return out;
}

std::vector<Candidate> candidates(std::span<const WebsiteScore> ranking, const ShareIndex& index,
                                  int top_k_websites) {
  if (top_k_websites < 1) throw std::invalid_argument("top_k_websites must be >= 1");
  std::vector<Candidate> out;
  const auto n = std::min(ranking.size(), static_cast<std::size_t>(top_k_websites));
  for (std::size_t i = 0; i < n; ++i) {
    Candidate c;
    c.score = ranking[i];
    auto urls = rank_urls(index, c.score.website);
    std::size_t take = c.score.h_index;
    if (take == 0 && !urls.empty()) {
      take = 1;
      c.fallback = true;
    }
    urls.resize(std::min(take, urls.size()));
    c.urls = std::move(urls);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace sitehunt
