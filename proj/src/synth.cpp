#include "sitehunt/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sitehunt/rng.hpp"

namespace sitehunt {

namespace {

// 2022-01-01T00:00:00Z
constexpr std::int64_t kEpoch2022 = 1640995200;
constexpr std::int64_t kSecondsPerYear = 365LL * 86400;

std::string padded(std::string_view prefix, int value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*d", width, value);
  return std::string(prefix) + buf;
}

int digits(int n) {
  int d = 1;
  while (n >= 10) {
    n /= 10;
    ++d;
  }
  return std::max(d, 3);
}

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.below(i)]);
  }
}

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(ws) - first + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError(std::string(key) + ": invalid value '" + std::string(value) + "'");
  }
  return out;
}

}  // namespace

void EcosystemConfig::validate() const {
  auto require = [](bool ok, const char* field, const char* rule) {
    if (!ok) throw ConfigError(std::string(field) + ": " + rule);
  };
  require(n_websites >= 1, "n_websites", "must be >= 1");
  require(fake_fraction >= 0.0 && fake_fraction <= 1.0, "fake_fraction", "must be in [0, 1]");
  require(urls_per_website >= 1, "urls_per_website", "must be >= 1");
  require(zipf_exponent_urls > 0.0 && std::isfinite(zipf_exponent_urls), "zipf_exponent_urls", "must be > 0");
  require(n_users >= 1, "n_users", "must be >= 1");
  require(homophily >= 0.5 && homophily <= 1.0, "homophily", "must be in [0.5, 1]");
  require(fake_user_fraction >= 0.0 && fake_user_fraction <= 1.0, "fake_user_fraction", "must be in [0, 1]");
  require(posts_per_user >= 1, "posts_per_user", "must be >= 1");
}

EcosystemConfig EcosystemConfig::parse(std::string_view text) {
  EcosystemConfig c;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    std::string_view line = trim(std::string_view(raw).substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(line) + "'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "rng_seed") c.rng_seed = parse_number<std::uint64_t>(key, value);
    else if (key == "n_websites") c.n_websites = parse_number<int>(key, value);
    else if (key == "fake_fraction") c.fake_fraction = parse_number<double>(key, value);
    else if (key == "urls_per_website") c.urls_per_website = parse_number<int>(key, value);
    else if (key == "zipf_exponent_urls") c.zipf_exponent_urls = parse_number<double>(key, value);
    else if (key == "n_users") c.n_users = parse_number<int>(key, value);
    else if (key == "homophily") c.homophily = parse_number<double>(key, value);
    else if (key == "fake_user_fraction") c.fake_user_fraction = parse_number<double>(key, value);
    else if (key == "posts_per_user") c.posts_per_user = parse_number<int>(key, value);
    else throw ConfigError("unknown key '" + std::string(key) + "'");
  }
  return c;
}

std::string EcosystemConfig::to_text() const {
  std::ostringstream out;
  out.precision(17);
  out << "rng_seed = " << rng_seed << '\n'
      << "n_websites = " << n_websites << '\n'
      << "fake_fraction = " << fake_fraction << '\n'
      << "urls_per_website = " << urls_per_website << '\n'
      << "zipf_exponent_urls = " << zipf_exponent_urls << '\n'
      << "n_users = " << n_users << '\n'
      << "homophily = " << homophily << '\n'
      << "fake_user_fraction = " << fake_user_fraction << '\n'
      << "posts_per_user = " << posts_per_user << '\n';
  return out.str();
}

std::vector<double> zipf_cdf(int n, double exponent) {
  std::vector<double> cdf(static_cast<std::size_t>(n));
  double total = 0.0;
  for (int k = 1; k <= n; ++k) {
    total += std::pow(static_cast<double>(k), -exponent);
    cdf[static_cast<std::size_t>(k - 1)] = total;
  }
  for (double& c : cdf) c /= total;
  cdf.back() = 1.0;
  return cdf;
}

SyntheticEcosystem generate(const EcosystemConfig& config) {
  config.validate();
  GroundTruth truth;

  const int site_width = digits(config.n_websites);
  const int n_fake_sites = static_cast<int>(std::lround(config.fake_fraction * config.n_websites));
  std::vector<int> site_order(static_cast<std::size_t>(config.n_websites));
  for (int i = 0; i < config.n_websites; ++i) site_order[static_cast<std::size_t>(i)] = i;
  Rng site_rng = Rng::derive(config.rng_seed, "websites");
  shuffle(site_order, site_rng);
  for (int rank = 0; rank < config.n_websites; ++rank) {
    std::string domain = padded("site-", site_order[static_cast<std::size_t>(rank)], site_width) + ".example";
    if (rank < n_fake_sites) {
      truth.labels.set(domain, Label::fake);
      truth.fake_websites.push_back(std::move(domain));
    } else {
      truth.labels.set(domain, Label::credible);
      truth.credible_websites.push_back(std::move(domain));
    }
  }
  std::sort(truth.fake_websites.begin(), truth.fake_websites.end());
  std::sort(truth.credible_websites.begin(), truth.credible_websites.end());

  const int user_width = digits(config.n_users);
  const int n_fake_users = static_cast<int>(std::lround(config.fake_user_fraction * config.n_users));
  std::vector<Camp> camps(static_cast<std::size_t>(config.n_users), Camp::credible);
  std::fill_n(camps.begin(), n_fake_users, Camp::fake);
  Rng user_rng = Rng::derive(config.rng_seed, "users");
  shuffle(camps, user_rng);
  truth.user_camps = camps;
  for (int u = 0; u < config.n_users; ++u) truth.user_ids.push_back(padded("user-", u, user_width));

  const auto cdf = zipf_cdf(config.urls_per_website, config.zipf_exponent_urls);
  const int url_width = digits(config.urls_per_website);

  std::vector<Post> posts;
  posts.reserve(static_cast<std::size_t>(config.n_users) * static_cast<std::size_t>(config.posts_per_user));
  for (int u = 0; u < config.n_users; ++u) {
    Rng rng = Rng::derive(config.rng_seed, "posts", static_cast<std::uint64_t>(u));
    const Camp own = camps[static_cast<std::size_t>(u)];
    for (int j = 0; j < config.posts_per_user; ++j) {
      const bool stay = rng.bernoulli(config.homophily);
      Camp target = stay ? own : (own == Camp::fake ? Camp::credible : Camp::fake);
      const auto* pool = target == Camp::fake ? &truth.fake_websites : &truth.credible_websites;
      if (pool->empty()) pool = target == Camp::fake ? &truth.credible_websites : &truth.fake_websites;
      const std::string& site = (*pool)[rng.below(pool->size())];
      const double draw = rng.uniform();
      const auto rank = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), draw) - cdf.begin()) + 1;
      const std::int64_t ts = kEpoch2022 + static_cast<std::int64_t>(rng.below(kSecondsPerYear));
      const bool www = rng.bernoulli(0.5);
      const bool tracking = rng.bernoulli(0.25);

      std::string url = "https://";
      if (www) url += "www.";
      url += site;
      url += padded("/article/", std::min(rank, config.urls_per_website), url_width);
      if (tracking) url += "?utm_source=social";

      Post post;
      post.post_id = padded(truth.user_ids[static_cast<std::size_t>(u)] + "-", j, 4);
      post.user_id = truth.user_ids[static_cast<std::size_t>(u)];
      post.timestamp = ts;
      post.urls.push_back(std::move(url));
      posts.push_back(std::move(post));
    }
  }
  return SyntheticEcosystem{Corpus(std::move(posts)), std::move(truth)};
}

}  // namespace sitehunt
