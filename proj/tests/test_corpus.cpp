#include <doctest.h>

#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "sitehunt/corpus.hpp"
#include "sitehunt/rng.hpp"
#include "support.hpp"

using namespace sitehunt;
using testing::corpus_from;

namespace {

std::string post_line(const std::string& id, const std::string& user, std::int64_t ts,
                      const std::vector<std::string>& urls) {
  std::string s = "{\"post_id\":\"" + id + "\",\"user_id\":\"" + user + "\",\"timestamp\":" + std::to_string(ts) +
                  ",\"urls\":[";
  for (std::size_t i = 0; i < urls.size(); ++i) s += (i ? ",\"" : "\"") + urls[i] + "\"";
  return s + "]}\n";
}

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("empty input") {
  const auto c = corpus_from("");
  CHECK(c.posts().empty());
  CHECK(c.user_count() == 0);
  CHECK(c.url_count() == 0);
  CHECK(c.user_index().empty());
  CHECK(c.url_index().empty());
}

TEST_CASE("three posts by two users") {
  const auto c = corpus_from(post_line("1", "u1", 10, {"https://a.example/x"}) +
                             post_line("2", "u2", 11, {"https://www.a.example/x?s=1"}) +
                             "\n" + post_line("3", "u1", 12, {"https://b.example/y"}));
  CHECK(c.posts().size() == 3);
  const auto users = c.user_index();
  CHECK(users.size() == 2);
  CHECK(users.at("u1") == std::vector<std::string>{"1", "3"});
  const auto urls = c.url_index();
  CHECK(urls.size() == 2);
  CHECK(urls.at("a.example/x") == std::set<std::string>{"u1", "u2"});
  CHECK(urls.at("b.example/y") == std::set<std::string>{"u1"});
  CHECK(c.website_count() == 2);
}

TEST_CASE("a URL repeated inside one post is one share") {
  const auto c = corpus_from(post_line("1", "u", 0, {"https://a.example/x", "https://a.example/x#again"}));
  REQUIRE(c.find_url("a.example/x"));
  CHECK(c.url_shares(*c.find_url("a.example/x")).size() == 1);
}

TEST_CASE("unnormalizable URLs are dropped and counted") {
  const auto c = corpus_from(post_line("1", "u", 0, {"ftp://a.example/x", "https://a.example/y"}));
  CHECK(c.dropped_urls() == 1);
  CHECK(c.url_count() == 1);
}

TEST_CASE("time window is half open") {
  LoadOptions options;
  options.window.begin = 10;
  options.window.end = 20;
  std::istringstream in(post_line("1", "u", 9, {"https://a.example/x"}) + post_line("2", "u", 10, {"https://a.example/y"}) +
                        post_line("3", "u", 20, {"https://a.example/z"}));
  const auto c = read_posts(in, options);
  CHECK(c.posts().size() == 1);
  CHECK(c.posts()[0].post_id == "2");
  CHECK(c.filtered_posts() == 2);
}

TEST_CASE("malformed input names the line") {
  const std::string good = post_line("1", "u", 0, {"https://a.example/x"});
  CHECK(error_of([&] { corpus_from(good + "{not json\n"); }).find("line 2") != std::string::npos);
  CHECK(error_of([&] { corpus_from(good + "{\"post_id\":\"2\"}\n"); }).find("line 2") != std::string::npos);
  const auto dup = error_of([&] { corpus_from(good + good); });
  CHECK(dup.find("line 2") != std::string::npos);
  CHECK(dup.find("'1'") != std::string::npos);
  CHECK_THROWS_AS(load_posts("/nonexistent/posts.jsonl"), CorpusError);
}

TEST_CASE("write then read round trips") {
  const auto c = corpus_from(post_line("1", "u1", 10, {"https://a.example/x", "https://b.example/y"}) +
                             post_line("2", "u2", 11, {}));
  std::ostringstream out;
  write_posts(out, c.posts());
  const auto again = corpus_from(out.str());
  CHECK(again.posts() == c.posts());
  CHECK(format_post(c.posts()[0]) ==
        R"({"post_id":"1","user_id":"u1","timestamp":10,"urls":["https://a.example/x","https://b.example/y"]})");
}

TEST_CASE("indices equal an independent linear scan on 1000 random posts") {
  Rng rng(2024);
  std::string text;
  std::vector<std::tuple<std::string, std::string, std::vector<std::string>>> raw;
  for (int i = 0; i < 1000; ++i) {
    const std::string user = "u" + std::to_string(rng.below(60));
    std::vector<std::string> urls;
    const int k = static_cast<int>(rng.below(4));
    for (int j = 0; j < k; ++j) {
      urls.push_back("https://" + std::string(rng.bernoulli(0.5) ? "www." : "") + "s" + std::to_string(rng.below(15)) +
                     ".example/p" + std::to_string(rng.below(20)));
    }
    raw.emplace_back("p" + std::to_string(i), user, urls);
    text += post_line("p" + std::to_string(i), user, i, urls);
  }
  const auto c = corpus_from(text);

  std::map<std::string, std::vector<std::string>> users;
  std::map<std::string, std::set<std::string>> urls;
  std::size_t shares = 0;
  for (const auto& [id, user, list] : raw) {
    users[user].push_back(id);
    std::set<std::string> in_post;
    for (auto u : list) {
      u = u.substr(u.find("://") + 3);
      if (u.starts_with("www.")) u = u.substr(4);
      urls[u].insert(user);
      in_post.insert(u);
    }
    shares += in_post.size();
  }
  CHECK(c.user_index() == users);
  CHECK(c.url_index() == urls);
  CHECK(c.shares().size() == shares);
}

TEST_CASE("labels") {
  std::istringstream in("# comment\nbadnews.example,fake\nWWW.GoodNews.example,credible\n\n");
  const auto labels = read_labels(in);
  CHECK(labels.lookup("badnews.example") == Label::fake);
  CHECK(labels.lookup("goodnews.example") == Label::credible);
  CHECK(labels.lookup("neutral.example") == Label::unknown);
  CHECK(labels.entries().contains("goodnews.example"));

  std::istringstream header("domain,label\na.example,fake\n");
  CHECK(read_labels(header).size() == 1);

  std::istringstream bad("a.example,maybe\n");
  CHECK(error_of([&] { read_labels(bad); }).find("line 1") != std::string::npos);
  std::istringstream conflict("a.example,fake\nA.example,credible\n");
  CHECK(error_of([&] { read_labels(conflict); }).find("line 2") != std::string::npos);

  std::ostringstream out;
  write_labels(out, labels);
  CHECK(out.str() == "badnews.example,fake\ngoodnews.example,credible\n");
}

TEST_CASE("denylist") {
  std::istringstream in("twitter.com\n# social\nWWW.Facebook.com  # trailing comment\n");
  const auto d = read_denylist(in);
  CHECK(d.contains("twitter.com"));
  CHECK(d.contains("facebook.com"));
  CHECK_FALSE(d.contains("example.com"));
  CHECK(d.size() == 2);
}

TEST_CASE("popularity ranks") {
  std::istringstream in("a.example,5\n");
  const auto ranks = read_ranks(in, 100);
  CHECK(ranks.percentile("a.example") == doctest::Approx(0.05));
  CHECK(ranks.rank("a.example") == 5);
  CHECK_FALSE(ranks.rank("b.example").has_value());

  std::istringstream dup("a.example,5\nb.example,6\na.example,7\n");
  const auto msg = error_of([&] { read_ranks(dup, 100); });
  CHECK(msg.find("a.example") != std::string::npos);
  CHECK(msg.find("line 3") != std::string::npos);

  std::istringstream out_of_range("a.example,101\n");
  CHECK_THROWS_AS(read_ranks(out_of_range, 100), CorpusError);
  std::istringstream not_number("a.example,five\n");
  CHECK_THROWS_AS(read_ranks(not_number, 100), CorpusError);
}

}
