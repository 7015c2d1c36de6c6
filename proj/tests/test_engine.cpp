#include <doctest.h>

#include <set>

#include "sitehunt/engine.hpp"
#include "sitehunt/eval.hpp"
#include "sitehunt/record.hpp"
#include "sitehunt/synth.hpp"
#include "support.hpp"

using namespace sitehunt;
using testing::corpus_from;

namespace {

ExecutionConfig golden_config() {
  ExecutionConfig c;
  c.max_cycles = 5;
  return c;
}

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("find_sharers") {
  const auto c = corpus_from(R"({"post_id":"1","user_id":"a","timestamp":0,"urls":["https://s.example/x"]}
{"post_id":"2","user_id":"b","timestamp":0,"urls":["https://s.example/x"]}
{"post_id":"3","user_id":"b","timestamp":0,"urls":["https://s.example/x"]}
{"post_id":"4","user_id":"c","timestamp":0,"urls":["https://s.example/x","https://s.example/y"]}
)");
  CHECK(find_sharers(c, "s.example/x").size() == 3);
  CHECK(find_sharers(c, "s.example/y").size() == 1);
  CHECK(find_sharers(c, "s.example/nobody").empty());
}

TEST_CASE("golden fixture reproduces the committed record") {
  const auto corpus = testing::golden_corpus();
  const auto labels = testing::golden_labels();
  const auto deny = testing::golden_denylist();
  const auto record = run_auto_execution(corpus, labels, deny, "https://s0.example/story", golden_config());
  CHECK(serialize_record(record) == read_file(testing::golden_dir() / "execution_record.json"));

  REQUIRE(record.cycles.size() == 3);
  CHECK(record.cycles[0].top1_website == "f1.example");
  CHECK(record.cycles[0].selected_seed->url == "f1.example/f");
  CHECK(record.status == ExecutionStatus::exhausted);
}

TEST_CASE("max_cycles 1 gives exactly one cycle") {
  auto cfg = golden_config();
  cfg.max_cycles = 1;
  const auto record = run_auto_execution(testing::golden_corpus(), testing::golden_labels(), {},
                                         "https://s0.example/story", cfg);
  CHECK(record.cycles.size() == 1);
  CHECK(record.status == ExecutionStatus::completed);
  CHECK(record.discovered.size() == 1);
}

TEST_CASE("everything denylisted ends the run with no discoveries") {
  Denylist deny;
  deny.add("f1.example");
  deny.add("c1.example");
  const auto record = run_auto_execution(testing::golden_corpus(), testing::golden_labels(), deny,
                                         "https://s0.example/story", golden_config());
  CHECK(record.status == ExecutionStatus::exhausted);
  CHECK(record.discovered.empty());
  REQUIRE(record.cycles.size() == 1);
  CHECK_FALSE(record.cycles[0].top1_website.has_value());
}

TEST_CASE("rerun is identical") {
  const auto eco = generate(EcosystemConfig{.rng_seed = 3, .n_websites = 30, .n_users = 300, .posts_per_user = 10});
  const auto seed = eco.corpus.url_name(0);
  for (auto kind : {CriterionKind::hindex, CriterionKind::mostpop, CriterionKind::random}) {
    ExecutionConfig cfg;
    cfg.criterion = kind;
    cfg.rng_seed = 99;
    cfg.max_cycles = 10;
    const auto a = run_auto_execution(eco.corpus, eco.truth.labels, {}, seed, cfg);
    const auto b = run_auto_execution(eco.corpus, eco.truth.labels, {}, seed, cfg);
    CHECK(serialize_record(a) == serialize_record(b));
  }
}

TEST_CASE("invalid initial seeds") {
  const auto c = testing::golden_corpus();
  CHECK_THROWS_AS(run_auto_execution(c, {}, {}, "not a url", golden_config()), EngineError);
  CHECK_THROWS_AS(run_auto_execution(c, {}, {}, "https://nobody.example/x", golden_config()), EngineError);
  auto bad = golden_config();
  bad.max_cycles = 0;
  CHECK_THROWS(run_auto_execution(c, {}, {}, "https://s0.example/story", bad));
}

TEST_CASE("interactive session state machine") {
  const auto corpus = testing::golden_corpus();
  const auto labels = testing::golden_labels();
  const auto deny = testing::golden_denylist();
  auto cfg = golden_config();
  cfg.mode = ExecutionMode::interactive;
  Session s(corpus, labels, deny, "https://s0.example/story", cfg);
  CHECK(s.status() == SessionStatus::awaiting_choice);
  REQUIRE(s.pending_candidates().size() == 2);
  CHECK(s.pending_candidates()[0].score.website == "f1.example");

  SUBCASE("an unlisted URL is rejected without state change") {
    const auto before = serialize_record(s.record());
    CHECK_THROWS_AS(s.choose_seed("https://s0.example/story"), ChoiceError);
    CHECK_THROWS_AS(s.choose_seed("https://c1.example/d"), ChoiceError);  // listed site, not a top-h URL
    CHECK_THROWS_AS(s.choose_seed("garbage"), ChoiceError);
    CHECK(serialize_record(s.record()) == before);
    CHECK(s.status() == SessionStatus::awaiting_choice);
    CHECK(s.pending_candidates().size() == 2);
  }

  SUBCASE("choosing the second site leaves the first eligible") {
    s.choose_seed("https://www.c1.example/c");
    CHECK(s.status() == SessionStatus::awaiting_choice);
    REQUIRE(s.record().cycles.size() == 1);
    CHECK(s.record().cycles[0].selected_seed->origin == SeedOrigin::human);
    CHECK(s.record().discovered == std::vector<DiscoveredWebsite>{{"c1.example", Label::credible, 1}});
    REQUIRE(s.pending_candidates().size() == 1);
    CHECK(s.pending_candidates()[0].score.website == "f1.example");
    CHECK(s.pending_candidates()[0].score.total_distinct_sharers == 3);
    s.choose_seed("f1.example/f");
    CHECK(s.status() == SessionStatus::finished);
    CHECK(s.record().status == ExecutionStatus::exhausted);
    CHECK_THROWS_AS(s.choose_seed("f1.example/f"), EngineError);
  }

  SUBCASE("always choosing the top URL replays the automated run") {
    while (s.status() == SessionStatus::awaiting_choice) s.choose_seed(s.pending_candidates()[0].urls[0].url);
    const auto automated = run_auto_execution(corpus, labels, deny, "https://s0.example/story", golden_config());
    CHECK(s.record().discovered == automated.discovered);
  }
}

TEST_CASE("fake seeds mostly lead to a fake first discovery") {
  const auto eco = generate(EcosystemConfig{.rng_seed = 2022});
  Rng rng(7);
  const auto pool = build_seed_pool(eco.corpus, eco.truth.labels, SeedSetType::fake100, rng, 40);
  int fake_first = 0;
  for (const auto& seed : pool) {
    ExecutionConfig cfg;
    const auto r = run_auto_execution(eco.corpus, eco.truth.labels, {}, seed.canonical, cfg);
    REQUIRE_FALSE(r.discovered.empty());
    fake_first += r.discovered.front().label == Label::fake;
  }
  MESSAGE("fake first discoveries: " << fake_first << "/40");
  CHECK(fake_first >= 24);
}

TEST_CASE("no website is ever seeded twice") {
  const auto eco = generate(EcosystemConfig{.rng_seed = 5, .n_websites = 25, .n_users = 400, .posts_per_user = 8});
  Rng rng(1);
  for (int i = 0; i < 30; ++i) {
    ExecutionConfig cfg;
    cfg.criterion = static_cast<CriterionKind>(rng.below(3));
    cfg.rng_seed = rng.next();
    const auto seed = eco.corpus.url_name(static_cast<UrlId>(rng.below(eco.corpus.url_count())));
    const auto r = run_auto_execution(eco.corpus, eco.truth.labels, {}, seed, cfg);
    std::set<std::string> sites{r.initial_seed.website};
    for (const auto& c : r.cycles) {
      if (c.selected_seed) CHECK(sites.insert(c.selected_seed->website).second);
    }
  }
}

}
