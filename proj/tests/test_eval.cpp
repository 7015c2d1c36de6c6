#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "sitehunt/eval.hpp"
#include "sitehunt/record.hpp"
#include "sitehunt/synth.hpp"
#include "support.hpp"

using namespace sitehunt;

namespace {

ExecutionRecord record_with_labels(const std::vector<std::optional<Label>>& top1) {
  ExecutionRecord r;
  int n = 0;
  for (const auto& label : top1) {
    CycleRecord c;
    c.cycle_no = ++n;
    if (label) {
      c.top1_website = "site" + std::to_string(n) + ".example";
      c.top1_label = *label;
    }
    r.cycles.push_back(c);
  }
  r.status = ExecutionStatus::completed;
  return r;
}

const SyntheticEcosystem& small_ecosystem() {
  static const auto eco = generate(EcosystemConfig{.rng_seed = 8, .n_websites = 40, .n_users = 600, .posts_per_user = 10});
  return eco;
}

BatchConfig small_batch(int parallel) {
  BatchConfig b;
  b.n_executions = 8;
  b.max_cycles = 12;
  b.master_rng_seed = 4242;
  b.parallel = parallel;
  return b;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("series of a single execution") {
  const auto r = record_with_labels({Label::fake, Label::credible, Label::fake});
  const auto s = execution_series(r, 3);
  CHECK(s.cumulative_rank1_fake == std::vector<int>{1, 1, 2});
  CHECK(s.rank1_fake == std::vector<int>{1, 0, 1});
  CHECK(s.recall_vs_optimal[0] == Ratio{1, 1});
  CHECK(s.recall_vs_optimal[1] == Ratio{1, 2});
  CHECK(s.recall_vs_optimal[2] == Ratio{2, 3});
  CHECK(s.recall_vs_optimal[2].value() == doctest::Approx(0.667).epsilon(0.001));
}

TEST_CASE("dead and unknown cycles are non-events") {
  const auto r = record_with_labels({Label::unknown, std::nullopt, Label::fake});
  const auto s = execution_series(r, 5);  // run ended after 3 cycles
  CHECK(s.cumulative_rank1_fake == std::vector<int>{0, 0, 1, 1, 1});
  CHECK(s.recall_vs_optimal[4] == Ratio{1, 5});
}

TEST_CASE("averaging two executions") {
  const std::vector<ExecutionRecord> rs{record_with_labels({Label::fake, Label::fake, Label::credible}),
                                        record_with_labels({Label::credible, Label::fake, Label::fake})};
  const auto m = aggregate_series(rs, 3);
  CHECK(m.n_executions == 2);
  // cumulative: [1,2,2] and [0,1,2]
  CHECK(m.cumulative_rank1_fake[0] == Ratio{1, 2});
  CHECK(m.cumulative_rank1_fake[1] == Ratio{3, 2});
  CHECK(m.cumulative_rank1_fake[2] == Ratio{2, 1});
  CHECK(m.per_cycle_density[0] == Ratio{1, 2});
  CHECK(m.per_cycle_density[1] == Ratio{1, 1});
  CHECK(m.per_cycle_density[2] == Ratio{1, 2});
  CHECK(m.recall_vs_optimal[1] == Ratio{3, 4});
  CHECK(m.cumulative_min == std::vector<int>{0, 1, 2});
  CHECK(m.cumulative_max == std::vector<int>{1, 2, 2});
}

TEST_CASE("seed pools") {
  const auto& eco = small_ecosystem();
  Rng rng(1);
  for (const auto& s : build_seed_pool(eco.corpus, eco.truth.labels, SeedSetType::fake100, rng, 200)) {
    CHECK(eco.truth.labels.lookup(s.website) == Label::fake);
  }
  for (const auto& s : build_seed_pool(eco.corpus, eco.truth.labels, SeedSetType::fake0, rng, 200)) {
    CHECK(eco.truth.labels.lookup(s.website) == Label::credible);
  }
  const int n = 10000;
  int fake = 0;
  for (const auto& s : build_seed_pool(eco.corpus, eco.truth.labels, SeedSetType::fake50, rng, n)) {
    fake += eco.truth.labels.lookup(s.website) == Label::fake;
  }
  CHECK(std::abs(fake - n / 2.0) < 3 * std::sqrt(n * 0.25));

  LabelSet only_fake;
  only_fake.set(eco.truth.fake_websites.front(), Label::fake);
  CHECK_THROWS_WITH_AS(build_seed_pool(eco.corpus, only_fake, SeedSetType::fake0, rng, 5),
                       doctest::Contains("credible"), EngineError);
}

TEST_CASE("popularity cdf examples") {
  PopularityRanks ranks(100);
  ranks.set("a.example", 5);
  ranks.set("b.example", 10);
  ranks.set("c.example", 20);
  const std::vector<std::string> one{"a.example"};
  CHECK(popularity_cdf(one, ranks, {}) == std::vector<CdfPoint>{{0.05, 1.0}});
  const std::vector<std::string> two{"b.example", "c.example"};
  CHECK(popularity_cdf(two, ranks, {}) == std::vector<CdfPoint>{{0.1, 0.5}, {0.2, 1.0}});
  const std::vector<std::string> with_unranked{"b.example", "z.example"};
  CHECK(popularity_cdf(with_unranked, ranks, {}) == std::vector<CdfPoint>{{0.1, 0.5}, {std::nullopt, 1.0}});

  LabelSet labels;
  labels.set("a.example", Label::fake);
  labels.set("b.example", Label::credible);
  const std::vector<std::string> mixed{"a.example", "b.example"};
  CHECK(popularity_cdf(mixed, ranks, labels) == std::vector<CdfPoint>{{0.05, 1.0}});
}

TEST_CASE("popularity cdf equals sort-and-accumulate on 30 random sites") {
  Rng rng(30);
  PopularityRanks ranks(1000);
  std::vector<std::string> sites;
  std::vector<double> ps;
  for (int i = 0; i < 30; ++i) {
    const auto name = "r" + std::to_string(i) + ".example";
    const auto rank = 1 + static_cast<std::int64_t>(rng.below(1000));
    ranks.set(name, rank);
    sites.push_back(name);
    ps.push_back(static_cast<double>(rank) / 1000);
  }
  std::sort(ps.begin(), ps.end());
  std::vector<CdfPoint> expected;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!expected.empty() && expected.back().percentile == ps[i]) expected.pop_back();
    expected.push_back({ps[i], static_cast<double>(i + 1) / 30});
  }
  const auto cdf = popularity_cdf(sites, ranks, {});
  CHECK(cdf == expected);
  for (std::size_t i = 1; i < cdf.size(); ++i) CHECK(cdf[i].cumulative_fraction >= cdf[i - 1].cumulative_fraction);
  CHECK(cdf.back().cumulative_fraction == 1.0);
}

TEST_CASE("batch output does not depend on the worker count") {
  const auto& eco = small_ecosystem();
  const auto a = run_batch(small_batch(1), eco.corpus, eco.truth.labels, {});
  const auto b = run_batch(small_batch(4), eco.corpus, eco.truth.labels, {});
  REQUIRE(a.valid);
  REQUIRE(b.valid);
  CHECK(format_metrics_csv(a.series) == format_metrics_csv(b.series));
  for (const auto& [criterion, records] : a.records) {
    REQUIRE(records.size() == b.records.at(criterion).size());
    for (std::size_t i = 0; i < records.size(); ++i) {
      CHECK(serialize_record(records[i]) == serialize_record(b.records.at(criterion)[i]));
    }
  }
}

TEST_CASE("criteria share the same seeds") {
  const auto& eco = small_ecosystem();
  const auto r = run_batch(small_batch(2), eco.corpus, eco.truth.labels, {});
  const auto& h = r.records.at(CriterionKind::hindex);
  const auto& p = r.records.at(CriterionKind::mostpop);
  const auto& x = r.records.at(CriterionKind::random);
  for (std::size_t i = 0; i < h.size(); ++i) {
    CHECK(h[i].initial_seed.url == p[i].initial_seed.url);
    CHECK(h[i].initial_seed.url == x[i].initial_seed.url);
    CHECK(h[i].config.execution_index == static_cast<int>(i));
  }
}

TEST_CASE("batch series equal an independent replay of the raw records") {
  const auto& eco = small_ecosystem();
  const auto cfg = small_batch(3);
  const auto r = run_batch(cfg, eco.corpus, eco.truth.labels, {});
  for (const auto& [criterion, records] : r.records) {
    std::vector<double> cum(cfg.max_cycles, 0), dens(cfg.max_cycles, 0);
    for (const auto& rec : records) {
      // Read the stored document generically rather than through the parser.
      const auto doc = nlohmann::json::parse(serialize_record(rec));
      int running = 0;
      std::vector<int> hit(cfg.max_cycles, 0);
      for (const auto& c : doc["cycles"]) {
        if (c["top1_label"] == "fake") hit[c["cycle_no"].get<int>() - 1] = 1;
      }
      for (int x = 0; x < cfg.max_cycles; ++x) {
        running += hit[x];
        cum[x] += running;
        dens[x] += hit[x];
      }
    }
    const auto& m = r.series.at(criterion);
    for (int x = 0; x < cfg.max_cycles; ++x) {
      CHECK(m.cumulative_rank1_fake[x].value() == doctest::Approx(cum[x] / records.size()));
      CHECK(m.per_cycle_density[x].value() == doctest::Approx(dens[x] / records.size()));
      CHECK(m.recall_vs_optimal[x].value() == doctest::Approx(cum[x] / records.size() / (x + 1)));
    }
  }
}

TEST_CASE("metrics from stored records match batch metrics") {
  const auto& eco = small_ecosystem();
  const auto r = run_batch(small_batch(2), eco.corpus, eco.truth.labels, {});
  std::vector<ExecutionRecord> all;
  // Feed records back in reverse order via their text form.
  for (const auto& [c, records] : r.records) {
    for (auto it = records.rbegin(); it != records.rend(); ++it) all.push_back(parse_record(serialize_record(*it)));
  }
  const auto grouped = metrics_from_records(all);
  REQUIRE(grouped.size() == 1);
  CHECK(grouped.begin()->first == "fake100");
  CHECK(format_metrics_csv(grouped.begin()->second) == format_metrics_csv(r.series));
}

TEST_CASE("metrics csv layout") {
  std::map<CriterionKind, MetricSeries> series;
  series[CriterionKind::hindex] =
      aggregate_series(std::vector<ExecutionRecord>{record_with_labels({Label::fake, Label::credible})}, 2);
  const auto csv = format_metrics_csv(series);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "cycle,criterion,metric,value");
  CHECK(csv.find("1,hindex,cumulative_rank1_fake,1\n") != std::string::npos);
  CHECK(csv.find("2,hindex,recall_vs_optimal,0.5\n") != std::string::npos);
  CHECK(csv.find("2,hindex,per_cycle_density,0\n") != std::string::npos);
}

TEST_CASE("format_double round trips") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1.0) == "1");
  CHECK(std::stod(format_double(2.0 / 3)) == 2.0 / 3);
}

TEST_CASE("batch config validation") {
  auto b = small_batch(1);
  b.n_executions = 0;
  CHECK_THROWS(b.validate());
  b = small_batch(0);
  CHECK_THROWS(b.validate());
}

}
