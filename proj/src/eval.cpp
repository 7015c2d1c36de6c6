#include "sitehunt/eval.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "sitehunt/io.hpp"

namespace sitehunt {

std::string_view to_string(SeedSetType type) {
  switch (type) {
    case SeedSetType::fake0:
      return "fake0";
    case SeedSetType::fake50:
      return "fake50";
    case SeedSetType::fake100:
      return "fake100";
  }
  return "fake100";
}

SeedSetType parse_seed_set(std::string_view token) {
  if (token == "fake0") return SeedSetType::fake0;
  if (token == "fake50") return SeedSetType::fake50;
  if (token == "fake100") return SeedSetType::fake100;
  throw std::invalid_argument("unknown seed set '" + std::string(token) + "'");
}

std::vector<NormalizedUrl> build_seed_pool(const Corpus& corpus, const LabelSet& labels, SeedSetType type,
                                           Rng& rng, std::size_t count) {
  std::vector<UrlId> fake_shares;
  std::vector<UrlId> credible_shares;
  for (const auto& share : corpus.shares()) {
    switch (labels.lookup(corpus.website_name(corpus.url_website(share.url)))) {
      case Label::fake:
        fake_shares.push_back(share.url);
        break;
      case Label::credible:
        credible_shares.push_back(share.url);
        break;
      case Label::unknown:
        break;
    }
  }
  if (type != SeedSetType::fake0 && fake_shares.empty()) {
    throw EngineError("seed pool " + std::string(to_string(type)) + ": corpus has no URL of a fake-labeled website");
  }
  if (type != SeedSetType::fake100 && credible_shares.empty()) {
    throw EngineError("seed pool " + std::string(to_string(type)) +
                      ": corpus has no URL of a credible-labeled website");
  }

  std::vector<NormalizedUrl> pool;
  pool.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    bool fake = type == SeedSetType::fake100;
    if (type == SeedSetType::fake50) fake = rng.bernoulli(0.5);
    const auto& shares = fake ? fake_shares : credible_shares;
    const UrlId url = shares[rng.below(shares.size())];
    pool.push_back({corpus.url_name(url), corpus.website_name(corpus.url_website(url))});
  }
  return pool;
}

ExecutionSeries execution_series(const ExecutionRecord& record, int max_cycles) {
  ExecutionSeries s;
  s.rank1_fake.assign(static_cast<std::size_t>(max_cycles), 0);
  for (const auto& cycle : record.cycles) {
    if (cycle.cycle_no < 1 || cycle.cycle_no > max_cycles) continue;
    if (cycle.top1_website && cycle.top1_label == Label::fake) {
      s.rank1_fake[static_cast<std::size_t>(cycle.cycle_no - 1)] = 1;
    }
  }
  int running = 0;
  for (int x = 1; x <= max_cycles; ++x) {
    running += s.rank1_fake[static_cast<std::size_t>(x - 1)];
    s.cumulative_rank1_fake.push_back(running);
    s.recall_vs_optimal.push_back({running, x});
  }
  return s;
}

MetricSeries aggregate_series(std::span<const ExecutionRecord> records, int max_cycles) {
  MetricSeries m;
  m.n_executions = static_cast<int>(records.size());
  const auto n = static_cast<std::size_t>(max_cycles);
  std::vector<std::int64_t> cumulative_sum(n, 0);
  std::vector<std::int64_t> density_sum(n, 0);
  m.cumulative_min.assign(n, 0);
  m.cumulative_max.assign(n, 0);
  bool first = true;
  for (const auto& record : records) {
    const auto s = execution_series(record, max_cycles);
    for (std::size_t i = 0; i < n; ++i) {
      cumulative_sum[i] += s.cumulative_rank1_fake[i];
      density_sum[i] += s.rank1_fake[i];
      m.cumulative_min[i] = first ? s.cumulative_rank1_fake[i] : std::min(m.cumulative_min[i], s.cumulative_rank1_fake[i]);
      m.cumulative_max[i] = first ? s.cumulative_rank1_fake[i] : std::max(m.cumulative_max[i], s.cumulative_rank1_fake[i]);
    }
    first = false;
  }
  const std::int64_t execs = std::max<std::int64_t>(m.n_executions, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = static_cast<std::int64_t>(i + 1);
    m.cumulative_rank1_fake.push_back({cumulative_sum[i], execs});
    m.per_cycle_density.push_back({density_sum[i], execs});
    m.recall_vs_optimal.push_back({cumulative_sum[i], execs * x});
  }
  return m;
}

void BatchConfig::validate() const {
  if (n_executions < 1) throw std::invalid_argument("n_executions must be >= 1");
  if (max_cycles < 1) throw std::invalid_argument("max_cycles must be >= 1");
  if (criteria.empty()) throw std::invalid_argument("at least one criterion is required");
  if (parallel < 1) throw std::invalid_argument("parallel must be >= 1");
  if (top_k < 1) throw std::invalid_argument("top_k must be >= 1");
  if (ranking_depth < 0) throw std::invalid_argument("ranking_depth must be >= 0");
}

BatchResult run_batch(const BatchConfig& config, const Corpus& corpus, const LabelSet& labels,
                      const Denylist& denylist) {
  config.validate();
  std::vector<CriterionKind> criteria = config.criteria;
  std::sort(criteria.begin(), criteria.end());
  criteria.erase(std::unique(criteria.begin(), criteria.end()), criteria.end());

  Rng pool_rng = Rng::derive(config.master_rng_seed, std::string("seed-pool/") + std::string(to_string(config.seed_set)));
  const auto seeds =
      build_seed_pool(corpus, labels, config.seed_set, pool_rng, static_cast<std::size_t>(config.n_executions));

  struct Job {
    CriterionKind criterion;
    int index;
  };
  std::vector<Job> jobs;
  for (auto c : criteria) {
    for (int i = 0; i < config.n_executions; ++i) jobs.push_back({c, i});
  }
  std::vector<std::optional<ExecutionRecord>> results(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) break;
      const Job& job = jobs[j];
      ExecutionConfig ec;
      ec.criterion = job.criterion;
      ec.seed_set = std::string(to_string(config.seed_set));
      ec.execution_index = job.index;
      ec.rng_seed = mix_seed(mix_seed(config.master_rng_seed, hash_tag(std::string("execution/") +
                                                                      std::string(to_string(job.criterion)))),
                             static_cast<std::uint64_t>(job.index));
      ec.max_cycles = config.max_cycles;
      ec.ranking_depth = config.ranking_depth;
      ec.top_k = config.top_k;
      try {
        results[j] = run_auto_execution(corpus, labels, denylist, seeds[static_cast<std::size_t>(job.index)].canonical,
                                        std::move(ec));
      } catch (const std::exception& e) {
        errors[j] = std::string(to_string(job.criterion)) + " execution " + std::to_string(job.index) + ": " + e.what();
        failed.store(true);
      }
    }
  };
  const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(config.parallel), jobs.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  BatchResult out;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (!errors[j].empty()) out.errors.push_back(errors[j]);
    if (results[j]) out.records[jobs[j].criterion].push_back(std::move(*results[j]));
  }
  out.valid = out.errors.empty();
  for (auto c : criteria) {
    out.series[c] = aggregate_series(out.records[c], config.max_cycles);
  }
  return out;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string format_metrics_csv(const std::map<CriterionKind, MetricSeries>& series) {
  std::ostringstream out;
  out << "cycle,criterion,metric,value\n";
  for (const auto& [criterion, m] : series) {
    const auto name = to_string(criterion);
    for (std::size_t i = 0; i < m.cumulative_rank1_fake.size(); ++i) {
      const auto cycle = i + 1;
      out << cycle << ',' << name << ",cumulative_rank1_fake," << format_double(m.cumulative_rank1_fake[i].value()) << '\n';
      out << cycle << ',' << name << ",cumulative_rank1_fake_min," << m.cumulative_min[i] << '\n';
      out << cycle << ',' << name << ",cumulative_rank1_fake_max," << m.cumulative_max[i] << '\n';
      out << cycle << ',' << name << ",per_cycle_density," << format_double(m.per_cycle_density[i].value()) << '\n';
      out << cycle << ',' << name << ",recall_vs_optimal," << format_double(m.recall_vs_optimal[i].value()) << '\n';
    }
  }
  return out.str();
}

std::map<std::string, std::map<CriterionKind, MetricSeries>> metrics_from_records(
    std::span<const ExecutionRecord> records) {
  struct Group {
    int max_cycles = 0;
    std::vector<const ExecutionRecord*> members;
  };
  std::map<std::pair<std::string, CriterionKind>, Group> groups;
  for (const auto& r : records) {
    auto& g = groups[{r.config.seed_set.value_or("none"), r.config.criterion}];
    if (!g.members.empty() && g.max_cycles != r.config.max_cycles) {
      throw EngineError("records of one group disagree on max_cycles");
    }
    g.max_cycles = r.config.max_cycles;
    g.members.push_back(&r);
  }
  std::map<std::string, std::map<CriterionKind, MetricSeries>> out;
  for (auto& [key, g] : groups) {
    std::stable_sort(g.members.begin(), g.members.end(), [](const auto* a, const auto* b) {
      return a->config.execution_index.value_or(0) < b->config.execution_index.value_or(0);
    });
    std::vector<ExecutionRecord> ordered;
    ordered.reserve(g.members.size());
    for (const auto* r : g.members) ordered.push_back(*r);
    out[key.first][key.second] = aggregate_series(ordered, g.max_cycles);
  }
  return out;
}

std::vector<CdfPoint> popularity_cdf(std::span<const std::string> discovered, const PopularityRanks& ranks,
                                     const LabelSet& labels) {
  std::set<std::string> sites;
  for (const auto& site : discovered) {
    if (labels.empty() || labels.lookup(site) == Label::fake) sites.insert(normalize_domain(site));
  }
  std::vector<double> percentiles;
  std::size_t unranked = 0;
  for (const auto& site : sites) {
    if (auto p = ranks.percentile(site)) {
      percentiles.push_back(*p);
    } else {
      ++unranked;
    }
  }
  std::sort(percentiles.begin(), percentiles.end());
  const auto total = static_cast<double>(sites.size());
  std::vector<CdfPoint> cdf;
  for (std::size_t i = 0; i < percentiles.size(); ++i) {
    if (i + 1 < percentiles.size() && percentiles[i + 1] == percentiles[i]) continue;
    cdf.push_back({percentiles[i], static_cast<double>(i + 1) / total});
  }
  if (unranked > 0) cdf.push_back({std::nullopt, 1.0});
  return cdf;
}

void write_plot_data(const std::filesystem::path& out_dir, std::span<const ExecutionRecord> records,
                     const PopularityRanks* ranks, const LabelSet& labels) {
  const auto metrics = metrics_from_records(records);

  std::ostringstream fig3;
  fig3 << "criterion,seed_set,cycle,mean,min,max\n";
  for (const auto kind : {CriterionKind::hindex, CriterionKind::mostpop, CriterionKind::random}) {
    for (const auto& [seed_set, by_criterion] : metrics) {
      auto it = by_criterion.find(kind);
      if (it == by_criterion.end()) continue;
      const auto& m = it->second;
      for (std::size_t i = 0; i < m.cumulative_rank1_fake.size(); ++i) {
        fig3 << to_string(kind) << ',' << seed_set << ',' << i + 1 << ','
             << format_double(m.cumulative_rank1_fake[i].value()) << ',' << m.cumulative_min[i] << ','
             << m.cumulative_max[i] << '\n';
      }
    }
  }
  write_file_atomic(out_dir / "fig3_cumulative_by_seed_set.csv", fig3.str());

  // Criteria comparisons use the fake100 seed set.
  std::ostringstream fig4a;
  std::ostringstream fig4b;
  std::ostringstream fig4c;
  fig4a << "criterion,cycle,cumulative_rank1_fake\n";
  fig4b << "criterion,cycle,per_cycle_density\n";
  fig4c << "criterion,cycle,recall_vs_optimal\n";
  if (auto it = metrics.find("fake100"); it != metrics.end()) {
    for (const auto& [kind, m] : it->second) {
      for (std::size_t i = 0; i < m.cumulative_rank1_fake.size(); ++i) {
        fig4a << to_string(kind) << ',' << i + 1 << ',' << format_double(m.cumulative_rank1_fake[i].value()) << '\n';
        fig4b << to_string(kind) << ',' << i + 1 << ',' << format_double(m.per_cycle_density[i].value()) << '\n';
        fig4c << to_string(kind) << ',' << i + 1 << ',' << format_double(m.recall_vs_optimal[i].value()) << '\n';
      }
    }
  }
  write_file_atomic(out_dir / "fig4a_criteria_fake100.csv", fig4a.str());
  write_file_atomic(out_dir / "fig4b_density_fake100.csv", fig4b.str());
  write_file_atomic(out_dir / "fig4c_recall_fake100.csv", fig4c.str());

  if (ranks) {
    // Websites discovered by H-index executions; labels fall back to the
    // labels recorded at discovery time.
    std::vector<std::string> discovered;
    LabelSet recorded;
    for (const auto& r : records) {
      if (r.config.criterion != CriterionKind::hindex) continue;
      for (const auto& d : r.discovered) {
        discovered.push_back(d.website);
        if (d.label != Label::unknown) recorded.set(d.website, d.label);
      }
    }
    const auto cdf = popularity_cdf(discovered, *ranks, labels.empty() ? recorded : labels);
    std::ostringstream fig5;
    fig5 << "percentile,cumulative_fraction\n";
    for (const auto& p : cdf) {
      fig5 << (p.percentile ? format_double(*p.percentile) : std::string("unranked")) << ','
           << format_double(p.cumulative_fraction) << '\n';
    }
    write_file_atomic(out_dir / "fig5_popularity_cdf.csv", fig5.str());
  }
}

}  // namespace sitehunt
