#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sitehunt/corpus.hpp"
#include "sitehunt/engine.hpp"
#include "sitehunt/rng.hpp"

namespace sitehunt {

enum class SeedSetType : std::uint8_t { fake0, fake50, fake100 };
std::string_view to_string(SeedSetType type);
SeedSetType parse_seed_set(std::string_view token);

/// Draws `count` initial seeds whose website labels match the set type:
/// fake100 only fake, fake0 only credible, fake50 a fair coin per draw.
///
/// Draws are share-weighted: a URL is picked with probability proportional
/// to the number of posts containing it. Throws EngineError naming the
/// missing class when the corpus has no share of a required label.
std::vector<NormalizedUrl> build_seed_pool(const Corpus& corpus, const LabelSet& labels, SeedSetType type,
                                           Rng& rng, std::size_t count);

/// Exact non-negative fraction; metric values are kept exact so identities
/// between them hold without rounding.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Ratio& a, const Ratio& b) { return a.num * b.den == b.num * a.den; }
  friend Ratio operator*(const Ratio& a, std::int64_t k) { return {a.num * k, a.den}; }
};

/// Per-cycle metrics of one execution, index 0 is cycle 1.
struct ExecutionSeries {
  std::vector<int> cumulative_rank1_fake;
  std::vector<int> rank1_fake;
  std::vector<Ratio> recall_vs_optimal;
};

/// Cycles that never ran (early termination) and cycles without a top-1
/// website count as non-fake. Unknown labels count as non-fake.
ExecutionSeries execution_series(const ExecutionRecord& record, int max_cycles);

/// Per-cycle means over executions, index 0 is cycle 1.
struct MetricSeries {
  int n_executions = 0;
  std::vector<Ratio> cumulative_rank1_fake;
  std::vector<Ratio> per_cycle_density;
  std::vector<Ratio> recall_vs_optimal;
  std::vector<int> cumulative_min;
  std::vector<int> cumulative_max;
};

MetricSeries aggregate_series(std::span<const ExecutionRecord> records, int max_cycles);

struct BatchConfig {
  int n_executions = 40;
  int max_cycles = 30;
  std::vector<CriterionKind> criteria{CriterionKind::hindex, CriterionKind::mostpop, CriterionKind::random};
  SeedSetType seed_set = SeedSetType::fake100;
  std::uint64_t master_rng_seed = 0;
  int ranking_depth = 10;
  int top_k = 10;
  /// Worker threads; results do not depend on it.
  int parallel = 1;

  void validate() const;
};

struct BatchResult {
  std::map<CriterionKind, MetricSeries> series;
  /// Ordered by execution index.
  std::map<CriterionKind, std::vector<ExecutionRecord>> records;
  /// False when any execution failed; records then hold only completed runs.
  bool valid = true;
  std::vector<std::string> errors;
};

/// Execution i of every criterion starts from seed i of one seed pool drawn
/// from the master seed, and owns rng stream (master, criterion, i).
BatchResult run_batch(const BatchConfig& config, const Corpus& corpus, const LabelSet& labels,
                      const Denylist& denylist);

/// "cycle,criterion,metric,value" rows, criteria in enum order.
std::string format_metrics_csv(const std::map<CriterionKind, MetricSeries>& series);

/// Groups records by seed set and criterion and recomputes their series.
/// Throws EngineError when records of one group disagree on max_cycles.
std::map<std::string, std::map<CriterionKind, MetricSeries>> metrics_from_records(
    std::span<const ExecutionRecord> records);

struct CdfPoint {
  /// rank / total_indexed; nullopt is the unranked bucket.
  std::optional<double> percentile;
  double cumulative_fraction = 0.0;

  friend bool operator==(const CdfPoint&, const CdfPoint&) = default;
};

/// Popularity CDF of the distinct fake-labeled websites in `discovered` (all
/// of them when `labels` is empty). Unranked sites form a final bucket, so
/// the last point is always 1.
std::vector<CdfPoint> popularity_cdf(std::span<const std::string> discovered, const PopularityRanks& ranks,
                                     const LabelSet& labels);

/// Shortest round-trip decimal form.
std::string format_double(double value);

/// Writes per-figure CSVs (cumulative by seed set, criteria comparison,
/// per-cycle density, recall, and the popularity CDF when ranks are given).
void write_plot_data(const std::filesystem::path& out_dir, std::span<const ExecutionRecord> records,
                     const PopularityRanks* ranks, const LabelSet& labels);

}  // namespace sitehunt
