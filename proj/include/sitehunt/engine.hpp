#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sitehunt/corpus.hpp"
#include "sitehunt/ranking.hpp"

namespace sitehunt {

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A seed choice that is not among the pending candidates.
class ChoiceError : public EngineError {
 public:
  using EngineError::EngineError;
};

enum class SeedOrigin : std::uint8_t { initial, automatic, human };
std::string_view to_string(SeedOrigin origin);
SeedOrigin parse_seed_origin(std::string_view token);

enum class ExecutionMode : std::uint8_t { automatic, interactive };
std::string_view to_string(ExecutionMode mode);
ExecutionMode parse_execution_mode(std::string_view token);

enum class ExecutionStatus : std::uint8_t {
  running,
  /// Reached max_cycles.
  completed,
  /// A cycle found no eligible website.
  exhausted,
};
std::string_view to_string(ExecutionStatus status);
ExecutionStatus parse_execution_status(std::string_view token);

struct SeedRecord {
  std::string url;  // canonical
  std::string website;
  int cycle_added = 0;
  SeedOrigin origin = SeedOrigin::initial;
  Label label_at_selection = Label::unknown;

  friend bool operator==(const SeedRecord&, const SeedRecord&) = default;
};

struct CycleRecord {
  int cycle_no = 0;
  /// Seed whose sharers were added at the start of this cycle.
  std::string seed_url;
  bool dead_seed = false;
  int new_users_found = 0;
  int cumulative_users = 0;
  /// Number of eligible websites; `ranking` holds at most ranking_depth of them.
  int ranked_websites = 0;
  std::vector<WebsiteScore> ranking;
  std::optional<std::string> top1_website;
  Label top1_label = Label::unknown;
  std::optional<SeedRecord> selected_seed;

  friend bool operator==(const CycleRecord&, const CycleRecord&) = default;
};

struct ExecutionConfig {
  CriterionKind criterion = CriterionKind::hindex;
  ExecutionMode mode = ExecutionMode::automatic;
  /// Seed set the initial seed was drawn from ("fake0", "fake50", "fake100"), if any.
  std::optional<std::string> seed_set;
  std::optional<int> execution_index;
  std::uint64_t rng_seed = 0;
  int max_cycles = 30;
  int ranking_depth = 10;
  int top_k = 10;

  void validate() const;
  friend bool operator==(const ExecutionConfig&, const ExecutionConfig&) = default;
};

struct DiscoveredWebsite {
  std::string website;
  Label label = Label::unknown;
  int cycle = 0;

  friend bool operator==(const DiscoveredWebsite&, const DiscoveredWebsite&) = default;
};

/// Replayable audit trail of one run.
struct ExecutionRecord {
  static constexpr int kVersion = 1;

  ExecutionConfig config;
  SeedRecord initial_seed;
  std::vector<CycleRecord> cycles;
  /// Websites of the selected seeds, in selection order.
  std::vector<DiscoveredWebsite> discovered;
  ExecutionStatus status = ExecutionStatus::running;

  friend bool operator==(const ExecutionRecord&, const ExecutionRecord&) = default;
};

/// Distinct users with at least one post containing `canonical_url`, ascending by id.
std::vector<UserId> find_sharers(const Corpus& corpus, std::string_view canonical_url);

/// One methodology run over borrowed inputs, which must outlive it.
///
/// Each cycle adds the sharers of the newest seed to the cumulative user
/// set, rebuilds the share index without denylisted and already seeded
/// websites, and ranks what remains. The cycle is then closed by selecting
/// a seed, which excludes its website from every later cycle.
class Execution {
 public:
  /// Throws EngineError when the initial seed cannot be normalized or no
  /// post in the corpus contains it.
  Execution(const Corpus& corpus, const LabelSet& labels, const Denylist& denylist,
            std::string_view initial_seed, ExecutionConfig config);

  /// Starts the next cycle. Returns false and finishes the execution (status
  /// exhausted) when no website is eligible.
  bool begin_cycle();

  /// Closes the open cycle with `url` (raw or canonical) as the new seed.
  /// Human choices must be one of pending_candidates(); otherwise a
  /// ChoiceError is thrown and nothing changes.
  void select_seed(std::string_view url, SeedOrigin origin);

  /// The automated rule: most shared URL of the top-ranked website.
  std::string automatic_choice() const;

  bool cycle_open() const { return cycle_open_; }
  bool finished() const { return record_.status != ExecutionStatus::running; }
  int current_cycle() const { return cycle_open_ ? open_.cycle_no : static_cast<int>(record_.cycles.size()); }

  /// Valid while a cycle is open.
  const ShareIndex& index() const { return index_; }
  const std::vector<WebsiteScore>& ranking() const { return ranking_; }
  const std::vector<Candidate>& pending_candidates() const { return candidates_; }
  const CycleRecord& open_cycle() const { return open_; }

  const UserSet& users() const { return users_; }
  const std::set<std::string, std::less<>>& excluded_websites() const { return excluded_; }
  const ExecutionRecord& record() const { return record_; }
  const Corpus& corpus() const { return *corpus_; }
  const LabelSet& labels() const { return *labels_; }

 private:
  const Corpus* corpus_;
  const LabelSet* labels_;
  const Denylist* denylist_;
  ExecutionRecord record_;
  UserSet users_;
  std::set<std::string, std::less<>> excluded_;
  std::string pending_seed_;

  bool cycle_open_ = false;
  CycleRecord open_;
  ShareIndex index_;
  std::vector<WebsiteScore> ranking_;
  std::vector<Candidate> candidates_;
};

/// Runs cycles until max_cycles or exhaustion, always seeding with the most
/// shared URL of the top-ranked website.
ExecutionRecord run_auto_execution(const Corpus& corpus, const LabelSet& labels, const Denylist& denylist,
                                   std::string_view initial_seed, ExecutionConfig config);

enum class SessionStatus : std::uint8_t { awaiting_choice, running, finished };
std::string_view to_string(SessionStatus status);

/// Interactive run: every cycle suspends until a human picks a candidate.
class Session {
 public:
  Session(const Corpus& corpus, const LabelSet& labels, const Denylist& denylist, std::string_view initial_seed,
          ExecutionConfig config);

  SessionStatus status() const { return status_; }
  /// Throws EngineError if the session is finished and ChoiceError if `url`
  /// is not a pending candidate; in both cases the state is unchanged.
  void choose_seed(std::string_view url);

  const Execution& execution() const { return execution_; }
  const ExecutionRecord& record() const { return execution_.record(); }
  const std::vector<Candidate>& pending_candidates() const { return execution_.pending_candidates(); }

 private:
  void advance();

  Execution execution_;
  SessionStatus status_ = SessionStatus::running;
};

}  // namespace sitehunt
