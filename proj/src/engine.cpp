#include "sitehunt/engine.hpp"

#include <algorithm>

#include "sitehunt/rng.hpp"

namespace sitehunt {

std::string_view to_string(SeedOrigin origin) {
  switch (origin) {
    case SeedOrigin::initial:
      return "initial";
    case SeedOrigin::automatic:
      return "auto";
    case SeedOrigin::human:
      return "human";
  }
  return "initial";
}

SeedOrigin parse_seed_origin(std::string_view token) {
  if (token == "initial") return SeedOrigin::initial;
  if (token == "auto") return SeedOrigin::automatic;
  if (token == "human") return SeedOrigin::human;
  throw std::invalid_argument("unknown seed origin '" + std::string(token) + "'");
}

std::string_view to_string(ExecutionMode mode) {
  return mode == ExecutionMode::automatic ? "auto" : "interactive";
}

ExecutionMode parse_execution_mode(std::string_view token) {
  if (token == "auto") return ExecutionMode::automatic;
  if (token == "interactive") return ExecutionMode::interactive;
  throw std::invalid_argument("unknown execution mode '" + std::string(token) + "'");
}

std::string_view to_string(ExecutionStatus status) {
  switch (status) {
    case ExecutionStatus::running:
      return "running";
    case ExecutionStatus::completed:
      return "completed";
    case ExecutionStatus::exhausted:
      return "exhausted";
  }
  return "running";
}

ExecutionStatus parse_execution_status(std::string_view token) {
  if (token == "running") return ExecutionStatus::running;
  if (token == "completed") return ExecutionStatus::completed;
  if (token == "exhausted") return ExecutionStatus::exhausted;
  throw std::invalid_argument("unknown execution status '" + std::string(token) + "'");
}

std::string_view to_string(SessionStatus status) {
  switch (status) {
    case SessionStatus::awaiting_choice:
      return "awaiting_choice";
    case SessionStatus::running:
      return "running";
    case SessionStatus::finished:
      return "finished";
  }
  return "running";
}

void ExecutionConfig::validate() const {
  if (max_cycles < 1) throw std::invalid_argument("max_cycles must be >= 1");
  if (ranking_depth < 0) throw std::invalid_argument("ranking_depth must be >= 0");
  if (top_k < 1) throw std::invalid_argument("top_k must be >= 1");
}

std::vector<UserId> find_sharers(const Corpus& corpus, std::string_view canonical_url) {
  auto url = corpus.find_url(canonical_url);
  if (!url) return {};
  auto sharers = corpus.url_sharers(*url);
  return {sharers.begin(), sharers.end()};
}

Execution::Execution(const Corpus& corpus, const LabelSet& labels, const Denylist& denylist,
                     std::string_view initial_seed, ExecutionConfig config)
    : corpus_(&corpus), labels_(&labels), denylist_(&denylist), users_(corpus.user_count()) {
  config.validate();
  NormalizedUrl seed;
  try {
    seed = normalize_url_or_canonical(initial_seed, corpus.suffixes());
  } catch (const UrlError& e) {
    throw EngineError(std::string("invalid initial seed: ") + e.what());
  }
  if (find_sharers(corpus, seed.canonical).empty()) {
    throw EngineError("initial seed not shared by any user in the corpus: " + seed.canonical);
  }
  record_.config = std::move(config);
  record_.initial_seed = SeedRecord{seed.canonical, seed.website, 0, SeedOrigin::initial, labels.lookup(seed.website)};
  excluded_.insert(seed.website);
  pending_seed_ = seed.canonical;
}

bool Execution::begin_cycle() {
  if (finished()) throw EngineError("execution already finished");
  if (cycle_open_) throw EngineError("cycle " + std::to_string(open_.cycle_no) + " is still open");

  open_ = CycleRecord{};
  open_.cycle_no = static_cast<int>(record_.cycles.size()) + 1;
  open_.seed_url = pending_seed_;
  const auto sharers = find_sharers(*corpus_, pending_seed_);
  open_.dead_seed = sharers.empty();
  for (UserId u : sharers) {
    if (users_.insert(u)) ++open_.new_users_found;
  }
  open_.cumulative_users = static_cast<int>(users_.size());

  index_ = build_index(*corpus_, users_, *denylist_, excluded_);
  const Criterion criterion{record_.config.criterion,
                            mix_seed(record_.config.rng_seed, static_cast<std::uint64_t>(open_.cycle_no))};
  ranking_ = rank_websites(index_, criterion);
  open_.ranked_websites = static_cast<int>(ranking_.size());
  const auto depth = std::min(ranking_.size(), static_cast<std::size_t>(record_.config.ranking_depth));
  open_.ranking.assign(ranking_.begin(), ranking_.begin() + static_cast<std::ptrdiff_t>(depth));

  if (ranking_.empty()) {
    candidates_.clear();
    record_.cycles.push_back(open_);
    record_.status = ExecutionStatus::exhausted;
    return false;
  }
  open_.top1_website = ranking_.front().website;
  open_.top1_label = labels_->lookup(ranking_.front().website);
  candidates_ = candidates(ranking_, index_, record_.config.top_k);
  cycle_open_ = true;
  return true;
}

std::string Execution::automatic_choice() const {
  if (!cycle_open_) throw EngineError("no open cycle");
  return rank_urls(index_, ranking_.front().website).front().url;
}

void Execution::select_seed(std::string_view url, SeedOrigin origin) {
  if (!cycle_open_) throw EngineError("no open cycle");
  NormalizedUrl chosen;
  try {
    chosen = normalize_url_or_canonical(url, corpus_->suffixes());
  } catch (const UrlError& e) {
    throw ChoiceError(std::string("invalid seed URL: ") + e.what());
  }

  if (origin == SeedOrigin::human) {
    const bool listed = std::any_of(candidates_.begin(), candidates_.end(), [&](const Candidate& c) {
      return std::any_of(c.urls.begin(), c.urls.end(), [&](const UrlRank& u) { return u.url == chosen.canonical; });
    });
    if (!listed) throw ChoiceError("not a pending candidate: " + chosen.canonical);
  } else if (origin == SeedOrigin::automatic) {
    const auto* site = index_.find(chosen.website);
    const bool indexed = site && std::any_of(site->urls.begin(), site->urls.end(), [&](const auto& u) {
      return corpus_->url_name(u.url) == chosen.canonical;
    });
    if (!indexed) throw ChoiceError("seed not in the current index: " + chosen.canonical);
  } else {
    throw ChoiceError("the initial seed cannot be selected in a cycle");
  }

  SeedRecord seed{chosen.canonical, chosen.website, open_.cycle_no, origin, labels_->lookup(chosen.website)};
  excluded_.insert(seed.website);
  record_.discovered.push_back({seed.website, seed.label_at_selection, open_.cycle_no});
  pending_seed_ = seed.url;
  open_.selected_seed = std::move(seed);
  record_.cycles.push_back(open_);
  cycle_open_ = false;
  candidates_.clear();
  if (static_cast<int>(record_.cycles.size()) >= record_.config.max_cycles) {
    record_.status = ExecutionStatus::completed;
  }
}

ExecutionRecord run_auto_execution(const Corpus& corpus, const LabelSet& labels, const Denylist& denylist,
                                   std::string_view initial_seed, ExecutionConfig config) {
  config.mode = ExecutionMode::automatic;
  Execution execution(corpus, labels, denylist, initial_seed, std::move(config));
  while (!execution.finished() && execution.begin_cycle()) {
    execution.select_seed(execution.automatic_choice(), SeedOrigin::automatic);
  }
  return execution.record();
}

namespace {
ExecutionConfig interactive(ExecutionConfig config) {
  config.mode = ExecutionMode::interactive;
  return config;
}
}  // namespace

Session::Session(const Corpus& corpus, const LabelSet& labels, const Denylist& denylist,
                 std::string_view initial_seed, ExecutionConfig config)
    : execution_(corpus, labels, denylist, initial_seed, interactive(std::move(config))) {
  advance();
}

void Session::advance() {
  status_ = SessionStatus::running;
  status_ = execution_.begin_cycle() ? SessionStatus::awaiting_choice : SessionStatus::finished;
}

void Session::choose_seed(std::string_view url) {
  if (status_ != SessionStatus::awaiting_choice) throw EngineError("session is finished");
  execution_.select_seed(url, SeedOrigin::human);
  if (execution_.finished()) {
    status_ = SessionStatus::finished;
  } else {
    advance();
  }
}

}  // namespace sitehunt
