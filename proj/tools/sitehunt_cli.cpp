// sitehunt: command line entry point for corpus generation, automated and
// batch executions, metric recomputation and the interactive session server.

#include <algorithm>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>

#include "sitehunt/corpus.hpp"
#include "sitehunt/engine.hpp"
#include "sitehunt/eval.hpp"
#include "sitehunt/io.hpp"
#include "sitehunt/record.hpp"
#include "sitehunt/service.hpp"
#include "sitehunt/synth.hpp"

namespace fs = std::filesystem;
using namespace sitehunt;

namespace {

struct InputFlags {
  std::string posts;
  std::string labels;
  std::string denylist;
  std::string psl;
  std::optional<std::int64_t> since;
  std::optional<std::int64_t> until;
};

void add_input_flags(CLI::App* cmd, InputFlags& in, bool labels_required) {
  cmd->add_option("--posts", in.posts, "Line-delimited JSON posts file")->required()->check(CLI::ExistingFile);
  auto* labels = cmd->add_option("--labels", in.labels, "CSV domain,label file")->check(CLI::ExistingFile);
  if (labels_required) labels->required();
  cmd->add_option("--denylist", in.denylist, "Domains excluded from ranking, one per line")->check(CLI::ExistingFile);
  cmd->add_option("--psl", in.psl, "Public suffix list replacing the bundled snapshot")->check(CLI::ExistingFile);
  cmd->add_option("--since", in.since, "Drop posts with timestamp < SINCE");
  cmd->add_option("--until", in.until, "Drop posts with timestamp >= UNTIL");
}

struct Inputs {
  std::unique_ptr<SuffixList> custom_suffixes;
  std::shared_ptr<const Corpus> corpus;
  std::shared_ptr<const LabelSet> labels;
  std::shared_ptr<const Denylist> denylist;
};

Inputs load_inputs(const InputFlags& flags) {
  Inputs in;
  LoadOptions options;
  if (!flags.psl.empty()) {
    in.custom_suffixes = std::make_unique<SuffixList>(SuffixList::from_file(flags.psl));
    options.suffixes = in.custom_suffixes.get();
  }
  options.window.begin = flags.since;
  options.window.end = flags.until;
  in.corpus = std::make_shared<const Corpus>(load_posts(flags.posts, options));
  if (in.corpus->dropped_urls() > 0) {
    std::cerr << "warning: dropped " << in.corpus->dropped_urls() << " URLs that failed normalization\n";
  }
  if (!flags.labels.empty()) in.labels = std::make_shared<const LabelSet>(load_labels(flags.labels));
  in.denylist = std::make_shared<const Denylist>(flags.denylist.empty() ? Denylist{} : load_denylist(flags.denylist));
  return in;
}

std::string metrics_file(std::string_view seed_set) {
  return "metrics_" + std::string(seed_set) + ".csv";
}

std::vector<ExecutionRecord> load_records(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("records directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ExecutionRecord> records;
  records.reserve(files.size());
  for (const auto& f : files) records.push_back(load_record(f));
  return records;
}

void write_metrics(const fs::path& out_dir, std::span<const ExecutionRecord> records) {
  for (const auto& [seed_set, series] : metrics_from_records(records)) {
    write_file_atomic(out_dir / metrics_file(seed_set), format_metrics_csv(series));
  }
}

std::string record_path(std::string_view seed_set, CriterionKind criterion, int index) {
  char name[32];
  std::snprintf(name, sizeof name, "exec_%04d.json", index);
  return "records/" + std::string(seed_set) + "/" + std::string(to_string(criterion)) + "/" + name;
}

httplib::Server* g_server = nullptr;

void stop_server(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discover low-credibility websites by snowballing through URL sharers"};
  app.require_subcommand(1);
  app.failure_message([](const CLI::App*, const CLI::Error& e) { return "error: " + std::string(e.what()) + "\n"; });

  // gen-synth
  auto* gen = app.add_subcommand("gen-synth", "Generate a synthetic sharing ecosystem");
  std::string gen_config;
  std::optional<std::uint64_t> gen_seed;
  EcosystemConfig eco;
  std::string gen_out;
  gen->add_option("--config", gen_config, "key=value ecosystem config file")->check(CLI::ExistingFile);
  gen->add_option("--rng-seed", gen_seed, "Generator seed");
  auto* o_websites = gen->add_option("--websites", eco.n_websites);
  auto* o_fake = gen->add_option("--fake-fraction", eco.fake_fraction);
  auto* o_urls = gen->add_option("--urls-per-website", eco.urls_per_website);
  auto* o_zipf = gen->add_option("--zipf", eco.zipf_exponent_urls, "Zipf exponent of URL popularity in a website");
  auto* o_users = gen->add_option("--users", eco.n_users);
  auto* o_homophily = gen->add_option("--homophily", eco.homophily);
  auto* o_fake_users = gen->add_option("--fake-user-fraction", eco.fake_user_fraction);
  auto* o_posts = gen->add_option("--posts-per-user", eco.posts_per_user);
  gen->add_option("--out-dir", gen_out, "Output directory")->required();

  // run-auto
  auto* run_auto = app.add_subcommand("run-auto", "Run one automated execution");
  InputFlags auto_in;
  add_input_flags(run_auto, auto_in, false);
  std::string auto_criterion = "hindex";
  std::string auto_seed;
  ExecutionConfig auto_cfg;
  std::optional<std::uint64_t> auto_rng;
  std::string auto_out;
  run_auto->add_option("--criterion", auto_criterion)->check(CLI::IsMember({"hindex", "mostpop", "random"}));
  run_auto->add_option("--initial-seed", auto_seed, "Initial seed URL")->required();
  run_auto->add_option("--cycles", auto_cfg.max_cycles)->check(CLI::PositiveNumber);
  run_auto->add_option("--rng-seed", auto_rng, "Required for --criterion random");
  run_auto->add_option("--top-k", auto_cfg.top_k)->check(CLI::PositiveNumber);
  run_auto->add_option("--ranking-depth", auto_cfg.ranking_depth)->check(CLI::NonNegativeNumber);
  run_auto->add_option("--out-dir", auto_out)->required();

  // run-batch
  auto* batch = app.add_subcommand("run-batch", "Run batches of automated executions and compute metrics");
  InputFlags batch_in;
  add_input_flags(batch, batch_in, true);
  std::vector<std::string> batch_criteria{"hindex", "mostpop", "random"};
  std::vector<std::string> batch_sets{"fake0", "fake50", "fake100"};
  BatchConfig batch_cfg;
  std::optional<std::uint64_t> batch_rng;
  std::string batch_out;
  batch->add_option("--criterion", batch_criteria, "Repeatable")
      ->check(CLI::IsMember({"hindex", "mostpop", "random"}))
      ->delimiter(',');
  batch->add_option("--seed-set", batch_sets, "Repeatable")
      ->check(CLI::IsMember({"fake0", "fake50", "fake100"}))
      ->delimiter(',');
  batch->add_option("--executions", batch_cfg.n_executions)->check(CLI::PositiveNumber);
  batch->add_option("--cycles", batch_cfg.max_cycles)->check(CLI::PositiveNumber);
  batch->add_option("--rng-seed", batch_rng, "Master seed")->required();
  batch->add_option("--top-k", batch_cfg.top_k)->check(CLI::PositiveNumber);
  batch->add_option("--ranking-depth", batch_cfg.ranking_depth)->check(CLI::NonNegativeNumber);
  batch->add_option("--parallel", batch_cfg.parallel, "Worker threads")->check(CLI::PositiveNumber);
  batch->add_option("--out-dir", batch_out)->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Recompute metric CSVs from stored execution records");
  std::string eval_records;
  std::string eval_out;
  eval->add_option("--records", eval_records, "Directory searched recursively for *.json records")->required();
  eval->add_option("--out-dir", eval_out)->required();

  // plot-data
  auto* plot = app.add_subcommand("plot-data", "Write per-figure CSVs from stored execution records");
  std::string plot_records;
  std::string plot_out;
  std::string plot_ranks;
  std::optional<std::int64_t> plot_total;
  std::string plot_labels;
  plot->add_option("--records", plot_records)->required();
  plot->add_option("--out-dir", plot_out)->required();
  auto* o_ranks = plot->add_option("--ranks", plot_ranks, "CSV domain,rank")->check(CLI::ExistingFile);
  plot->add_option("--total-indexed", plot_total, "Number of domains the ranks are drawn from")->needs(o_ranks);
  plot->add_option("--labels", plot_labels)->check(CLI::ExistingFile);

  // serve
  auto* serve = app.add_subcommand("serve", "Serve interactive sessions over HTTP");
  InputFlags serve_in;
  add_input_flags(serve, serve_in, false);
  std::string listen = "127.0.0.1:8080";
  std::string corpus_id = "default";
  std::string record_dir;
  ServiceOptions service_options;
  serve->add_option("--listen", listen, "HOST:PORT");
  serve->add_option("--corpus-id", corpus_id);
  serve->add_option("--record-dir", record_dir, "Write-through directory for session records");
  serve->add_option("--top-k", service_options.default_top_k)->check(CLI::PositiveNumber);
  serve->add_option("--cycles", service_options.default_max_cycles)->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      if (!gen_config.empty()) {
        EcosystemConfig from_file = EcosystemConfig::parse(read_file(gen_config));
        // Flags given on the command line override the file.
        auto keep = [](CLI::Option* opt, auto& field, const auto& file_value) {
          if (opt->count() == 0) field = file_value;
        };
        keep(o_websites, eco.n_websites, from_file.n_websites);
        keep(o_fake, eco.fake_fraction, from_file.fake_fraction);
        keep(o_urls, eco.urls_per_website, from_file.urls_per_website);
        keep(o_zipf, eco.zipf_exponent_urls, from_file.zipf_exponent_urls);
        keep(o_users, eco.n_users, from_file.n_users);
        keep(o_homophily, eco.homophily, from_file.homophily);
        keep(o_fake_users, eco.fake_user_fraction, from_file.fake_user_fraction);
        keep(o_posts, eco.posts_per_user, from_file.posts_per_user);
        if (!gen_seed && read_file(gen_config).find("rng_seed") != std::string::npos) gen_seed = from_file.rng_seed;
      }
      if (!gen_seed) throw std::invalid_argument("--rng-seed is required");
      eco.rng_seed = *gen_seed;
      eco.validate();
      const auto result = generate(eco);
      std::ostringstream posts;
      write_posts(posts, result.corpus.posts());
      std::ostringstream labels;
      write_labels(labels, result.truth.labels);
      const fs::path out = gen_out;
      write_file_atomic(out / "posts.jsonl", posts.str());
      write_file_atomic(out / "labels.csv", labels.str());
      write_file_atomic(out / "ecosystem.conf", eco.to_text());
      return 0;
    }

    if (*run_auto) {
      auto_cfg.criterion = parse_criterion(auto_criterion);
      if (auto_cfg.criterion == CriterionKind::random && !auto_rng) {
        throw std::invalid_argument("--rng-seed is required with --criterion random");
      }
      auto_cfg.rng_seed = auto_rng.value_or(0);
      const Inputs in = load_inputs(auto_in);
      const LabelSet none;
      const auto record = run_auto_execution(*in.corpus, in.labels ? *in.labels : none, *in.denylist, auto_seed, auto_cfg);
      write_file_atomic(fs::path(auto_out) / "execution_record.json", serialize_record(record));
      return 0;
    }

    if (*batch) {
      batch_cfg.master_rng_seed = *batch_rng;
      batch_cfg.criteria.clear();
      for (const auto& c : batch_criteria) batch_cfg.criteria.push_back(parse_criterion(c));
      std::vector<SeedSetType> sets;
      for (const auto& s : batch_sets) sets.push_back(parse_seed_set(s));
      std::sort(sets.begin(), sets.end());
      sets.erase(std::unique(sets.begin(), sets.end()), sets.end());

      const Inputs in = load_inputs(batch_in);
      const fs::path out = batch_out;
      bool valid = true;
      for (auto set : sets) {
        batch_cfg.seed_set = set;
        const auto result = run_batch(batch_cfg, *in.corpus, *in.labels, *in.denylist);
        for (const auto& [criterion, records] : result.records) {
          for (const auto& r : records) {
            write_file_atomic(out / record_path(to_string(set), criterion, r.config.execution_index.value_or(0)),
                              serialize_record(r));
          }
        }
        write_file_atomic(out / metrics_file(to_string(set)), format_metrics_csv(result.series));
        for (const auto& e : result.errors) std::cerr << "error: " << e << '\n';
        valid = valid && result.valid;
      }
      if (!valid) {
        write_file_atomic(out / "INVALID", "batch aborted; metrics cover completed executions only\n");
        return 1;
      }
      return 0;
    }

    if (*eval) {
      const auto records = load_records(eval_records);
      write_metrics(eval_out, records);
      return 0;
    }

    if (*plot) {
      const auto records = load_records(plot_records);
      std::optional<PopularityRanks> ranks;
      if (!plot_ranks.empty()) {
        if (!plot_total) throw std::invalid_argument("--total-indexed is required with --ranks");
        ranks = load_ranks(plot_ranks, *plot_total);
      }
      const LabelSet labels = plot_labels.empty() ? LabelSet{} : load_labels(plot_labels);
      write_plot_data(plot_out, records, ranks ? &*ranks : nullptr, labels);
      return 0;
    }

    if (*serve) {
      const auto colon = listen.rfind(':');
      if (colon == std::string::npos) throw std::invalid_argument("--listen must be HOST:PORT");
      const std::string host = listen.substr(0, colon);
      const int port = std::stoi(listen.substr(colon + 1));
      if (!record_dir.empty()) service_options.record_dir = record_dir;

      Inputs in = load_inputs(serve_in);
      SessionService service(service_options);
      service.add_corpus({corpus_id, in.corpus, in.labels, in.denylist});
      httplib::Server server;
      register_routes(server, service);
      g_server = &server;
      std::signal(SIGINT, stop_server);
      std::signal(SIGTERM, stop_server);
      std::cerr << "listening on " << host << ':' << port << '\n';
      if (!server.listen(host, port)) throw std::runtime_error("cannot listen on " + listen);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
