#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sitehunt/corpus.hpp"

namespace sitehunt {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameters of a two-camp URL sharing ecosystem.
struct EcosystemConfig {
  std::uint64_t rng_seed = 1;
  int n_websites = 100;
  double fake_fraction = 0.3;
  int urls_per_website = 40;
  double zipf_exponent_urls = 1.0;
  int n_users = 2000;
  /// Probability that a post links to the author's own camp.
  double homophily = 0.9;
  double fake_user_fraction = 0.3;
  int posts_per_user = 20;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;

  /// Flat "key = value" text, one field per line, '#' comments. Unset keys
  /// keep their defaults; unknown keys are an error.
  static EcosystemConfig parse(std::string_view text);
  std::string to_text() const;
};

enum class Camp : std::uint8_t { fake, credible };

struct GroundTruth {
  LabelSet labels;
  std::vector<std::string> fake_websites;
  std::vector<std::string> credible_websites;
  /// Indexed like user_ids.
  std::vector<std::string> user_ids;
  std::vector<Camp> user_camps;
};

struct SyntheticEcosystem {
  Corpus corpus;
  GroundTruth truth;
};

/// Deterministic for a fixed config. Each post carries exactly one URL;
/// posts are ordered by user index, then post index.
SyntheticEcosystem generate(const EcosystemConfig& config);

/// Cumulative Zipf(s) distribution over ranks 1..n, last entry exactly 1.
std::vector<double> zipf_cdf(int n, double exponent);

}  // namespace sitehunt
