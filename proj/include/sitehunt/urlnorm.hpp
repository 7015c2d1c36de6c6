#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>

namespace sitehunt {

/// Raised when a raw URL cannot be mapped to a website.
class UrlError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Public suffix rules in the publicsuffix.org list format.
class SuffixList {
 public:
  /// Parses rule text. Comment lines ("//") and blank lines are ignored; only
  /// the first whitespace-delimited token of a line is a rule.
  static SuffixList parse(std::string_view text);
  static SuffixList from_file(const std::filesystem::path& path);
  /// Snapshot compiled into the library (publicsuffix.org list plus the
  /// reserved "example" and "test" TLDs).
  static const SuffixList& builtin();

  /// Registrable domain (public suffix plus one label) of a lowercase host.
  ///
  /// Returns nullopt when the host is itself a public suffix. When no rule
  /// matches, the list's implicit "*" rule applies only if
  /// `allow_unlisted_tld` is set; otherwise the host is rejected.
  std::optional<std::string> registrable_domain(std::string_view host,
                                                bool allow_unlisted_tld = false) const;

  std::size_t size() const { return rules_.size() + wildcards_.size() + exceptions_.size(); }

 private:
  std::unordered_set<std::string> rules_;
  std::unordered_set<std::string> wildcards_;   // "*.foo" stored as "foo"
  std::unordered_set<std::string> exceptions_;  // "!foo" stored as "foo"
};

struct NormalizedUrl {
  /// Host (lowercase, without a leading "www.") followed by the path, with
  /// no scheme, credentials, port, query, fragment or trailing slash.
  std::string canonical;
  /// Registrable domain of the host.
  std::string website;

  friend bool operator==(const NormalizedUrl&, const NormalizedUrl&) = default;
};

/// Canonicalizes an http(s) URL. Throws UrlError for anything else, IP
/// literal hosts, and hosts outside a known public suffix.
NormalizedUrl normalize_url(std::string_view raw, const SuffixList& suffixes = SuffixList::builtin());

std::string website_of(std::string_view raw, const SuffixList& suffixes = SuffixList::builtin());

/// Accepts either a raw http(s) URL or an already canonical URL (no scheme)
/// and returns its normalized form.
NormalizedUrl normalize_url_or_canonical(std::string_view text,
                                         const SuffixList& suffixes = SuffixList::builtin());

/// Lowercases and strips scheme, path, port, trailing dot and a leading
/// "www." from a bare domain as written in label, denylist and rank files.
std::string normalize_domain(std::string_view text);

/// RFC 3492 decoding of one label without the "xn--" prefix, as UTF-8.
std::optional<std::string> punycode_decode(std::string_view encoded);

}  // namespace sitehunt
