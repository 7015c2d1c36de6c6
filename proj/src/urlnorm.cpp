#include "sitehunt/urlnorm.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <vector>

namespace sitehunt {

namespace detail {
std::string_view builtin_suffix_data();
}

namespace {

constexpr std::string_view kWhitespace = " \t\r\n\f\v";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(kWhitespace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kWhitespace);
  return s.substr(first, last - first + 1);
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<std::string_view> split_labels(std::string_view host) {
  std::vector<std::string_view> labels;
  std::size_t start = 0;
  while (true) {
    const auto dot = host.find('.', start);
    labels.push_back(host.substr(start, dot == std::string_view::npos ? dot : dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return labels;
}

// Rules and hosts are compared with IDN labels in their Unicode form.
std::string match_form(std::string_view label) {
  std::string lower = ascii_lower(label);
  if (lower.size() > 4 && lower.starts_with("xn--")) {
    if (auto decoded = punycode_decode(std::string_view(lower).substr(4))) return *decoded;
  }
  return lower;
}

std::string rule_key(std::string_view rule) {
  std::string key;
  for (auto label : split_labels(rule)) {
    if (!key.empty()) key.push_back('.');
    key += match_form(label);
  }
  return key;
}

bool valid_host_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_' || c >= 0x80;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

SuffixList SuffixList::parse(std::string_view text) {
  SuffixList list;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty() || line.starts_with("//")) continue;
    line = line.substr(0, line.find_first_of(kWhitespace));
    if (line.starts_with('!')) {
      list.exceptions_.insert(rule_key(line.substr(1)));
    } else if (line.starts_with("*.")) {
      list.wildcards_.insert(rule_key(line.substr(2)));
    } else if (line != "*") {
      list.rules_.insert(rule_key(line));
    }
  }
  return list;
}

SuffixList SuffixList::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open public suffix file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const SuffixList& SuffixList::builtin() {
  static const SuffixList list = parse(detail::builtin_suffix_data());
  return list;
}

std::optional<std::string> SuffixList::registrable_domain(std::string_view host,
                                                          bool allow_unlisted_tld) const {
  if (host.empty()) return std::nullopt;
  const auto labels = split_labels(host);
  const std::size_t n = labels.size();
  for (auto label : labels) {
    if (label.empty()) return std::nullopt;
  }

  std::size_t suffix_len = 0;
  std::size_t exception_len = 0;
  std::string suffix;
  std::string previous;
  for (std::size_t i = 1; i <= n; ++i) {
    previous = suffix;
    std::string label = match_form(labels[n - i]);
    suffix = suffix.empty() ? label : label + "." + suffix;
    if (exceptions_.contains(suffix)) exception_len = i;
    if (rules_.contains(suffix)) suffix_len = i;
    if (i >= 2 && wildcards_.contains(previous)) suffix_len = i;
  }
  if (exception_len > 0) suffix_len = exception_len - 1;
  if (suffix_len == 0) {
    if (!allow_unlisted_tld) return std::nullopt;
    suffix_len = 1;
  }
  if (n <= suffix_len) return std::nullopt;

  std::string out;
  for (std::size_t i = n - suffix_len - 1; i < n; ++i) {
    if (!out.empty()) out.push_back('.');
    out += ascii_lower(labels[i]);
  }
  return out;
}

NormalizedUrl normalize_url(std::string_view raw, const SuffixList& suffixes) {
  const std::string_view text = trim(raw);
  for (unsigned char c : text) {
    if (c <= 0x20 || c == 0x7F) throw UrlError("not a URL (contains whitespace or control characters): " + std::string(raw));
  }
  const auto scheme_end = text.find("://");
  if (scheme_end == std::string_view::npos) throw UrlError("not a URL (missing scheme): " + std::string(raw));
  const std::string scheme = ascii_lower(text.substr(0, scheme_end));
  if (scheme != "http" && scheme != "https") throw UrlError("unsupported scheme '" + scheme + "': " + std::string(raw));

  const std::string_view rest = text.substr(scheme_end + 3);
  const auto authority_end = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, authority_end);
  const std::string_view remainder = authority_end == std::string_view::npos ? std::string_view{} : rest.substr(authority_end);

  if (auto at = authority.rfind('@'); at != std::string_view::npos) authority = authority.substr(at + 1);
  if (authority.starts_with('[')) throw UrlError("IP literal host: " + std::string(raw));
  if (auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    const auto port = authority.substr(colon + 1);
    if (!port.empty() && !all_digits(port)) throw UrlError("invalid port: " + std::string(raw));
    authority = authority.substr(0, colon);
  }

  std::string host = ascii_lower(authority);
  if (host.ends_with('.')) host.pop_back();
  if (host.empty()) throw UrlError("empty host: " + std::string(raw));
  for (unsigned char c : host) {
    if (c != '.' && !valid_host_char(c)) throw UrlError("invalid host character: " + std::string(raw));
  }
  const auto labels = split_labels(host);
  if (std::any_of(labels.begin(), labels.end(), [](auto l) { return l.empty(); })) {
    throw UrlError("empty host label: " + std::string(raw));
  }
  if (all_digits(labels.back())) throw UrlError("IP literal host: " + std::string(raw));

  auto website = suffixes.registrable_domain(host);
  if (!website) throw UrlError("host not under a known public suffix: " + std::string(raw));

  std::string_view path = remainder.substr(0, remainder.find_first_of("?#"));
  while (path.ends_with('/')) path.remove_suffix(1);

  std::string_view canonical_host = host;
  if (canonical_host.starts_with("www.") && canonical_host.size() - 4 >= website->size()) {
    canonical_host.remove_prefix(4);
  }
  NormalizedUrl out;
  out.canonical.reserve(canonical_host.size() + path.size());
  out.canonical.append(canonical_host).append(path);
  out.website = std::move(*website);
  return out;
}

std::string website_of(std::string_view raw, const SuffixList& suffixes) {
  return normalize_url(raw, suffixes).website;
}

NormalizedUrl normalize_url_or_canonical(std::string_view text, const SuffixList& suffixes) {
  const std::string_view trimmed = trim(text);
  if (trimmed.find("://") != std::string_view::npos) return normalize_url(trimmed, suffixes);
  return normalize_url("https://" + std::string(trimmed), suffixes);
}

std::string normalize_domain(std::string_view text) {
  std::string_view s = trim(text);
  if (auto scheme = s.find("://"); scheme != std::string_view::npos) s = s.substr(scheme + 3);
  s = s.substr(0, s.find_first_of("/?#"));
  if (auto at = s.rfind('@'); at != std::string_view::npos) s = s.substr(at + 1);
  if (auto colon = s.rfind(':'); colon != std::string_view::npos) s = s.substr(0, colon);
  std::string out = ascii_lower(s);
  while (out.ends_with('.')) out.pop_back();
  if (out.starts_with("www.")) out.erase(0, 4);
  return out;
}

}  // namespace sitehunt
