#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace phishml {

/// A URL split into components without decoding. The delimiters are kept
/// implicitly: `reassemble()` reproduces `raw` byte for byte.
struct UrlParts {
  std::string raw;
  std::string scheme;    // empty when the URL has no "://"
  std::string userinfo;  // text before the last '@' of the authority
  std::string host;      // as written
  std::optional<int> port;
  std::string port_text;  // digits exactly as written
  std::string path;
  std::string query;
  std::string fragment;
  bool has_scheme = false;
  bool has_userinfo = false;
  bool has_port = false;
  bool has_query = false;
  bool has_fragment = false;

  /// Lowercased host.
  std::string normalized_host() const;
  std::string reassemble() const;
  /// Everything after the "://" delimiter (or the whole string).
  std::string_view after_scheme() const;
};

/// Split at the first "://", then the first '/', '?' or '#' after the host.
/// Throws DataError on an empty string or when no host can be found.
UrlParts parse_url(std::string_view s);

/// True for dotted-quad IPv4 (decimal or 0x-hex octets), a single
/// integer/hex host, or a bracketed IPv6 literal.
bool is_ip_host(std::string_view host);

/// Registered domain (label before the public suffix plus the suffix),
/// lowercased. Returns the host itself for IPs and single-label hosts.
std::string registered_domain(std::string_view host);

/// Number of labels in the host's public suffix ("com" -> 1, "co.uk" -> 2).
int public_suffix_labels(std::string_view host);

}  // namespace phishml
