#include "phishml/url.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <vector>

#include "phishml/error.hpp"

namespace phishml {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

// Second-level labels under country-code TLDs that act as public suffixes.
// A deliberately small table; hosts not covered fall back to a one-label
// suffix.
constexpr std::array<std::string_view, 14> kSecondLevel{"co", "com", "net", "org", "ac", "gov", "edu",
                                                        "or", "ne",  "go",  "gob", "nic", "ltd", "plc"};

bool is_hex_or_decimal_number(std::string_view s) {
  if (s.empty()) return false;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X'))
    return std::all_of(s.begin() + 2, s.end(), [](unsigned char c) { return std::isxdigit(c); });
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

std::string UrlParts::normalized_host() const { return lower(host); }

std::string UrlParts::reassemble() const {
  std::string out;
  if (has_scheme) out += scheme + "://";
  if (has_userinfo) out += userinfo + "@";
  out += host;
  if (has_port) out += ":" + port_text;
  out += path;
  if (has_query) out += "?" + query;
  if (has_fragment) out += "#" + fragment;
  return out;
}

std::string_view UrlParts::after_scheme() const {
  std::string_view r(raw);
  return has_scheme ? r.substr(scheme.size() + 3) : r;
}

UrlParts parse_url(std::string_view s) {
  if (s.empty()) throw DataError("parse_url: empty URL");
  UrlParts u;
  u.raw = std::string(s);

  std::string_view rest = s;
  if (const auto sep = rest.find("://"); sep != std::string_view::npos) {
    u.has_scheme = true;
    u.scheme = std::string(rest.substr(0, sep));
    rest.remove_prefix(sep + 3);
  }

  const auto authority_end = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, authority_end);
  rest = authority_end == std::string_view::npos ? std::string_view{} : rest.substr(authority_end);

  if (const auto at = authority.rfind('@'); at != std::string_view::npos) {
    u.has_userinfo = true;
    u.userinfo = std::string(authority.substr(0, at));
    authority.remove_prefix(at + 1);
  }

  // Port: last ':' outside an IPv6 literal.
  std::size_t colon = std::string_view::npos;
  if (!authority.empty() && authority.front() == '[') {
    const auto close = authority.find(']');
    if (close != std::string_view::npos && close + 1 < authority.size() && authority[close + 1] == ':')
      colon = close + 1;
  } else {
    colon = authority.rfind(':');
  }
  if (colon != std::string_view::npos) {
    u.has_port = true;
    u.port_text = std::string(authority.substr(colon + 1));
    authority = authority.substr(0, colon);
    if (!u.port_text.empty()) {
      int p = 0;
      const auto* b = u.port_text.data();
      const auto* e = b + u.port_text.size();
      const auto [ptr, ec] = std::from_chars(b, e, p);
      if (ec != std::errc{} || ptr != e || p < 0 || p > 65535)
        throw DataError("parse_url: invalid port '" + u.port_text + "' in " + u.raw);
      u.port = p;
    }
  }
  u.host = std::string(authority);
  if (u.host.empty()) throw DataError("parse_url: no host in '" + u.raw + "'");
  if (std::any_of(u.host.begin(), u.host.end(), [](unsigned char c) { return std::isspace(c) || c < 0x20; }))
    throw DataError("parse_url: invalid character in host of '" + u.raw + "'");

  if (const auto hash = rest.find('#'); hash != std::string_view::npos) {
    u.has_fragment = true;
    u.fragment = std::string(rest.substr(hash + 1));
    rest = rest.substr(0, hash);
  }
  if (const auto q = rest.find('?'); q != std::string_view::npos) {
    u.has_query = true;
    u.query = std::string(rest.substr(q + 1));
    rest = rest.substr(0, q);
  }
  u.path = std::string(rest);
  return u;
}

bool is_ip_host(std::string_view host) {
  if (host.empty()) return false;
  if (host.front() == '[') return host.back() == ']';
  if (std::count(host.begin(), host.end(), ':') >= 2) return true;  // bare IPv6
  std::size_t parts = 0;
  std::size_t start = 0;
  while (true) {
    const auto dot = host.find('.', start);
    const auto part = host.substr(start, dot == std::string_view::npos ? host.npos : dot - start);
    if (!is_hex_or_decimal_number(part)) return false;
    ++parts;
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  // A single all-digit label is an integer-encoded address (http://3627734435/).
  return parts == 4 || parts == 1;
}

namespace {

std::vector<std::string> labels_of(std::string_view host) {
  std::vector<std::string> labels;
  std::size_t start = 0;
  while (true) {
    const auto dot = host.find('.', start);
    labels.emplace_back(host.substr(start, dot == std::string_view::npos ? host.npos : dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return labels;
}

}  // namespace

int public_suffix_labels(std::string_view host) {
  const auto labels = labels_of(lower(host));
  if (labels.size() < 2) return 0;
  const auto& tld = labels[labels.size() - 1];
  const auto& second = labels[labels.size() - 2];
  if (tld.size() == 2 && labels.size() >= 3 &&
      std::find(kSecondLevel.begin(), kSecondLevel.end(), second) != kSecondLevel.end())
    return 2;
  return 1;
}

std::string registered_domain(std::string_view host) {
  const std::string h = lower(host);
  if (is_ip_host(h)) return h;
  const auto labels = labels_of(h);
  const auto keep = static_cast<std::size_t>(public_suffix_labels(h)) + 1;
  if (labels.size() <= keep) return h;
  std::string out;
  for (std::size_t i = labels.size() - keep; i < labels.size(); ++i) {
    if (!out.empty()) out += '.';
    out += labels[i];
  }
  return out;
}

}  // namespace phishml
