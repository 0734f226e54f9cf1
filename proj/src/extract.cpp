#include "phishml/extract.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "phishml/error.hpp"

namespace phishml {

namespace {

using nlohmann::json;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string strip_spaces(std::string_view s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

Ternary ratio_rule(double ratio, const RatioThresholds& t) {
  if (ratio < t.legit_below) return 1;
  if (ratio > t.phishing_above) return -1;
  return 0;
}

Ternary flag(bool phishing) { return phishing ? Ternary{-1} : Ternary{1}; }

// ---------------------------------------------------------------------------
// Minimal HTML tag scanner: tag names and attributes only, no tree.

struct Tag {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attrs;

  std::optional<std::string_view> attr(std::string_view key) const {
    for (const auto& [k, v] : attrs)
      if (k == key) return v;
    return std::nullopt;
  }
};

std::vector<Tag> scan_tags(std::string_view html) {
  std::vector<Tag> tags;
  std::size_t i = 0;
  const std::size_t n = html.size();
  auto skip_space = [&] {
    while (i < n && std::isspace(static_cast<unsigned char>(html[i]))) ++i;
  };
  while (i < n) {
    const auto lt = html.find('<', i);
    if (lt == std::string_view::npos) break;
    i = lt + 1;
    if (html.substr(lt, 4) == "<!--") {
      const auto end = html.find("-->", lt + 4);
      i = end == std::string_view::npos ? n : end + 3;
      continue;
    }
    if (i < n && (html[i] == '/' || html[i] == '!' || html[i] == '?')) continue;
    Tag tag;
    while (i < n && (std::isalnum(static_cast<unsigned char>(html[i])) || html[i] == '-')) tag.name.push_back(html[i++]);
    if (tag.name.empty()) continue;
    tag.name = lower(tag.name);
    while (i < n && html[i] != '>') {
      skip_space();
      if (i < n && html[i] == '/') {
        ++i;
        continue;
      }
      std::string key;
      while (i < n && !std::isspace(static_cast<unsigned char>(html[i])) && html[i] != '=' && html[i] != '>' &&
             html[i] != '/')
        key.push_back(html[i++]);
      skip_space();
      std::string value;
      if (i < n && html[i] == '=') {
        ++i;
        skip_space();
        if (i < n && (html[i] == '"' || html[i] == '\'')) {
          const char q = html[i++];
          const auto close = html.find(q, i);
          const auto stop = close == std::string_view::npos ? n : close;
          value = std::string(html.substr(i, stop - i));
          i = stop == n ? n : stop + 1;
        } else {
          while (i < n && !std::isspace(static_cast<unsigned char>(html[i])) && html[i] != '>')
            value.push_back(html[i++]);
        }
      }
      if (!key.empty()) tag.attrs.emplace_back(lower(key), std::move(value));
      else if (i < n && html[i] != '>')
        ++i;
    }
    const bool raw_text = tag.name == "script" || tag.name == "style";
    const std::string closing = "</" + tag.name;
    tags.push_back(std::move(tag));
    if (raw_text) {
      // Markup inside script/style bodies is text, not tags.
      const std::string rest = lower(html.substr(i));
      const auto end = rest.find(closing);
      i = end == std::string::npos ? n : i + end;
    }
  }
  return tags;
}

/// Host of an absolute or protocol-relative link; nullopt for relative ones.
std::optional<std::string> link_host(std::string_view link) {
  const auto s = std::string(link.substr(std::min(link.find_first_not_of(" \t\r\n"), link.size())));
  std::string_view v(s);
  if (v.starts_with("//")) {
    v.remove_prefix(2);
  } else if (const auto sep = v.find("://"); sep != std::string_view::npos && sep < 12 &&
                                               v.substr(0, sep).find_first_of("/?#") == std::string_view::npos) {
    v.remove_prefix(sep + 3);
  } else {
    return std::nullopt;
  }
  auto end = v.find_first_of("/?#");
  auto authority = v.substr(0, end);
  if (const auto at = authority.rfind('@'); at != std::string_view::npos) authority.remove_prefix(at + 1);
  if (const auto colon = authority.rfind(':'); colon != std::string_view::npos && authority.front() != '[')
    authority = authority.substr(0, colon);
  if (authority.empty()) return std::nullopt;
  return lower(authority);
}

struct LinkCounter {
  std::string page_domain;
  std::size_t total = 0;
  std::size_t flagged = 0;

  bool is_external(std::string_view link) const {
    const auto host = link_host(link);
    return host && registered_domain(*host) != page_domain;
  }
  void add(std::string_view link) {
    ++total;
    if (is_external(link)) ++flagged;
  }
  double ratio() const { return total == 0 ? 0.0 : static_cast<double>(flagged) / static_cast<double>(total); }
};

bool unsafe_anchor(std::string_view href) {
  const std::string h = lower(strip_spaces(href));
  return h.empty() || h.starts_with('#') || h.starts_with("javascript:") || h.starts_with("about:blank");
}

// ---------------------------------------------------------------------------
// JSON helpers with key validation.

template <typename T>
void read_field(const json& obj, const char* key, std::optional<T>& out) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (v.is_null()) return;
  out = v.get<T>();
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!obj.is_object()) throw SpecError(where + ": expected a JSON object");
  for (const auto& [key, _] : obj.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw SpecError(where + ": unknown key '" + key + "'");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// First field of a CSV line, honoring double quotes.
std::string first_csv_field(std::string_view line) {
  std::string out;
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  if (i < line.size() && line[i] == '"') {
    ++i;
    while (i < line.size()) {
      if (line[i] == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          out.push_back('"');
          i += 2;
          continue;
        }
        break;
      }
      out.push_back(line[i++]);
    }
    return out;
  }
  const auto comma = line.find(',', i);
  out = std::string(line.substr(i, comma == std::string_view::npos ? line.npos : comma - i));
  while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

void ExternalEvidence::validate() const {
  if (page_rank && !(*page_rank >= 0.0 && *page_rank <= 1.0)) throw DataError("evidence: page_rank outside [0, 1]");
  if (traffic_rank && *traffic_rank < 1) throw DataError("evidence: traffic_rank must be positive");
  if (links_pointing && *links_pointing < 0) throw DataError("evidence: links_pointing must be non-negative");
  if (domain_registration_length_days && *domain_registration_length_days < 0)
    throw DataError("evidence: domain_registration_length_days must be non-negative");
}

EvidenceTable::EvidenceTable(std::map<std::string, ExternalEvidence> entries) {
  for (auto& [k, v] : entries) {
    v.validate();
    entries_.emplace(lower(k), v);
  }
}

EvidenceTable EvidenceTable::from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("evidence file: ") + e.what());
  }
  if (!root.is_object()) throw DataError("evidence file: top level must be an object");
  std::map<std::string, ExternalEvidence> entries;
  for (const auto& [domain, obj] : root.items()) {
    reject_unknown(obj,
                   {"domain_age_days", "domain_registration_length_days", "has_dns_record", "traffic_rank",
                    "page_rank", "google_indexed", "links_pointing", "on_phishing_ip_list", "whois_identity_in_url",
                    "certificate_valid"},
                   "evidence '" + domain + "'");
    ExternalEvidence ev;
    try {
      read_field(obj, "domain_age_days", ev.domain_age_days);
      read_field(obj, "domain_registration_length_days", ev.domain_registration_length_days);
      read_field(obj, "has_dns_record", ev.has_dns_record);
      read_field(obj, "traffic_rank", ev.traffic_rank);
      read_field(obj, "page_rank", ev.page_rank);
      read_field(obj, "google_indexed", ev.google_indexed);
      read_field(obj, "links_pointing", ev.links_pointing);
      read_field(obj, "on_phishing_ip_list", ev.on_phishing_ip_list);
      read_field(obj, "whois_identity_in_url", ev.whois_identity_in_url);
      read_field(obj, "certificate_valid", ev.certificate_valid);
    } catch (const json::exception& e) {
      throw DataError("evidence '" + domain + "': " + e.what());
    }
    entries.emplace(domain, ev);
  }
  return EvidenceTable(std::move(entries));
}

EvidenceTable EvidenceTable::load(const std::filesystem::path& path) { return from_json(read_file(path)); }

ExternalEvidence EvidenceTable::lookup(std::string_view host) const {
  const std::string h = lower(host);
  if (auto it = entries_.find(h); it != entries_.end()) return it->second;
  if (auto it = entries_.find(registered_domain(h)); it != entries_.end()) return it->second;
  return {};
}

std::vector<std::string> ExtractorConfig::default_shorteners() {
  return {"bit.ly",  "goo.gl",   "tinyurl.com", "ow.ly",    "t.co",    "is.gd",  "buff.ly",
          "adf.ly",  "bit.do",   "cutt.ly",     "shorte.st", "tiny.cc", "lnkd.in", "db.tt",
          "qr.net",  "rebrand.ly", "rb.gy",     "t.ly",     "v.gd",    "x.co",   "tr.im",
          "cli.gs",  "po.st",    "bc.vc",       "soo.gd",   "s.id"};
}

ExtractorConfig ExtractorConfig::from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("threshold config: ") + e.what());
  }
  if (!root.is_object()) throw SpecError("threshold config: top level must be an object");
  ExtractorConfig c;
  const auto& schema = FeatureSchema::canonical();
  auto ratio = [](const json& o, RatioThresholds& t, const std::string& where) {
    reject_unknown(o, {"legit_below", "phishing_above"}, where);
    t.legit_below = o.value("legit_below", t.legit_below);
    t.phishing_above = o.value("phishing_above", t.phishing_above);
    if (!(0.0 <= t.legit_below && t.legit_below <= t.phishing_above && t.phishing_above <= 1.0))
      throw SpecError(where + ": thresholds must satisfy 0 <= legit_below <= phishing_above <= 1");
  };
  for (const auto& [key, o] : root.items()) {
    const auto idx = schema.find(key);
    if (!idx) throw SpecError("threshold config: unknown feature '" + key + "'");
    const std::string where = "threshold config '" + key + "'";
    try {
      switch (static_cast<Feature>(*idx)) {
        case Feature::UrlLength:
          reject_unknown(o, {"legit_below", "phishing_above"}, where);
          c.url_length_legit_below = o.value("legit_below", c.url_length_legit_below);
          c.url_length_phishing_above = o.value("phishing_above", c.url_length_phishing_above);
          break;
        case Feature::HavingSubDomain:
          reject_unknown(o, {"legit_max_dots", "suspicious_dots"}, where);
          c.subdomain_legit_max_dots = o.value("legit_max_dots", c.subdomain_legit_max_dots);
          c.subdomain_suspicious_dots = o.value("suspicious_dots", c.subdomain_suspicious_dots);
          break;
        case Feature::RequestUrl: ratio(o, c.request_url, where); break;
        case Feature::UrlOfAnchor: ratio(o, c.url_of_anchor, where); break;
        case Feature::LinksInTags: ratio(o, c.links_in_tags, where); break;
        case Feature::Redirect:
          reject_unknown(o, {"legit_max", "phishing_above"}, where);
          c.redirect_legit_max = o.value("legit_max", c.redirect_legit_max);
          c.redirect_phishing_above = o.value("phishing_above", c.redirect_phishing_above);
          break;
        case Feature::AgeOfDomain:
          reject_unknown(o, {"phishing_below_days"}, where);
          c.age_phishing_below_days = o.value("phishing_below_days", c.age_phishing_below_days);
          break;
        case Feature::DomainRegistrationLength:
          reject_unknown(o, {"phishing_at_most_days"}, where);
          c.registration_phishing_at_most_days = o.value("phishing_at_most_days", c.registration_phishing_at_most_days);
          break;
        case Feature::WebTraffic:
          reject_unknown(o, {"legit_rank_at_most", "suspicious_rank_at_most"}, where);
          c.traffic_legit_rank_at_most = o.value("legit_rank_at_most", c.traffic_legit_rank_at_most);
          c.traffic_suspicious_rank_at_most = o.value("suspicious_rank_at_most", c.traffic_suspicious_rank_at_most);
          break;
        case Feature::PageRank:
          reject_unknown(o, {"phishing_below"}, where);
          c.page_rank_phishing_below = o.value("phishing_below", c.page_rank_phishing_below);
          break;
        case Feature::LinksPointingToPage:
          reject_unknown(o, {"phishing_at_most", "suspicious_at_most"}, where);
          c.links_pointing_phishing_at_most = o.value("phishing_at_most", c.links_pointing_phishing_at_most);
          c.links_pointing_suspicious_at_most = o.value("suspicious_at_most", c.links_pointing_suspicious_at_most);
          break;
        case Feature::ShorteningService:
          reject_unknown(o, {"hosts"}, where);
          if (o.contains("hosts")) {
            c.shortener_hosts.clear();
            for (const auto& h : o.at("hosts")) c.shortener_hosts.push_back(lower(h.get<std::string>()));
          }
          break;
        default:
          throw SpecError(where + ": feature has no tunable parameters");
      }
    } catch (const json::exception& e) {
      throw SpecError(where + ": " + e.what());
    }
  }
  return c;
}

ExtractorConfig ExtractorConfig::load(const std::filesystem::path& path) { return from_json(read_file(path)); }

// ---------------------------------------------------------------------------

std::array<Ternary, 9> extract_lexical(const UrlParts& url, const ExtractorConfig& cfg) {
  const std::string host = url.normalized_host();
  const std::string_view tail = url.after_scheme();
  const auto length = static_cast<int>(url.raw.size());

  Ternary url_length = 0;
  if (length < cfg.url_length_legit_below) url_length = 1;
  else if (length > cfg.url_length_phishing_above) url_length = -1;

  const std::string bare = host.starts_with("www.") ? host.substr(4) : host;
  const auto bare_labels = static_cast<int>(std::count(bare.begin(), bare.end(), '.')) + 1;
  const int dots = std::max(0, bare_labels - public_suffix_labels(bare) - 1);
  Ternary subdomain = 0;
  if (dots <= cfg.subdomain_legit_max_dots) subdomain = 1;
  else if (dots > cfg.subdomain_suspicious_dots) subdomain = -1;

  const std::string shortener_key = host.starts_with("www.") ? host.substr(4) : host;
  const bool shortened =
      std::find(cfg.shortener_hosts.begin(), cfg.shortener_hosts.end(), shortener_key) != cfg.shortener_hosts.end();

  const std::string scheme = lower(url.scheme);
  bool odd_port = false;
  if (url.port) {
    const int expected = scheme == "https" ? 443 : scheme == "http" || scheme.empty() ? 80 : -1;
    odd_port = *url.port != expected;
  }

  return {
      flag(is_ip_host(host)),
      url_length,
      flag(shortened),
      flag(tail.find('@') != std::string_view::npos),
      flag(tail.find("//") != std::string_view::npos),
      flag(host.find('-') != std::string::npos),
      subdomain,
      flag(odd_port),
      flag(host.find("https") != std::string::npos),
  };
}

std::array<Ternary, 11> extract_content(const RawWebsiteObservation& obs, const ExtractorConfig& cfg) {
  Ternary redirect = 0;
  if (obs.redirect_count) {
    if (*obs.redirect_count <= cfg.redirect_legit_max) redirect = 1;
    else if (*obs.redirect_count > cfg.redirect_phishing_above) redirect = -1;
  }
  if (!obs.html) return {0, 0, 0, 0, 0, 0, redirect, 0, 0, 0, 0};

  const auto page = parse_url(obs.final_url_after_redirects.value_or(obs.url));
  const std::string page_domain = registered_domain(page.normalized_host());
  const auto tags = scan_tags(*obs.html);
  const std::string text = lower(strip_spaces(*obs.html));

  bool external_favicon = false;
  LinkCounter requests{page_domain}, links{page_domain};
  std::size_t anchors = 0, unsafe_anchors = 0;
  bool bad_form = false, mail_form = false;
  bool status_bar = false, right_click = false, iframe = false;

  for (const auto& tag : tags) {
    const auto& name = tag.name;
    if (name == "img" || name == "video" || name == "audio" || name == "source" || name == "embed" ||
        name == "track") {
      if (auto src = tag.attr("src")) requests.add(*src);
    } else if (name == "a") {
      if (auto href = tag.attr("href")) {
        ++anchors;
        if (unsafe_anchor(*href) || requests.is_external(*href)) ++unsafe_anchors;
      }
    } else if (name == "script") {
      if (auto src = tag.attr("src")) links.add(*src);
    } else if (name == "link") {
      if (auto href = tag.attr("href")) {
        links.add(*href);
        const std::string rel = lower(tag.attr("rel").value_or(""));
        if (rel.find("icon") != std::string::npos && links.is_external(*href)) external_favicon = true;
      }
    } else if (name == "meta") {
      if (auto content = tag.attr("content"); content && link_host(*content)) links.add(*content);
    } else if (name == "form") {
      const std::string action = lower(strip_spaces(tag.attr("action").value_or("")));
      if (action.starts_with("mailto:")) mail_form = true;
      else if (action.empty() || action == "about:blank" || requests.is_external(action))
        bad_form = true;
    } else if (name == "iframe" || name == "frame") {
      iframe = true;
    }
    for (const auto& [key, value] : tag.attrs) {
      const std::string v = lower(strip_spaces(value));
      if (key == "onmouseover" && (v.find("window.status") != std::string::npos || v.find("status=") == 0))
        status_bar = true;
      if (key == "oncontextmenu" && v.find("returnfalse") != std::string::npos) right_click = true;
    }
  }
  if (text.find("event.button==2") != std::string::npos) right_click = true;
  if (text.find("mail(") != std::string::npos) mail_form = true;
  const bool popup = text.find("window.open(") != std::string::npos;

  const double anchor_ratio = anchors == 0 ? 0.0 : static_cast<double>(unsafe_anchors) / static_cast<double>(anchors);
  return {
      flag(external_favicon),
      ratio_rule(requests.ratio(), cfg.request_url),
      ratio_rule(anchor_ratio, cfg.url_of_anchor),
      ratio_rule(links.ratio(), cfg.links_in_tags),
      flag(bad_form),
      flag(mail_form),
      redirect,
      flag(status_bar),
      flag(right_click),
      flag(popup),
      flag(iframe),
  };
}

std::array<Ternary, 10> extract_reputation(const UrlParts& url, const ExternalEvidence& ev,
                                           const ExtractorConfig& cfg) {
  auto known = [](const auto& opt, auto&& rule) -> Ternary { return opt ? rule(*opt) : Ternary{0}; };

  Ternary ssl = -1;
  if (lower(url.scheme) == "https") ssl = ev.certificate_valid ? flag(!*ev.certificate_valid) : Ternary{0};

  return {
      ssl,
      known(ev.domain_registration_length_days,
            [&](int d) { return flag(d <= cfg.registration_phishing_at_most_days); }),
      known(ev.whois_identity_in_url, [](bool in_url) { return flag(!in_url); }),
      known(ev.domain_age_days, [&](int d) { return flag(d < cfg.age_phishing_below_days); }),
      known(ev.has_dns_record, [](bool has) { return flag(!has); }),
      known(ev.traffic_rank,
            [&](long long r) -> Ternary {
              if (r <= cfg.traffic_legit_rank_at_most) return 1;
              if (r <= cfg.traffic_suspicious_rank_at_most) return 0;
              return -1;
            }),
      known(ev.page_rank, [&](double p) { return flag(p < cfg.page_rank_phishing_below); }),
      known(ev.google_indexed, [](bool indexed) { return flag(!indexed); }),
      known(ev.links_pointing,
            [&](int n) -> Ternary {
              if (n <= cfg.links_pointing_phishing_at_most) return -1;
              if (n <= cfg.links_pointing_suspicious_at_most) return 0;
              return 1;
            }),
      known(ev.on_phishing_ip_list, [](bool listed) { return flag(listed); }),
  };
}

FeatureVector extract_all(const RawWebsiteObservation& obs, const ExternalEvidence& ev, const FeatureSchema& schema,
                          const ExtractorConfig& cfg) {
  if (!(schema == FeatureSchema::canonical())) throw SpecError("extract_all: requires the canonical feature schema");
  if (obs.url.empty()) throw DataError("extract_all: observation URL is empty");
  const UrlParts url = parse_url(obs.url);
  FeatureVector out;
  const auto lexical = extract_lexical(url, cfg);
  const auto content = extract_content(obs, cfg);
  const auto reputation = extract_reputation(url, ev, cfg);
  for (std::size_t i = 0; i < lexical.size(); ++i) out(index_of(kLexicalFeatures[i])) = lexical[i];
  for (std::size_t i = 0; i < content.size(); ++i) out(index_of(kContentFeatures[i])) = content[i];
  for (std::size_t i = 0; i < reputation.size(); ++i) out(index_of(kReputationFeatures[i])) = reputation[i];
  return out;
}

IngestResult ingest_phishtank_dump(const std::filesystem::path& path, const EvidenceTable& evidence,
                                   const ExtractorConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open PhishTank dump " + path.string());
  IngestResult result;
  std::vector<LabeledSample> samples;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string cell = first_csv_field(line);
    // A first row without any URL-ish character is a header.
    if (row == 1 && cell.find_first_of("./") == std::string::npos) continue;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      const UrlParts url = parse_url(cell);
      RawWebsiteObservation obs{cell, std::nullopt, std::nullopt, std::nullopt};
      samples.push_back({extract_all(obs, evidence.lookup(url.host), FeatureSchema::canonical(), cfg),
                         Label::Phishing});
    } catch (const DataError& e) {
      ++result.skipped;
      result.errors.push_back("row " + std::to_string(row) + ": " + e.what());
    }
  }
  if (samples.empty() && result.skipped == 0) throw DataError("PhishTank dump " + path.string() + ": no URLs");
  result.dataset = Dataset::from_samples(samples, "phishtank:" + path.string());
  return result;
}

}  // namespace phishml
