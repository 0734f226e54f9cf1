#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phishml/dataset.hpp"
#include "phishml/schema.hpp"
#include "phishml/url.hpp"

namespace phishml {

/// Unprocessed page observation. Only `url` is mandatory.
struct RawWebsiteObservation {
  std::string url;
  std::optional<std::string> html;
  std::optional<std::string> final_url_after_redirects;
  std::optional<int> redirect_count;
};

/// Third-party facts about a domain. Every field may be unknown.
struct ExternalEvidence {
  std::optional<int> domain_age_days;
  std::optional<int> domain_registration_length_days;
  std::optional<bool> has_dns_record;
  std::optional<long long> traffic_rank;
  std::optional<double> page_rank;  // [0, 1]
  std::optional<bool> google_indexed;
  std::optional<int> links_pointing;
  std::optional<bool> on_phishing_ip_list;
  std::optional<bool> whois_identity_in_url;
  std::optional<bool> certificate_valid;

  /// Throws DataError when a present field is out of range.
  void validate() const;
};

/// Offline evidence store keyed by host or registered domain.
class EvidenceTable {
 public:
  EvidenceTable() = default;
  explicit EvidenceTable(std::map<std::string, ExternalEvidence> entries);

  static EvidenceTable from_json(const std::string& text);
  static EvidenceTable load(const std::filesystem::path& path);

  /// Exact host match first, then registered domain; all-absent otherwise.
  ExternalEvidence lookup(std::string_view host) const;
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::map<std::string, ExternalEvidence> entries_;
};

struct RatioThresholds {
  double legit_below;     // ratio < legit_below -> +1
  double phishing_above;  // ratio > phishing_above -> -1, otherwise 0
};

/// Every tunable cutoff of the rule set. Defaults follow the published
/// documentation of the public phishing-websites dataset.
struct ExtractorConfig {
  int url_length_legit_below = 54;
  int url_length_phishing_above = 75;
  int subdomain_legit_max_dots = 1;
  int subdomain_suspicious_dots = 2;
  RatioThresholds request_url{0.22, 0.61};
  RatioThresholds url_of_anchor{0.31, 0.67};
  RatioThresholds links_in_tags{0.22, 0.61};
  int redirect_legit_max = 1;
  int redirect_phishing_above = 4;
  int age_phishing_below_days = 30;
  int registration_phishing_at_most_days = 365;
  long long traffic_legit_rank_at_most = 100000;
  long long traffic_suspicious_rank_at_most = 1000000;
  double page_rank_phishing_below = 0.2;
  int links_pointing_phishing_at_most = 0;
  int links_pointing_suspicious_at_most = 2;
  std::vector<std::string> shortener_hosts = default_shorteners();

  static std::vector<std::string> default_shorteners();

  /// JSON object keyed by feature name; unknown keys are rejected.
  static ExtractorConfig from_json(const std::string& text);
  static ExtractorConfig load(const std::filesystem::path& path);
};

inline constexpr std::array<Feature, 9> kLexicalFeatures{
    Feature::HavingIpAddress,        Feature::UrlLength,    Feature::ShorteningService,
    Feature::HavingAtSymbol,         Feature::DoubleSlashRedirecting, Feature::PrefixSuffix,
    Feature::HavingSubDomain,        Feature::Port,         Feature::HttpsToken};

inline constexpr std::array<Feature, 11> kContentFeatures{
    Feature::Favicon,    Feature::RequestUrl,  Feature::UrlOfAnchor, Feature::LinksInTags,
    Feature::Sfh,        Feature::SubmittingToEmail, Feature::Redirect, Feature::OnMouseover,
    Feature::RightClick, Feature::PopUpWindow, Feature::Iframe};

inline constexpr std::array<Feature, 10> kReputationFeatures{
    Feature::SslFinalState, Feature::DomainRegistrationLength, Feature::AbnormalUrl,
    Feature::AgeOfDomain,   Feature::DnsRecord,  Feature::WebTraffic,
    Feature::PageRank,      Feature::GoogleIndex, Feature::LinksPointingToPage,
    Feature::StatisticalReport};

/// URL-string rules, in kLexicalFeatures order.
std::array<Ternary, 9> extract_lexical(const UrlParts& url, const ExtractorConfig& cfg = {});

/// Page-content rules (plus redirect count), in kContentFeatures order.
/// Without HTML every HTML rule yields 0.
std::array<Ternary, 11> extract_content(const RawWebsiteObservation& obs, const ExtractorConfig& cfg = {});

/// Evidence-backed rules, in kReputationFeatures order.
std::array<Ternary, 10> extract_reputation(const UrlParts& url, const ExternalEvidence& ev,
                                           const ExtractorConfig& cfg = {});

/// All thirty values in schema order.
FeatureVector extract_all(const RawWebsiteObservation& obs, const ExternalEvidence& ev,
                          const FeatureSchema& schema = FeatureSchema::canonical(), const ExtractorConfig& cfg = {});

struct IngestResult {
  Dataset dataset;
  std::size_t skipped = 0;
  std::vector<std::string> errors;  // one message per skipped row
};

/// Extract every URL in the first CSV column, labeling all rows phishing.
/// Rows that fail are counted in `skipped`; the dataset is empty when all do.
/// Throws DataError when the file cannot be read or holds no URLs.
IngestResult ingest_phishtank_dump(const std::filesystem::path& path, const EvidenceTable& evidence,
                                   const ExtractorConfig& cfg = {});

}  // namespace phishml
