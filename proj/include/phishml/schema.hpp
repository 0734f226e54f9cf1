#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace phishml {

inline constexpr int kFeatureCount = 30;

/// -1 = phishing-indicating, 0 = suspicious, +1 = legitimate-indicating.
using Ternary = std::int8_t;

/// Class label: -1 phishing, +1 legitimate.
enum class Label : std::int8_t { Phishing = -1, Legitimate = 1 };

inline constexpr int to_int(Label l) noexcept { return static_cast<int>(l); }
inline constexpr Label label_from_score(double score) noexcept {
  // Exact zero (vote tie, zero margin, p = 0.5) resolves to legitimate.
  return score >= 0.0 ? Label::Legitimate : Label::Phishing;
}

/// One encoded website observation.
using FeatureVector = Eigen::Matrix<Ternary, kFeatureCount, 1>;

/// Bitmask over {-1, 0, +1}.
struct ValueDomain {
  bool minus_one = true;
  bool zero = true;
  bool plus_one = true;

  bool contains(int v) const noexcept {
    return (v == -1 && minus_one) || (v == 0 && zero) || (v == 1 && plus_one);
  }
  bool empty() const noexcept { return !minus_one && !zero && !plus_one; }
  friend bool operator==(const ValueDomain&, const ValueDomain&) = default;
};

inline constexpr ValueDomain kBinaryDomain{true, false, true};
inline constexpr ValueDomain kTernaryDomain{true, true, true};

/// Feature index in canonical order. The numbering follows the order the
/// features are documented in (and stored in the public dataset).
enum class Feature : int {
  HavingIpAddress = 0,
  UrlLength,
  ShorteningService,
  HavingAtSymbol,
  DoubleSlashRedirecting,
  PrefixSuffix,
  HavingSubDomain,
  SslFinalState,
  DomainRegistrationLength,
  Favicon,
  Port,
  HttpsToken,
  RequestUrl,
  UrlOfAnchor,
  LinksInTags,
  Sfh,
  SubmittingToEmail,
  AbnormalUrl,
  Redirect,
  OnMouseover,
  RightClick,
  PopUpWindow,
  Iframe,
  AgeOfDomain,
  DnsRecord,
  WebTraffic,
  PageRank,
  GoogleIndex,
  LinksPointingToPage,
  StatisticalReport,
};

inline constexpr int index_of(Feature f) noexcept { return static_cast<int>(f); }

/// Ordered feature names plus per-feature value domains.
class FeatureSchema {
 public:
  FeatureSchema(std::vector<std::string> names, std::vector<ValueDomain> domains);

  /// The 30-feature schema of the public phishing-websites dataset.
  static const FeatureSchema& canonical();

  int size() const noexcept { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(int i) const { return names_.at(static_cast<std::size_t>(i)); }
  const ValueDomain& domain(int i) const { return domains_.at(static_cast<std::size_t>(i)); }

  /// Index of the column whose normalized name matches `header`, if any.
  std::optional<int> find(std::string_view header) const;

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<ValueDomain> domains_;
};

inline constexpr std::string_view kLabelColumn = "Result";

/// Lowercase and drop spaces, underscores and hyphens; used to match CSV
/// headers whose spelling varies between dataset copies.
std::string normalize_header(std::string_view s);

}  // namespace phishml
