#include "phishml/schema.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "phishml/error.hpp"

namespace phishml {

namespace {

struct FeatureInfo {
  const char* name;
  ValueDomain domain;
  // Alternate spellings found in circulating copies of the dataset.
  std::array<const char*, 3> aliases;
};

// URL-only rules with two outcomes keep a binary domain; every rule that
// consumes page content or third-party evidence can fall back to 0.
constexpr std::array<FeatureInfo, kFeatureCount> kFeatures{{
    {"Having_IP_Address", kBinaryDomain, {"having_IPhaving_IP_Address", nullptr, nullptr}},
    {"URL_Length", kTernaryDomain, {"URLURL_Length", nullptr, nullptr}},
    {"Shortening_Service", kBinaryDomain, {"Shortining_Service", nullptr, nullptr}},
    {"Having_At_Symbol", kBinaryDomain, {nullptr, nullptr, nullptr}},
    {"Double_Slash_Redirecting", kBinaryDomain, {nullptr, nullptr, nullptr}},
    {"Prefix_Suffix", kBinaryDomain, {nullptr, nullptr, nullptr}},
    {"Having_Sub_Domain", kTernaryDomain, {nullptr, nullptr, nullptr}},
    {"SSL_Final_State", kTernaryDomain, {"SSLfinal_State", nullptr, nullptr}},
    {"Domain_Registration_Length", kTernaryDomain, {"Domain_registeration_length", "Domain_Reg_Length", nullptr}},
    {"Favicon", kTernaryDomain, {nullptr, nullptr, nullptr}},
    {"Port", kBinaryDomain, {nullptr, nullptr, nullptr}},
    {"HTTPS_Token", kBinaryDomain, {nullptr, nullptr, nullptr}},
    {"Request_URL", kTernaryDomain, {nullptr, nullptr, nullptr}},
    {"URL_of_Anchor", kTernaryDomain, {nullptr, nullptr, nullptr}},
    {"Links_in_Tags", kTernaryDomain, {nullptr, nullptr, nullptr}},
    {"SFH", kTernaryDomain, {"Server_Form_Handler", nullptr, nullptr}},
    {"Submitting_to_Email", kTernaryDomain, {nullptr, nullptr, nullptr}},
    {"Abnormal_URL", kTernaryDomain, {nullptr, nullptr, nullptr}},
    {"Redirect", kTernaryDomain, {"Website_Redirect_Count", nullptr, nullptr}},
    {"On_Mouseover", kTernaryDomain, {"Status_Bar_Customization", nullptr, nullptr}},
    {"Right_Click", kTernaryDomain, {nullptr, nullptr, nullptr}},
    {"Pop_Up_Window", kTernaryDomain, {"popUpWidnow", nullptr, nullptr}},
    {"Iframe", kTernaryDomain, {nullptr, nullptr, nullptr}},
    {"Age_of_Domain", kTernaryDomain, {nullptr, nullptr, nullptr}},
    {"DNS_Record", kTernaryDomain, {nullptr, nullptr, nullptr}},
    {"Web_Traffic", kTernaryDomain, {nullptr, nullptr, nullptr}},
    {"Page_Rank", kTernaryDomain, {nullptr, nullptr, nullptr}},
    {"Google_Index", kTernaryDomain, {nullptr, nullptr, nullptr}},
    {"Links_Pointing_to_Page", kTernaryDomain, {nullptr, nullptr, nullptr}},
    {"Statistical_Report", kTernaryDomain, {nullptr, nullptr, nullptr}},
}};

}  // namespace

std::string normalize_header(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == ' ' || c == '_' || c == '-' || c == '\t') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

FeatureSchema::FeatureSchema(std::vector<std::string> names, std::vector<ValueDomain> domains)
    : names_(std::move(names)), domains_(std::move(domains)) {
  if (names_.size() != domains_.size()) throw SpecError("schema: names and domains differ in length");
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw SpecError("schema: empty feature name");
    if (!seen.insert(normalize_header(n)).second) throw SpecError("schema: duplicate feature name '" + n + "'");
  }
  for (const auto& d : domains_)
    if (d.empty()) throw SpecError("schema: empty value domain");
}

const FeatureSchema& FeatureSchema::canonical() {
  static const FeatureSchema schema = [] {
    std::vector<std::string> names;
    std::vector<ValueDomain> domains;
    for (const auto& f : kFeatures) {
      names.emplace_back(f.name);
      domains.push_back(f.domain);
    }
    return FeatureSchema(std::move(names), std::move(domains));
  }();
  return schema;
}

std::optional<int> FeatureSchema::find(std::string_view header) const {
  const std::string key = normalize_header(header);
  for (int i = 0; i < size(); ++i)
    if (normalize_header(names_[static_cast<std::size_t>(i)]) == key) return i;
  // Aliases only apply to the canonical layout.
  if (size() == kFeatureCount && *this == canonical()) {
    for (int i = 0; i < kFeatureCount; ++i)
      for (const char* alias : kFeatures[static_cast<std::size_t>(i)].aliases)
        if (alias != nullptr && normalize_header(alias) == key) return i;
  }
  return std::nullopt;
}

}  // namespace phishml
