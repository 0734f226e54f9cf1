#include <doctest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "phishml/error.hpp"
#include "phishml/extract.hpp"
#include "phishml/url.hpp"
#include "support.hpp"

using namespace phishml;
using nlohmann::json;

namespace {

json read_json(const std::string& rel) {
  std::ifstream in(test::fixture(rel));
  REQUIRE(in);
  return json::parse(in);
}

int value_of(const FeatureVector& v, Feature f) { return v(index_of(f)); }

FeatureVector extract_url(const std::string& url, const ExternalEvidence& ev = {}) {
  return extract_all(RawWebsiteObservation{url, std::nullopt, std::nullopt, std::nullopt}, ev);
}

}  // namespace

TEST_CASE("golden observations match cell by cell") {
  const json cases = read_json("extract/observations.json");
  REQUIRE(cases.size() == 10);
  const auto& schema = FeatureSchema::canonical();
  for (const auto& c : cases) {
    RawWebsiteObservation obs;
    obs.url = c.at("url").get<std::string>();
    if (c.contains("html")) obs.html = c.at("html").get<std::string>();
    if (c.contains("redirect_count")) obs.redirect_count = c.at("redirect_count").get<int>();
    const EvidenceTable table = EvidenceTable::from_json(c.at("evidence").dump());
    const FeatureVector v = extract_all(obs, table.lookup(parse_url(obs.url).host));
    for (int i = 0; i < kFeatureCount; ++i) {
      CAPTURE(c.at("description").get<std::string>());
      CAPTURE(schema.name(i));
      CHECK(int{v(i)} == c.at("expected").at(schema.name(i)).get<int>());
    }
  }
}

TEST_CASE("PhishTank dump ingestion") {
  const IngestResult r = ingest_phishtank_dump(test::fixture("extract/phishtank_dump.csv"), EvidenceTable{});
  const json expected = read_json("extract/phishtank_expected.json");
  REQUIRE(r.dataset.size() == static_cast<Index>(expected.size()));
  CHECK(r.skipped == 1);
  CHECK(r.errors.size() == 1);
  const auto& schema = FeatureSchema::canonical();
  for (Index row = 0; row < r.dataset.size(); ++row) {
    CHECK(r.dataset.label(row) == Label::Phishing);
    for (int i = 0; i < kFeatureCount; ++i) {
      CAPTURE(row);
      CAPTURE(schema.name(i));
      CHECK(int{r.dataset.features()(row, i)} == expected[static_cast<std::size_t>(row)].at(schema.name(i)).get<int>());
    }
  }
  CHECK_THROWS_AS(ingest_phishtank_dump(test::fixture("extract/missing.csv"), EvidenceTable{}), DataError);
}

TEST_CASE("bare https URL without evidence: lexical legitimate, reputation unknown") {
  const FeatureVector v = extract_url("https://example.com/");
  for (Feature f : kLexicalFeatures) CHECK(value_of(v, f) == 1);
  for (Feature f : kReputationFeatures) CHECK(value_of(v, f) == 0);
}

TEST_CASE("URL length thresholds are inclusive of the middle band") {
  auto url_of_length = [](std::size_t n) {
    std::string u = "http://example.com/";
    u.append(n - u.size(), 'a');
    return u;
  };
  CHECK(value_of(extract_url(url_of_length(53)), Feature::UrlLength) == 1);
  CHECK(value_of(extract_url(url_of_length(54)), Feature::UrlLength) == 0);
  CHECK(value_of(extract_url(url_of_length(75)), Feature::UrlLength) == 0);
  CHECK(value_of(extract_url(url_of_length(76)), Feature::UrlLength) == -1);
}

TEST_CASE("sub-domain dots exclude www and multi-label public suffixes") {
  CHECK(value_of(extract_url("http://www.example.co.uk/"), Feature::HavingSubDomain) == 1);
  CHECK(value_of(extract_url("http://a.example.co.uk/"), Feature::HavingSubDomain) == 1);
  CHECK(value_of(extract_url("http://a.b.example.co.uk/"), Feature::HavingSubDomain) == 0);
  CHECK(value_of(extract_url("http://a.b.c.example.co.uk/"), Feature::HavingSubDomain) == -1);
}

TEST_CASE("integer and hex encoded hosts count as IP addresses") {
  CHECK(value_of(extract_url("http://3627734435/x"), Feature::HavingIpAddress) == -1);
  CHECK(value_of(extract_url("http://0x7f.0x0.0x0.0x1/x"), Feature::HavingIpAddress) == -1);
  CHECK(value_of(extract_url("http://[2001:db8::1]/x"), Feature::HavingIpAddress) == -1);
  CHECK(value_of(extract_url("http://example.com/x"), Feature::HavingIpAddress) == 1);
}

TEST_CASE("threshold config overrides and validation") {
  const ExtractorConfig cfg =
      ExtractorConfig::from_json(R"({"URL_Length": {"legit_below": 10, "phishing_above": 15},
                                     "Shortening_Service": {"hosts": ["Example.COM"]}})");
  const FeatureVector v = extract_all({"http://example.com/", std::nullopt, std::nullopt, std::nullopt}, {},
                                      FeatureSchema::canonical(), cfg);
  CHECK(value_of(v, Feature::UrlLength) == -1);
  CHECK(value_of(v, Feature::ShorteningService) == -1);
  CHECK_THROWS_AS(ExtractorConfig::from_json(R"({"Nope": {}})"), SpecError);
  CHECK_THROWS_AS(ExtractorConfig::from_json(R"({"URL_Length": {"legit_below": 10, "extra": 1}})"), SpecError);
  CHECK_THROWS_AS(ExtractorConfig::from_json(R"({"Request_URL": {"legit_below": 0.9, "phishing_above": 0.1}})"),
                  SpecError);
  CHECK_THROWS_AS(ExtractorConfig::from_json("[1"), SpecError);
}

TEST_CASE("evidence table lookup and validation") {
  const EvidenceTable t = EvidenceTable::from_json(R"({"Example.com": {"domain_age_days": 3},
                                                       "mail.example.com": {"domain_age_days": 900}})");
  CHECK(t.lookup("MAIL.example.com").domain_age_days == 900);
  CHECK(t.lookup("shop.example.com").domain_age_days == 3);
  CHECK_FALSE(t.lookup("other.org").domain_age_days.has_value());
  CHECK_THROWS_AS(EvidenceTable::from_json(R"({"x.com": {"page_rank": 3}})"), DataError);
  CHECK_THROWS_AS(EvidenceTable::from_json(R"({"x.com": {"age": 3}})"), Error);
}

TEST_CASE("an empty URL is a data error") { CHECK_THROWS_AS(extract_url(""), DataError); }
