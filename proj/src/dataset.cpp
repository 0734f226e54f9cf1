#include "phishml/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "phishml/error.hpp"

namespace phishml {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string position(const std::string& source, std::size_t row, std::size_t col) {
  std::ostringstream os;
  os << source << ": row " << row;
  if (col > 0) os << ", column " << col;
  return os.str();
}

}  // namespace

Dataset::Dataset(FeatureSchema schema, FeatureMatrix features, LabelVector labels, std::string provenance)
    : schema_(std::move(schema)),
      features_(std::move(features)),
      labels_(std::move(labels)),
      provenance_(std::move(provenance)) {
  if (schema_.size() != kFeatureCount)
    throw DataError("dataset schema must have " + std::to_string(kFeatureCount) + " features");
  if (features_.rows() != labels_.size()) throw DataError("dataset: feature rows and label count differ");
  for (Index i = 0; i < features_.rows(); ++i) {
    for (int j = 0; j < kFeatureCount; ++j)
      if (!schema_.domain(j).contains(features_(i, j)))
        throw DataError("value " + std::to_string(int{features_(i, j)}) + " outside domain of " + schema_.name(j),
                        static_cast<std::size_t>(i) + 2, static_cast<std::size_t>(j) + 1);
    if (labels_(i) != -1 && labels_(i) != 1)
      throw DataError("label " + std::to_string(int{labels_(i)}) + " outside {-1, 1}", static_cast<std::size_t>(i) + 2,
                      kFeatureCount + 1);
  }
}

Dataset Dataset::from_samples(std::span<const LabeledSample> samples, std::string provenance,
                              const FeatureSchema& schema) {
  FeatureMatrix x(static_cast<Index>(samples.size()), kFeatureCount);
  LabelVector y(static_cast<Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    x.row(static_cast<Index>(i)) = samples[i].features.transpose();
    y(static_cast<Index>(i)) = static_cast<std::int8_t>(samples[i].label);
  }
  return Dataset(schema, std::move(x), std::move(y), std::move(provenance));
}

std::array<Index, 2> Dataset::class_counts() const {
  const Index legit = (labels_.array() > 0).count();
  return {size() - legit, legit};
}

Dataset Dataset::subset(std::span<const Index> rows) const {
  FeatureMatrix x(static_cast<Index>(rows.size()), kFeatureCount);
  LabelVector y(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    x.row(static_cast<Index>(i)) = features_.row(rows[i]);
    y(static_cast<Index>(i)) = labels_(rows[i]);
  }
  Dataset out;
  out.schema_ = schema_;
  out.features_ = std::move(x);
  out.labels_ = std::move(y);
  out.provenance_ = provenance_;
  return out;
}

Dataset parse_csv(std::istream& in, const std::string& source) {
  const FeatureSchema& schema = FeatureSchema::canonical();
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": missing header row", 1);

  auto header = split_commas(line);
  if (!header.empty() && header.front().starts_with("\xEF\xBB\xBF")) header.front().remove_prefix(3);
  if (header.size() != kFeatureCount + 1)
    throw DataError(position(source, 1, 0) + ": expected " + std::to_string(kFeatureCount + 1) + " columns, found " +
                        std::to_string(header.size()),
                    1);
  if (normalize_header(header.back()) != normalize_header(kLabelColumn))
    throw DataError(position(source, 1, header.size()) + ": last column must be 'Result'", 1, header.size());

  // Source column -> schema index.
  std::array<int, kFeatureCount> column_to_feature{};
  std::array<bool, kFeatureCount> seen{};
  for (std::size_t c = 0; c < kFeatureCount; ++c) {
    const auto idx = schema.find(header[c]);
    if (!idx) throw DataError(position(source, 1, c + 1) + ": unknown feature column '" + std::string(header[c]) + "'", 1, c + 1);
    if (seen[static_cast<std::size_t>(*idx)])
      throw DataError(position(source, 1, c + 1) + ": duplicate feature column '" + std::string(header[c]) + "'", 1, c + 1);
    seen[static_cast<std::size_t>(*idx)] = true;
    column_to_feature[c] = *idx;
  }

  std::vector<std::array<Ternary, kFeatureCount>> rows;
  std::vector<std::int8_t> labels;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != kFeatureCount + 1)
      throw DataError(position(source, row, 0) + ": expected " + std::to_string(kFeatureCount + 1) + " cells, found " +
                          std::to_string(cells.size()),
                      row);
    std::array<Ternary, kFeatureCount> values{};
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto cell = cells[c];
      if (cell.empty()) throw DataError(position(source, row, c + 1) + ": missing value", row, c + 1);
      int v = 0;
      const char* begin = cell.data();
      const char* end = begin + cell.size();
      if (*begin == '+') ++begin;
      const auto [ptr, ec] = std::from_chars(begin, end, v);
      if (ec != std::errc{} || ptr != end)
        throw DataError(position(source, row, c + 1) + ": non-integer cell '" + std::string(cell) + "'", row, c + 1);
      if (c == kFeatureCount) {
        if (v != -1 && v != 1)
          throw DataError(position(source, row, c + 1) + ": label " + std::to_string(v) + " outside {-1, 1}", row, c + 1);
        labels.push_back(static_cast<std::int8_t>(v));
      } else {
        const int f = column_to_feature[c];
        if (!schema.domain(f).contains(v))
          throw DataError(position(source, row, c + 1) + ": value " + std::to_string(v) + " outside domain of " +
                              schema.name(f),
                          row, c + 1);
        values[static_cast<std::size_t>(f)] = static_cast<Ternary>(v);
      }
    }
    rows.push_back(values);
  }

  FeatureMatrix x(static_cast<Index>(rows.size()), kFeatureCount);
  LabelVector y(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < kFeatureCount; ++j) x(static_cast<Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
    y(static_cast<Index>(i)) = labels[i];
  }
  return Dataset(schema, std::move(x), std::move(y), source);
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file " + path.string());
  return parse_csv(in, path.string());
}

void write_csv(std::ostream& out, const Dataset& d) {
  for (int j = 0; j < kFeatureCount; ++j) out << d.schema().name(j) << ',';
  out << kLabelColumn << '\n';
  for (Index i = 0; i < d.size(); ++i) {
    for (int j = 0; j < kFeatureCount; ++j) out << int{d.features()(i, j)} << ',';
    out << int{d.labels()(i)} << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Dataset& d) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset file " + path.string());
  write_csv(out, d);
}

std::vector<ColumnStats> summarize(const Dataset& d) {
  if (d.empty()) throw DataError("summarize: dataset is empty");
  const auto n = static_cast<long long>(d.size());
  auto stats = [n](auto column, std::string name) {
    // Integer sums are exact; one rounding per statistic.
    long long s1 = 0, s2 = 0;
    for (Index i = 0; i < column.size(); ++i) {
      const long long v = column(i);
      s1 += v;
      s2 += v * v;
    }
    ColumnStats c{std::move(name), static_cast<double>(s1) / static_cast<double>(n), 0.0};
    if (n > 1) {
      const long long num = n * s2 - s1 * s1;
      c.std = std::sqrt(static_cast<double>(num) / (static_cast<double>(n) * static_cast<double>(n - 1)));
    }
    return c;
  };
  std::vector<ColumnStats> out;
  out.reserve(kFeatureCount + 1);
  for (int j = 0; j < kFeatureCount; ++j) out.push_back(stats(d.features().col(j), d.schema().name(j)));
  out.push_back(stats(d.labels(), std::string(kLabelColumn)));
  return out;
}

Dataset concat(const Dataset& a, const Dataset& b, std::string provenance) {
  if (!(a.schema() == b.schema())) throw DataError("concat: schemas differ");
  FeatureMatrix x(a.size() + b.size(), kFeatureCount);
  x << a.features(), b.features();
  LabelVector y(a.size() + b.size());
  y << a.labels(), b.labels();
  return Dataset(a.schema(), std::move(x), std::move(y), std::move(provenance));
}

}  // namespace phishml
