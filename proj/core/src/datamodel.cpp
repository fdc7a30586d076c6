#include "daas/datamodel.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "daas/csv.hpp"
#include "daas/error.hpp"

namespace daas {

Dataset::Dataset(std::vector<DataPoint> points, std::vector<std::string> feature_names,
                 std::string id_name)
    : points_(std::move(points)),
      feature_names_(std::move(feature_names)),
      id_name_(std::move(id_name)) {
  if (!points_.empty()) {
    dim_ = points_.front().features.size();
    if (dim_ == 0) {
      throw Error("data points must have at least one feature");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (points_[i].features.size() != dim_) {
        throw Error("point " + points_[i].id + " has dimension " +
                    std::to_string(points_[i].features.size()) + ", expected " +
                    std::to_string(dim_));
      }
    }
  } else if (!feature_names_.empty()) {
    dim_ = feature_names_.size();
  }
  if (feature_names_.empty()) {
    for (std::size_t j = 0; j < dim_; ++j) {
      feature_names_.push_back("f" + std::to_string(j));
    }
  } else if (feature_names_.size() != dim_) {
    throw Error("feature name count does not match dimension");
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<DataPoint> pts;
  pts.reserve(indices.size());
  for (std::size_t i : indices) {
    pts.push_back(points_.at(i));
  }
  Dataset out(std::move(pts), feature_names_, id_name_);
  out.dim_ = dim_;
  out.ranges_ = ranges_;
  return out;
}

Dataset Dataset::with_points(std::vector<DataPoint> points) const {
  Dataset out(std::move(points), feature_names_, id_name_);
  if (!out.empty() && out.dim_ != dim_) {
    throw Error("replacement points have dimension " + std::to_string(out.dim_) +
                ", expected " + std::to_string(dim_));
  }
  out.ranges_ = ranges_;
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool parse_real(std::string_view text, double& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') {
    text.remove_prefix(1);
  }
  if (text.empty()) {
    return false;
  }
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc{} && res.ptr == text.data() + text.size();
}

} // namespace

Dataset ingest_csv(std::istream& source, const Schema& schema) {
  std::string line;
  if (!std::getline(source, line)) {
    throw ParseError("empty input: no header row", 0);
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  auto header = csv::split_record(line);
  for (auto& h : header) {
    h = std::string(trim(h));
  }

  std::unordered_map<std::string, std::size_t> column_of;
  for (std::size_t c = 0; c < header.size(); ++c) {
    column_of.emplace(header[c], c);
  }
  const auto id_it = column_of.find(schema.id_column);
  if (id_it == column_of.end()) {
    throw ParseError("id column '" + schema.id_column + "' not found in header", 0,
                     schema.id_column);
  }
  const std::size_t id_col = id_it->second;

  std::vector<std::string> names = schema.features;
  if (names.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c != id_col) {
        names.push_back(header[c]);
      }
    }
  }
  if (names.empty()) {
    throw ParseError("schema selects no feature columns", 0);
  }
  std::vector<std::size_t> feature_cols;
  for (const auto& name : names) {
    const auto it = column_of.find(name);
    if (it == column_of.end()) {
      throw ParseError("feature column '" + name + "' not found in header", 0, name);
    }
    feature_cols.push_back(it->second);
  }

  std::vector<DataPoint> points;
  std::size_t row = 0;
  while (std::getline(source, line)) {
    ++row;
    if (trim(line).empty()) {
      continue;
    }
    const auto fields = csv::split_record(line);
    if (fields.size() != header.size()) {
      throw ParseError("row " + std::to_string(row) + ": expected " +
                           std::to_string(header.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       row);
    }
    DataPoint p;
    p.id = fields[id_col];
    p.features.reserve(feature_cols.size());
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
      double v = 0.0;
      const auto& text = fields[feature_cols[j]];
      if (!parse_real(text, v)) {
        throw ParseError("row " + std::to_string(row) + ", column '" + names[j] +
                             "': non-numeric value '" + text + "'",
                         row, names[j]);
      }
      if (!std::isfinite(v)) {
        throw ParseError("row " + std::to_string(row) + ", column '" + names[j] +
                             "': non-finite value",
                         row, names[j]);
      }
      p.features.push_back(v);
    }
    points.push_back(std::move(p));
  }
  if (points.empty()) {
    throw ParseError("input has a header but no data rows", 0);
  }
  return Dataset(std::move(points), std::move(names), schema.id_column);
}

void write_csv(std::ostream& out, const Dataset& ds) {
  out << csv::escape(ds.id_name());
  for (const auto& name : ds.feature_names()) {
    out << ',' << csv::escape(name);
  }
  out << '\n';
  for (const auto& p : ds.points()) {
    out << csv::escape(p.id);
    for (double v : p.features) {
      out << ',' << csv::format_real(v);
    }
    out << '\n';
  }
}

std::string to_csv(const Dataset& ds) {
  std::ostringstream out;
  write_csv(out, ds);
  return out.str();
}

namespace {

double scale(double v, const FeatureRange& r) {
  const double span = r.max - r.min;
  return span > 0.0 ? (v - r.min) / span : 0.0;
}

} // namespace

Dataset normalize(const Dataset& ds) {
  if (ds.normalized()) {
    throw Error("dataset is already normalized");
  }
  if (ds.empty()) {
    throw Error("cannot normalize an empty dataset");
  }
  std::vector<FeatureRange> ranges(ds.dim());
  for (std::size_t j = 0; j < ds.dim(); ++j) {
    ranges[j] = {ds[0].features[j], ds[0].features[j]};
  }
  for (const auto& p : ds.points()) {
    for (std::size_t j = 0; j < ds.dim(); ++j) {
      const double v = p.features[j];
      if (!std::isfinite(v)) {
        throw Error("point " + p.id + " has a non-finite value in feature " +
                    ds.feature_names()[j]);
      }
      ranges[j].min = std::min(ranges[j].min, v);
      ranges[j].max = std::max(ranges[j].max, v);
    }
  }
  return apply_normalization(ds, ranges);
}

Dataset apply_normalization(const Dataset& raw, std::span<const FeatureRange> ranges) {
  if (ranges.size() != raw.dim()) {
    throw Error("range count does not match dataset dimension");
  }
  std::vector<DataPoint> pts = raw.points();
  for (auto& p : pts) {
    for (std::size_t j = 0; j < p.features.size(); ++j) {
      if (!std::isfinite(p.features[j])) {
        throw Error("point " + p.id + " has a non-finite value");
      }
      p.features[j] = scale(p.features[j], ranges[j]);
    }
  }
  Dataset out(std::move(pts), raw.feature_names(), raw.id_name());
  out.ranges_.assign(ranges.begin(), ranges.end());
  return out;
}

Dataset denormalize(const Dataset& ds) {
  if (!ds.normalized()) {
    throw Error("dataset is not normalized");
  }
  std::vector<DataPoint> pts = ds.points();
  for (auto& p : pts) {
    for (std::size_t j = 0; j < p.features.size(); ++j) {
      const auto& r = ds.ranges()[j];
      p.features[j] = r.min + p.features[j] * (r.max - r.min);
    }
  }
  return Dataset(std::move(pts), ds.feature_names(), ds.id_name());
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

} // namespace daas
