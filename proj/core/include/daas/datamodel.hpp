#ifndef DAAS_DATAMODEL_HPP
#define DAAS_DATAMODEL_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace daas {

using Vector = std::vector<double>;

struct DataPoint {
  std::string id;
  Vector features;
};

/// Per-feature (min, max) pair used by min-max scaling.
struct FeatureRange {
  double min = 0.0;
  double max = 0.0;
};

/// Which columns of a CSV to read. Empty `features` selects every non-id column.
struct Schema {
  std::string id_column = "id";
  std::vector<std::string> features;
};

/**
 * A set of equal-dimension feature vectors with opaque string ids.
 *
 * `ranges` is empty for raw data; after normalize() it holds the (min, max)
 * of every feature and all values lie in [0, 1].
 */
class Dataset {
public:
  Dataset() = default;
  /// Validates that every point has the same non-zero dimension.
  Dataset(std::vector<DataPoint> points, std::vector<std::string> feature_names = {},
          std::string id_name = "id");

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  std::size_t dim() const noexcept { return dim_; }

  const std::vector<DataPoint>& points() const noexcept { return points_; }
  const DataPoint& operator[](std::size_t i) const { return points_[i]; }
  std::span<const double> row(std::size_t i) const { return points_[i].features; }

  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const std::string& id_name() const noexcept { return id_name_; }

  bool normalized() const noexcept { return !ranges_.empty(); }
  const std::vector<FeatureRange>& ranges() const noexcept { return ranges_; }

  /// Subset in the order of `indices`; keeps names and ranges.
  Dataset subset(std::span<const std::size_t> indices) const;
  /// Same names and ranges over a different set of points of equal dimension.
  Dataset with_points(std::vector<DataPoint> points) const;

private:
  friend Dataset normalize(const Dataset&);
  friend Dataset apply_normalization(const Dataset&, std::span<const FeatureRange>);

  std::vector<DataPoint> points_;
  std::size_t dim_ = 0;
  std::vector<std::string> feature_names_;
  std::string id_name_ = "id";
  std::vector<FeatureRange> ranges_;
};

/// Reads a header-carrying CSV. Throws ParseError naming the row on bad input.
Dataset ingest_csv(std::istream& source, const Schema& schema = {});

/// Emits the dataset in the ingestion format (header + one line per point).
void write_csv(std::ostream& out, const Dataset& ds);
std::string to_csv(const Dataset& ds);

/// Min-max scales every feature into [0, 1]; constant columns become 0.
Dataset normalize(const Dataset& ds);

/// Applies stored ranges to raw data (the same arithmetic as normalize()).
Dataset apply_normalization(const Dataset& raw, std::span<const FeatureRange> ranges);

/// Inverse of normalize() using the stored ranges; returns raw data.
Dataset denormalize(const Dataset& ds);

double squared_distance(std::span<const double> a, std::span<const double> b);

} // namespace daas

#endif
