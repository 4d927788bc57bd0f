#ifndef NETPSY_DATASET_HPP
#define NETPSY_DATASET_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace netpsy {

// One person's time series. values is T x P with NaN marking missing
// cells; day/beep carry the sampling scheme and are sorted
// lexicographically, with no duplicate (day, beep) pair.
struct PersonSeries {
  std::string id;
  std::optional<std::string> group;
  std::vector<long> day;
  std::vector<long> beep;
  Eigen::MatrixXd values;

  int t() const { return static_cast<int>(values.rows()); }
};

// Intensive longitudinal dataset: persons in file order, shared item names.
struct IldDataset {
  std::vector<std::string> item_names;
  std::vector<PersonSeries> persons;
  std::optional<int> beeps_per_day;  // largest beep count seen in any day
  bool has_day_index = true;

  int p() const { return static_cast<int>(item_names.size()); }
  bool has_groups() const;

  void validate() const;
};

// Column mapping for load_ild. The id, day and beep columns are required;
// group is optional. Missing cells are the empty string or "NA".
struct ColumnSchema {
  std::string id = "id";
  std::string day = "day";
  std::string beep = "beep";
  std::vector<std::string> items;
  std::optional<std::string> group;
  char delimiter = ',';
};

enum class Centering { None, WithinPerson, Global };
enum class Detrend { None, Linear };
enum class MissingPolicy { RowDrop, Pairwise };

struct PreprocessOptions {
  Centering center = Centering::None;
  Detrend detrend = Detrend::None;
  MissingPolicy missing = MissingPolicy::RowDrop;
  // Whether the first beep of a day has no lagged predecessor. Consumed by
  // the lag-pair construction downstream, carried here as the documented
  // default for CLI runs.
  bool night_break = true;
};

// Loads a UTF-8 CSV with a header row. Persons appear in order of first
// appearance; rows are sorted by (day, beep) within person. Values must
// parse as finite reals or be missing. Field quoting is not supported, so
// the delimiter must not occur inside values.
IldDataset load_ild(const std::string& path, const ColumnSchema& schema);

// Applies missing-data policy, centering and detrending, in that order.
// Never changes the person count, item count or group labels.
IldDataset preprocess(const IldDataset& data, const PreprocessOptions& opts);

// Canonical JSON form; load -> serialize -> load reproduces the numeric
// content bit for bit.
std::string ild_to_json(const IldDataset& data);
IldDataset ild_from_json(const std::string& text);

void save_ild_json(const IldDataset& data, const std::string& path);
IldDataset load_ild_json(const std::string& path);

// Writes the dataset back out as a CSV in the canonical column order
// (id, day, beep, items, then group when present).
void save_ild_csv(const IldDataset& data, const std::string& path);

}  // namespace netpsy

#endif
