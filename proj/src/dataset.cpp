#include "netpsy/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "netpsy/errors.hpp"

namespace netpsy {

namespace {

using nlohmann::json;

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == delimiter) {
      fields.push_back(field);
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(field);
  return fields;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

bool is_missing_token(const std::string& s) { return s.empty() || s == "NA"; }

double parse_cell(const std::string& s, long line_no, const std::string& column) {
  if (is_missing_token(s)) return std::numeric_limits<double>::quiet_NaN();
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + s.size() || !std::isfinite(v))
    fail(Errc::non_numeric_cell, "line " + std::to_string(line_no) + ", column '" +
                                     column + "': cannot parse '" + s + "'");
  return v;
}

long parse_index(const std::string& s, long line_no, const std::string& column) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const long v = std::strtol(begin, &end, 10);
  if (s.empty() || end != begin + s.size())
    fail(Errc::non_numeric_cell, "line " + std::to_string(line_no) + ", column '" +
                                     column + "': cannot parse '" + s +
                                     "' as an integer index");
  return v;
}

std::string format_value(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

bool IldDataset::has_groups() const {
  for (const auto& person : persons)
    if (person.group) return true;
  return false;
}

void IldDataset::validate() const {
  if (item_names.empty()) fail(Errc::invalid_argument, "item set is empty");
  if (persons.empty()) fail(Errc::invalid_argument, "dataset has no persons");
  const int p = static_cast<int>(item_names.size());
  bool any_group = false, all_group = true;
  for (const auto& person : persons) {
    if (person.t() < 1)
      fail(Errc::invalid_argument, "person '" + person.id + "' has no rows");
    if (person.values.cols() != p)
      fail(Errc::dimension_mismatch,
           "person '" + person.id + "' does not share the item set");
    if (static_cast<int>(person.day.size()) != person.t() ||
        static_cast<int>(person.beep.size()) != person.t())
      fail(Errc::dimension_mismatch,
           "person '" + person.id + "' has mismatched time indices");
    for (int r = 1; r < person.t(); ++r) {
      const bool ordered = person.day[r - 1] < person.day[r] ||
                           (person.day[r - 1] == person.day[r] &&
                            person.beep[r - 1] < person.beep[r]);
      if (!ordered) {
        if (person.day[r - 1] == person.day[r] && person.beep[r - 1] == person.beep[r])
          fail(Errc::duplicate_time_index,
               "person '" + person.id + "' day " + std::to_string(person.day[r]) +
                   " beep " + std::to_string(person.beep[r]));
        fail(Errc::invalid_argument,
             "person '" + person.id + "' rows are not sorted by (day, beep)");
      }
    }
    any_group = any_group || person.group.has_value();
    all_group = all_group && person.group.has_value();
  }
  if (any_group && !all_group)
    fail(Errc::invalid_argument, "group labels must cover all persons or none");
}

IldDataset load_ild(const std::string& path, const ColumnSchema& schema) {
  if (schema.items.empty())
    fail(Errc::invalid_argument, "schema lists no item columns");
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line))
    fail(Errc::missing_column, "file is empty, no header row");
  const std::vector<std::string> header = split_line(strip_cr(line), schema.delimiter);
  std::map<std::string, int> col_of;
  for (int i = 0; i < static_cast<int>(header.size()); ++i)
    col_of.emplace(header[i], i);  // first occurrence wins

  auto locate = [&](const std::string& name) {
    auto it = col_of.find(name);
    return it == col_of.end() ? -1 : it->second;
  };
  std::vector<std::string> absent;
  const int id_col = locate(schema.id);
  const int day_col = locate(schema.day);
  const int beep_col = locate(schema.beep);
  if (id_col < 0) absent.push_back(schema.id);
  if (day_col < 0) absent.push_back(schema.day);
  if (beep_col < 0) absent.push_back(schema.beep);
  std::vector<int> item_cols;
  for (const auto& item : schema.items) {
    const int c = locate(item);
    if (c < 0) absent.push_back(item);
    item_cols.push_back(c);
  }
  int group_col = -1;
  if (schema.group) {
    group_col = locate(*schema.group);
    if (group_col < 0) absent.push_back(*schema.group);
  }
  if (!absent.empty()) {
    std::string names;
    for (const auto& n : absent) names += (names.empty() ? "" : ", ") + n;
    fail(Errc::missing_column, "header lacks column(s): " + names);
  }

  struct Row {
    long day, beep;
    Eigen::VectorXd values;
  };
  std::vector<std::string> person_order;
  std::map<std::string, std::vector<Row>> rows_of;
  std::map<std::string, std::optional<std::string>> group_of;

  const int p = static_cast<int>(schema.items.size());
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_line(line, schema.delimiter);
    if (fields.size() != header.size())
      fail(Errc::invalid_argument,
           "line " + std::to_string(line_no) + " has " +
               std::to_string(fields.size()) + " fields, header has " +
               std::to_string(header.size()));

    const std::string id = fields[id_col];
    if (id.empty())
      fail(Errc::invalid_argument, "line " + std::to_string(line_no) + ": empty id");
    Row row;
    row.day = parse_index(fields[day_col], line_no, schema.day);
    row.beep = parse_index(fields[beep_col], line_no, schema.beep);
    row.values.resize(p);
    for (int j = 0; j < p; ++j)
      row.values(j) = parse_cell(fields[item_cols[j]], line_no, schema.items[j]);

    if (rows_of.find(id) == rows_of.end()) person_order.push_back(id);
    rows_of[id].push_back(std::move(row));

    if (group_col >= 0) {
      const std::string label = fields[group_col];
      auto it = group_of.find(id);
      if (it == group_of.end())
        group_of[id] = label;
      else if (*it->second != label)
        fail(Errc::invalid_argument,
             "person '" + id + "' has inconsistent group labels");
    }
  }
  if (person_order.empty()) fail(Errc::invalid_argument, "file has no data rows");

  IldDataset data;
  data.item_names = schema.items;
  data.has_day_index = true;
  int max_beeps = 0;
  for (const auto& id : person_order) {
    auto& rows = rows_of[id];
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      return a.day < b.day || (a.day == b.day && a.beep < b.beep);
    });
    for (std::size_t r = 1; r < rows.size(); ++r)
      if (rows[r - 1].day == rows[r].day && rows[r - 1].beep == rows[r].beep)
        fail(Errc::duplicate_time_index,
             "person '" + id + "' day " + std::to_string(rows[r].day) + " beep " +
                 std::to_string(rows[r].beep));

    PersonSeries person;
    person.id = id;
    if (group_col >= 0) person.group = group_of[id];
    person.values.resize(static_cast<Eigen::Index>(rows.size()), p);
    int in_day = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      person.day.push_back(rows[r].day);
      person.beep.push_back(rows[r].beep);
      person.values.row(static_cast<Eigen::Index>(r)) = rows[r].values;
      in_day = (r > 0 && rows[r].day == rows[r - 1].day) ? in_day + 1 : 1;
      max_beeps = std::max(max_beeps, in_day);
    }
    data.persons.push_back(std::move(person));
  }
  data.beeps_per_day = max_beeps;
  data.validate();
  return data;
}

IldDataset preprocess(const IldDataset& input, const PreprocessOptions& opts) {
  input.validate();
  IldDataset data = input;
  const int p = data.p();

  for (auto& person : data.persons) {
    for (int j = 0; j < p; ++j)
      if (!person.values.col(j).array().isFinite().any())
        fail(Errc::all_missing_item, "person '" + person.id +
                                         "' has no observed values for item '" +
                                         data.item_names[j] + "'");
    if (opts.missing == MissingPolicy::RowDrop) {
      std::vector<int> keep;
      for (int r = 0; r < person.t(); ++r)
        if (person.values.row(r).allFinite()) keep.push_back(r);
      if (keep.empty())
        fail(Errc::insufficient_observations,
             "person '" + person.id + "' has no complete rows after row drop");
      if (static_cast<int>(keep.size()) < person.t()) {
        PersonSeries reduced;
        reduced.id = person.id;
        reduced.group = person.group;
        reduced.values.resize(static_cast<Eigen::Index>(keep.size()), p);
        for (std::size_t r = 0; r < keep.size(); ++r) {
          reduced.day.push_back(person.day[keep[r]]);
          reduced.beep.push_back(person.beep[keep[r]]);
          reduced.values.row(static_cast<Eigen::Index>(r)) =
              person.values.row(keep[r]);
        }
        person = std::move(reduced);
      }
    }
  }

  if (opts.center == Centering::Global) {
    for (int j = 0; j < p; ++j) {
      double sum = 0.0;
      long n = 0;
      for (const auto& person : data.persons)
        for (int r = 0; r < person.t(); ++r)
          if (std::isfinite(person.values(r, j))) {
            sum += person.values(r, j);
            ++n;
          }
      const double mean = sum / static_cast<double>(n);
      for (auto& person : data.persons)
        for (int r = 0; r < person.t(); ++r)
          if (std::isfinite(person.values(r, j))) person.values(r, j) -= mean;
    }
  } else if (opts.center == Centering::WithinPerson) {
    for (auto& person : data.persons)
      for (int j = 0; j < p; ++j) {
        double sum = 0.0;
        long n = 0;
        for (int r = 0; r < person.t(); ++r)
          if (std::isfinite(person.values(r, j))) {
            sum += person.values(r, j);
            ++n;
          }
        const double mean = sum / static_cast<double>(n);
        for (int r = 0; r < person.t(); ++r)
          if (std::isfinite(person.values(r, j))) person.values(r, j) -= mean;
      }
  }

  if (opts.detrend == Detrend::Linear) {
    // Least-squares line in the row index, fitted on observed cells only.
    for (auto& person : data.persons)
      for (int j = 0; j < p; ++j) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        long n = 0;
        for (int r = 0; r < person.t(); ++r)
          if (std::isfinite(person.values(r, j))) {
            sx += r;
            sy += person.values(r, j);
            sxx += static_cast<double>(r) * r;
            sxy += r * person.values(r, j);
            ++n;
          }
        const double denom = n * sxx - sx * sx;
        const double slope = denom > 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
        const double intercept = (sy - slope * sx) / static_cast<double>(n);
        for (int r = 0; r < person.t(); ++r)
          if (std::isfinite(person.values(r, j)))
            person.values(r, j) -= intercept + slope * r;
      }
  }

  data.validate();
  return data;
}

std::string ild_to_json(const IldDataset& data) {
  data.validate();
  json j;
  j["item_names"] = data.item_names;
  j["beeps_per_day"] =
      data.beeps_per_day ? json(*data.beeps_per_day) : json(nullptr);
  j["has_day_index"] = data.has_day_index;
  json persons = json::array();
  for (const auto& person : data.persons) {
    json pj;
    pj["id"] = person.id;
    pj["group"] = person.group ? json(*person.group) : json(nullptr);
    pj["day"] = person.day;
    pj["beep"] = person.beep;
    json rows = json::array();
    for (int r = 0; r < person.t(); ++r) {
      json row = json::array();
      for (int c = 0; c < person.values.cols(); ++c) {
        const double v = person.values(r, c);
        row.push_back(std::isfinite(v) ? json(v) : json(nullptr));
      }
      rows.push_back(std::move(row));
    }
    pj["rows"] = std::move(rows);
    persons.push_back(std::move(pj));
  }
  j["persons"] = std::move(persons);
  return j.dump(2);
}

IldDataset ild_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(Errc::io_error, std::string("invalid dataset JSON: ") + e.what());
  }
  IldDataset data;
  try {
    data.item_names = j.at("item_names").get<std::vector<std::string>>();
    data.beeps_per_day =
        j.at("beeps_per_day").is_null()
            ? std::nullopt
            : std::optional<int>(j.at("beeps_per_day").get<int>());
    data.has_day_index = j.at("has_day_index").get<bool>();
    for (const auto& pj : j.at("persons")) {
      PersonSeries person;
      person.id = pj.at("id").get<std::string>();
      if (!pj.at("group").is_null())
        person.group = pj.at("group").get<std::string>();
      person.day = pj.at("day").get<std::vector<long>>();
      person.beep = pj.at("beep").get<std::vector<long>>();
      const auto& rows = pj.at("rows");
      person.values.resize(static_cast<Eigen::Index>(rows.size()),
                           static_cast<Eigen::Index>(data.item_names.size()));
      for (Eigen::Index r = 0; r < person.values.rows(); ++r) {
        const auto& row = rows[static_cast<std::size_t>(r)];
        if (row.size() != data.item_names.size())
          fail(Errc::dimension_mismatch, "row width does not match item set");
        for (Eigen::Index c = 0; c < person.values.cols(); ++c) {
          const auto& cell = row[static_cast<std::size_t>(c)];
          person.values(r, c) = cell.is_null()
                                    ? std::numeric_limits<double>::quiet_NaN()
                                    : cell.get<double>();
        }
      }
      data.persons.push_back(std::move(person));
    }
  } catch (const json::exception& e) {
    fail(Errc::io_error, std::string("invalid dataset JSON: ") + e.what());
  }
  data.validate();
  return data;
}

void save_ild_json(const IldDataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_error, "cannot write '" + path + "'");
  out << ild_to_json(data) << '\n';
}

IldDataset load_ild_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ild_from_json(buf.str());
}

void save_ild_csv(const IldDataset& data, const std::string& path) {
  data.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_error, "cannot write '" + path + "'");
  const bool groups = data.has_groups();
  out << "id,day,beep";
  for (const auto& item : data.item_names) out << ',' << item;
  if (groups) out << ",group";
  out << '\n';
  for (const auto& person : data.persons)
    for (int r = 0; r < person.t(); ++r) {
      out << person.id << ',' << person.day[r] << ',' << person.beep[r];
      for (int c = 0; c < person.values.cols(); ++c)
        out << ',' << format_value(person.values(r, c));
      if (groups) out << ',' << *person.group;
      out << '\n';
    }
}

}  // namespace netpsy
