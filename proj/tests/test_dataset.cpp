#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "netpsy/dataset.hpp"
#include "netpsy/errors.hpp"
#include "netpsy/rng.hpp"
#include "util.hpp"

using namespace netpsy;
using netpsy::test::fails_with;
using netpsy::test::fresh_dir;
using netpsy::test::same_value;

namespace {

std::string write_file(const std::string& name, const std::string& content) {
  static const auto dir = fresh_dir("dataset");
  const std::string path = (dir / name).string();
  std::ofstream out(path);
  out << content;
  return path;
}

bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                 double tol = 0.0) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (!same_value(a(i, j), b(i, j), tol)) return false;
  return true;
}

bool same_dataset(const IldDataset& a, const IldDataset& b) {
  if (a.item_names != b.item_names) return false;
  if (a.persons.size() != b.persons.size()) return false;
  if (a.beeps_per_day != b.beeps_per_day) return false;
  if (a.has_day_index != b.has_day_index) return false;
  for (std::size_t i = 0; i < a.persons.size(); ++i) {
    const PersonSeries& x = a.persons[i];
    const PersonSeries& y = b.persons[i];
    if (x.id != y.id || x.group != y.group) return false;
    if (x.day != y.day || x.beep != y.beep) return false;
    if (!same_matrix(x.values, y.values)) return false;
  }
  return true;
}

ColumnSchema two_item_schema() {
  ColumnSchema schema;
  schema.items = {"a", "b"};
  return schema;
}

}  // namespace

TEST_CASE("dataset: hand fixture loads with sorted rows") {
  // Rows deliberately out of (day, beep) order.
  const std::string path = write_file("hand.csv",
                                      "id,day,beep,a,b\n"
                                      "p1,1,2,3.5,4.5\n"
                                      "p1,1,1,1.5,2.5\n"
                                      "p1,2,1,5.5,6.5\n");
  const IldDataset data = load_ild(path, two_item_schema());
  REQUIRE(data.persons.size() == 1);
  CHECK(data.p() == 2);
  const PersonSeries& person = data.persons[0];
  CHECK(person.id == "p1");
  CHECK(person.t() == 3);
  CHECK(person.day == std::vector<long>{1, 1, 2});
  CHECK(person.beep == std::vector<long>{1, 2, 1});
  CHECK(person.values(0, 0) == 1.5);
  CHECK(person.values(1, 1) == 4.5);
  CHECK(person.values(2, 0) == 5.5);
  CHECK(data.beeps_per_day.has_value());
  CHECK(*data.beeps_per_day == 2);
}

TEST_CASE("dataset: missing cells are empty string or NA") {
  const std::string path = write_file("missing.csv",
                                      "id,day,beep,a,b\n"
                                      "p1,1,1,,2\n"
                                      "p1,1,2,NA,4\n"
                                      "p1,1,3,5,6\n");
  const IldDataset data = load_ild(path, two_item_schema());
  const Eigen::MatrixXd& v = data.persons[0].values;
  CHECK(std::isnan(v(0, 0)));
  CHECK(std::isnan(v(1, 0)));
  CHECK(v(2, 0) == 5.0);
  CHECK(v(0, 1) == 2.0);
}

TEST_CASE("dataset: load errors carry their cause") {
  CHECK(fails_with(Errc::missing_column, [&] {
    load_ild(write_file("empty.csv", ""), two_item_schema());
  }));
  CHECK(fails_with(Errc::missing_column, [&] {
    load_ild(write_file("nocol.csv", "id,day,beep,a\np1,1,1,1\n"),
             two_item_schema());
  }));
  CHECK(fails_with(Errc::non_numeric_cell, [&] {
    load_ild(write_file("bad.csv", "id,day,beep,a,b\np1,1,1,oops,2\n"),
             two_item_schema());
  }));
  CHECK(fails_with(Errc::duplicate_time_index, [&] {
    load_ild(write_file("dup.csv",
                        "id,day,beep,a,b\np1,1,1,1,2\np1,1,1,3,4\n"),
             two_item_schema());
  }));
  CHECK(fails_with(Errc::io_error, [&] {
    load_ild("/nonexistent/netpsy.csv", two_item_schema());
  }));

  // The coordinates of a bad cell are named in the message.
  try {
    load_ild(write_file("bad2.csv", "id,day,beep,a,b\np1,1,1,1,x7\n"),
             two_item_schema());
    CHECK(false);
  } catch (const Error& e) {
    const std::string what = e.what();
    CHECK(what.find("b") != std::string::npos);
    CHECK(what.find("2") != std::string::npos);  // data row number
  }
}

TEST_CASE("dataset: synthetic roster of 125 persons and 8 items") {
  Rng rng(500);
  std::string csv = "id,day,beep,i1,i2,i3,i4,i5,i6,i7,i8\n";
  for (int person = 0; person < 125; ++person) {
    for (int day = 1; day <= 2; ++day)
      for (int beep = 1; beep <= 3; ++beep) {
        csv += "s" + std::to_string(person) + "," + std::to_string(day) + "," +
               std::to_string(beep);
        for (int item = 0; item < 8; ++item)
          csv += "," + std::to_string(rng.uniform(0.0, 100.0));
        csv += "\n";
      }
  }
  ColumnSchema schema;
  schema.items = {"i1", "i2", "i3", "i4", "i5", "i6", "i7", "i8"};
  const IldDataset data = load_ild(write_file("roster.csv", csv), schema);
  CHECK(data.p() == 8);
  CHECK(data.persons.size() == 125);
  // Person order is file order.
  CHECK(data.persons.front().id == "s0");
  CHECK(data.persons.back().id == "s124");
  CHECK(*data.beeps_per_day == 3);
}

TEST_CASE("dataset: group labels must agree within person") {
  ColumnSchema schema = two_item_schema();
  schema.group = "grp";
  const IldDataset data = load_ild(
      write_file("grp.csv",
                 "id,day,beep,a,b,grp\n"
                 "p1,1,1,1,2,ctl\n"
                 "p1,1,2,3,4,ctl\n"
                 "p2,1,1,5,6,trt\n"),
      schema);
  CHECK(data.has_groups());
  CHECK(*data.persons[0].group == "ctl");
  CHECK(*data.persons[1].group == "trt");

  CHECK(fails_with(Errc::invalid_argument, [&] {
    load_ild(write_file("grp2.csv",
                        "id,day,beep,a,b,grp\n"
                        "p1,1,1,1,2,ctl\n"
                        "p1,1,2,3,4,trt\n"),
             schema);
  }));
}

TEST_CASE("dataset: preprocess centering and detrending") {
  SUBCASE("centering a constant gives zeros") {
    const std::string path = write_file("const.csv",
                                        "id,day,beep,a,b\n"
                                        "p1,1,1,7,3\n"
                                        "p1,1,2,7,3\n"
                                        "p1,1,3,7,3\n");
    const IldDataset data = load_ild(path, two_item_schema());
    PreprocessOptions opts;
    opts.center = Centering::WithinPerson;
    const IldDataset out = preprocess(data, opts);
    CHECK(out.persons[0].values.cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("linear detrend removes an exact trend") {
    const std::string path = write_file("trend.csv",
                                        "id,day,beep,a,b\n"
                                        "p1,1,1,1,2\n"
                                        "p1,1,2,2,4\n"
                                        "p1,1,3,3,6\n");
    const IldDataset data = load_ild(path, two_item_schema());
    PreprocessOptions opts;
    opts.detrend = Detrend::Linear;
    const IldDataset out = preprocess(data, opts);
    CHECK(out.persons[0].values.cwiseAbs().maxCoeff() < 1e-10);
  }

  SUBCASE("row drop removes exactly the incomplete rows") {
    const std::string path = write_file("drop.csv",
                                        "id,day,beep,a,b\n"
                                        "p1,1,1,1,2\n"
                                        "p1,1,2,NA,4\n"
                                        "p1,1,3,5,6\n");
    const IldDataset data = load_ild(path, two_item_schema());
    PreprocessOptions opts;  // default policy is row drop
    const IldDataset out = preprocess(data, opts);
    CHECK(out.persons[0].t() == 2);
    CHECK(out.persons[0].values(1, 0) == 5.0);
    CHECK(out.persons[0].beep == std::vector<long>{1, 3});

    PreprocessOptions pairwise;
    pairwise.missing = MissingPolicy::Pairwise;
    const IldDataset kept = preprocess(data, pairwise);
    CHECK(kept.persons[0].t() == 3);
    CHECK(std::isnan(kept.persons[0].values(1, 0)));
  }

  SUBCASE("within-person centering zeroes observed means and is idempotent") {
    const std::string path = write_file("center.csv",
                                        "id,day,beep,a,b\n"
                                        "p1,1,1,1,10\n"
                                        "p1,1,2,2,NA\n"
                                        "p1,1,3,6,30\n");
    const IldDataset data = load_ild(path, two_item_schema());
    PreprocessOptions opts;
    opts.center = Centering::WithinPerson;
    opts.missing = MissingPolicy::Pairwise;
    const IldDataset once = preprocess(data, opts);
    for (int j = 0; j < 2; ++j) {
      double sum = 0.0;
      int count = 0;
      for (int r = 0; r < once.persons[0].t(); ++r)
        if (std::isfinite(once.persons[0].values(r, j))) {
          sum += once.persons[0].values(r, j);
          ++count;
        }
      CHECK(std::abs(sum / count) < 1e-10);
    }
    const IldDataset twice = preprocess(once, opts);
    CHECK(same_matrix(twice.persons[0].values, once.persons[0].values, 1e-12));
  }

  SUBCASE("global centering uses the grand mean per item") {
    const std::string path = write_file("global.csv",
                                        "id,day,beep,a,b\n"
                                        "p1,1,1,1,0\n"
                                        "p1,1,2,2,0\n"
                                        "p2,1,1,9,0\n"
                                        "p2,1,2,12,0\n");
    const IldDataset data = load_ild(path, two_item_schema());
    PreprocessOptions opts;
    opts.center = Centering::Global;
    const IldDataset out = preprocess(data, opts);
    // Grand mean of item a is 6; person means stay distinct.
    CHECK(out.persons[0].values(0, 0) == doctest::Approx(-5.0));
    CHECK(out.persons[1].values(1, 0) == doctest::Approx(6.0));
  }

  SUBCASE("an item with no observed values is an error") {
    const std::string path = write_file("allmiss.csv",
                                        "id,day,beep,a,b\n"
                                        "p1,1,1,NA,2\n"
                                        "p1,1,2,NA,4\n");
    const IldDataset data = load_ild(path, two_item_schema());
    CHECK(fails_with(Errc::all_missing_item,
                     [&] { preprocess(data, PreprocessOptions{}); }));
  }

  SUBCASE("preprocess never alters person count, items or groups") {
    ColumnSchema schema = two_item_schema();
    schema.group = "grp";
    const std::string path = write_file("stable.csv",
                                        "id,day,beep,a,b,grp\n"
                                        "p1,1,1,1,2,x\n"
                                        "p1,1,2,2,3,x\n"
                                        "p2,1,1,5,6,y\n"
                                        "p2,1,2,6,7,y\n");
    const IldDataset data = load_ild(path, schema);
    PreprocessOptions opts;
    opts.center = Centering::WithinPerson;
    opts.detrend = Detrend::Linear;
    const IldDataset out = preprocess(data, opts);
    CHECK(out.persons.size() == data.persons.size());
    CHECK(out.item_names == data.item_names);
    CHECK(out.persons[0].group == data.persons[0].group);
    CHECK(out.persons[1].group == data.persons[1].group);
  }
}

TEST_CASE("dataset: JSON round-trip is bit-for-bit") {
  const std::string path = write_file("json.csv",
                                      "id,day,beep,a,b\n"
                                      "p1,1,1,0.1,2\n"
                                      "p1,1,2,NA,0.30000000000000004\n"
                                      "p2,1,1,-1e-7,6.25\n"
                                      "p2,1,2,3.141592653589793,1e300\n");
  const IldDataset data = load_ild(path, two_item_schema());
  const IldDataset back = ild_from_json(ild_to_json(data));
  CHECK(same_dataset(data, back));

  // And through a file.
  const auto dir = fresh_dir("dataset_json");
  const std::string json_path = (dir / "data.json").string();
  save_ild_json(data, json_path);
  CHECK(same_dataset(load_ild_json(json_path), data));
}

TEST_CASE("dataset: CSV save/load round-trip") {
  ColumnSchema schema = two_item_schema();
  schema.group = "grp";
  const std::string path = write_file("csvrt.csv",
                                      "id,day,beep,a,b,grp\n"
                                      "p1,1,1,0.125,NA,x\n"
                                      "p1,2,1,-3.5,4.75,x\n"
                                      "p2,1,1,5,6,y\n");
  const IldDataset data = load_ild(path, schema);
  const auto dir = fresh_dir("dataset_csv");
  const std::string out_path = (dir / "out.csv").string();
  save_ild_csv(data, out_path);
  // The writer canonicalizes the column names, including the group header.
  ColumnSchema canonical = two_item_schema();
  canonical.group = "group";
  const IldDataset back = load_ild(out_path, canonical);
  CHECK(same_dataset(data, back));
}

TEST_CASE("dataset: custom delimiter") {
  ColumnSchema schema = two_item_schema();
  schema.delimiter = ';';
  const std::string path = write_file("semi.csv",
                                      "id;day;beep;a;b\n"
                                      "p1;1;1;1.5;2.5\n"
                                      "p1;1;2;3.5;4.5\n");
  const IldDataset data = load_ild(path, schema);
  CHECK(data.persons[0].values(1, 1) == 4.5);
}
