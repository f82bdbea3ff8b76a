#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <doctest.h>

#include <ccep/error.hpp>
#include <ccep/panel.hpp>

#include "../support/oracles.hpp"

using namespace ccep;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("ccep_panel_" + name + ".csv");
  std::ofstream(path) << text;
  return path;
}

ErrorKind load_error(const std::string& name, const std::string& text, const CsvSchema& schema = {}) {
  try {
    load_csv(write_temp(name, text), schema);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("load_csv accepted " << name);
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("load_csv reads a small balanced panel") {
  const auto ds = load_csv(write_temp("ok", "unit,time,y,x1\n"
                                            "a,1,1.0,0.5\n"
                                            "a,2,2.0,0.25\n"
                                            "a,3,3.0,0.125\n"
                                            "b,1,4.0,1\n"
                                            "b,2,5.0,2\n"
                                            "b,3,6.0,3\n"));
  CHECK(ds.units() == 2);
  CHECK(ds.periods() == 3);
  CHECK(ds.regressors() == 1);
  CHECK(ds.y(1)(2) == 6.0);
  CHECK(ds.x(0)(1, 0) == 0.25);
  CHECK(ds.unit_ids() == std::vector<std::string>{"a", "b"});
  CHECK(ds.regressor_names() == std::vector<std::string>{"x1"});
}

TEST_CASE("load_csv orders numeric labels numerically and ignores row order") {
  const auto ds = load_csv(write_temp("order", "time,x,unit,y\n"
                                               "10,1,2,7\n"
                                               "9,2,2,8\n"
                                               "10,3,10,9\n"
                                               "9,4,10,10\n"));
  CHECK(ds.unit_ids() == std::vector<std::string>{"2", "10"});
  CHECK(ds.time_ids() == std::vector<std::string>{"9", "10"});
  CHECK(ds.y(0)(0) == 8.0);
  CHECK(ds.x(1)(1, 0) == 3.0);
}

TEST_CASE("load_csv honours the column schema") {
  CsvSchema schema;
  schema.unit = "id";
  schema.time = "t";
  schema.y = "out";
  schema.x = {"b"};
  const auto ds = load_csv(write_temp("schema", "id,t,out,a,b\n1,1,0,9,1\n1,2,0,9,2\n2,1,0,9,3\n2,2,0,9,4\n"), schema);
  CHECK(ds.regressors() == 1);
  CHECK(ds.x(1)(0, 0) == 3.0);
}

TEST_CASE("load_csv error kinds") {
  CHECK(load_error("unbalanced", "unit,time,y,x\n1,1,0,0\n1,2,0,0\n1,3,0,0\n2,1,0,0\n2,2,0,0\n") ==
        ErrorKind::UnbalancedPanel);
  CHECK(load_error("dup", "unit,time,y,x\n1,1,0,0\n1,1,0,0\n2,1,0,0\n2,2,0,0\n") == ErrorKind::DuplicateObservation);
  CHECK(load_error("missing", "unit,time,y,x\n1,1,0,\n1,2,0,0\n2,1,0,0\n2,2,0,0\n") == ErrorKind::MissingValue);
  CHECK(load_error("nan", "unit,time,y,x\n1,1,0,abc\n1,2,0,0\n2,1,0,0\n2,2,0,0\n") == ErrorKind::MissingValue);
  CHECK(load_error("nocol", "unit,time,y,x\n1,1,0,0\n", CsvSchema{"unit", "time", "y", {"z"}}) ==
        ErrorKind::SchemaMismatch);
  CHECK(load_error("empty", "") == ErrorKind::SchemaMismatch);
  CHECK_THROWS_AS(load_csv("/nonexistent/panel.csv"), Error);
}

TEST_CASE("write_csv round trips bit for bit") {
  std::mt19937_64 rng(1);
  const auto ds = oracle::random_panel(rng, 7, 5, 3);
  const auto path = std::filesystem::temp_directory_path() / "ccep_panel_roundtrip.csv";
  write_csv(ds, path);
  const auto back = load_csv(path);
  CHECK(identical(back.stacked_x(), ds.stacked_x()));
  CHECK(identical(back.stacked_y(), ds.stacked_y()));
  CHECK(back.regressor_names() == ds.regressor_names());
}

TEST_CASE("cross_section_means") {
  Matrix x0 = Matrix::Zero(3, 2), x2 = Matrix::Constant(3, 2, 2.0);
  const auto two = PanelDataset::from_units({Vector::Zero(3), Vector::Constant(3, 4.0)}, {x0, x2});
  const auto m = cross_section_means(two);
  CHECK(identical(m.x_bar, Matrix(Matrix::Ones(3, 2))));
  CHECK(identical(m.y_bar, Vector(Vector::Constant(3, 2.0))));

  std::mt19937_64 rng(4);
  const auto one = oracle::random_panel(rng, 1 + 1, 4, 2);
  const auto same = PanelDataset::from_units({one.y(0), one.y(0), one.y(0)},
                                             {Matrix(one.x(0)), Matrix(one.x(0)), Matrix(one.x(0))});
  const auto ms = cross_section_means(same);
  CHECK(oracle::max_abs(ms.x_bar - one.x(0)) < 1e-15);
  CHECK(oracle::max_abs(ms.y_bar - one.y(0)) < 1e-15);

  const auto big = oracle::random_panel(rng, 50, 6, 3);
  CHECK(oracle::max_abs(cross_section_means(big).x_bar - oracle::x_bar(big)) < 1e-13);
}

TEST_CASE("PanelDataset validation") {
  CHECK_THROWS_AS(PanelDataset(1, 3, Vector::Zero(3), Matrix::Zero(3, 1)), Error);
  CHECK_THROWS_AS(PanelDataset(2, 3, Vector::Zero(5), Matrix::Zero(6, 1)), Error);
  Vector y = Vector::Zero(6);
  y(2) = std::nan("");
  try {
    PanelDataset(2, 3, y, Matrix::Zero(6, 1));
    FAIL("accepted NaN");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingValue);
  }
}
