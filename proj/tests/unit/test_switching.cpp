#include <doctest.h>

#include <filesystem>
#include <limits>

#include "race/switching.hpp"

using namespace race;

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

TEST_CASE("select_scheme region lookup") {
  const SwitchTable table({{kNegInf, StagePlan({4, 2})}, {10.0, StagePlan({2, 2, 2})}});
  CHECK(select_scheme(table, 12.0) == StagePlan({2, 2, 2}));
  CHECK(select_scheme(table, 10.0) == StagePlan({2, 2, 2}));
  CHECK(select_scheme(table, 5.0) == StagePlan({4, 2}));

  const SwitchTable single({{3.0, StagePlan({2, 2, 2})}});
  CHECK(select_scheme(single, -50.0) == StagePlan({2, 2, 2}));
  CHECK(select_scheme(single, 50.0) == StagePlan({2, 2, 2}));

  // Below every threshold: the most expensive plan.
  const std::vector<SwitchEntry> finite{{0.0, StagePlan({2, 2, 2})}, {5.0, StagePlan({4, 2})}, {9.0, StagePlan({2, 4})}};
  CHECK(select_scheme(finite, -1.0) == StagePlan({4, 2}));
  CHECK_THROWS_AS(select_scheme(std::vector<SwitchEntry>{}, 0.0), std::invalid_argument);
}

TEST_CASE("switch table validation and JSON form") {
  CHECK_THROWS_AS(SwitchTable({}), std::invalid_argument);
  CHECK_THROWS_AS(SwitchTable({{5.0, StagePlan({4, 2})}, {5.0, StagePlan({2, 2, 2})}}), std::invalid_argument);
  CHECK_THROWS_AS(SwitchTable({{5.0, StagePlan({4, 2})}, {1.0, StagePlan({2, 2, 2})}}), std::invalid_argument);

  const SwitchTable table({{kNegInf, StagePlan({16, 2, 2})}, {7.5, StagePlan({4, 2, 2, 2, 2})}, {15.0, StagePlan::uniform(2, 64)}});
  const nlohmann::json doc = table.to_json();
  CHECK(doc[0]["snr_db"].is_null());
  CHECK(doc[1]["snr_db"] == 7.5);
  CHECK(doc[2]["k_vector"] == nlohmann::json::array({2, 2, 2, 2, 2, 2}));
  const SwitchTable back = SwitchTable::from_json(doc);
  REQUIRE(back.entries().size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.entries()[i].snr_threshold_db == table.entries()[i].snr_threshold_db);
    CHECK(back.entries()[i].plan == table.entries()[i].plan);
  }
  CHECK_THROWS(SwitchTable::from_json(nlohmann::json::object()));
  CHECK_THROWS(SwitchTable::from_json(nlohmann::json::parse(R"([{"snr_db": 0, "k_vector": [3, 1]}])")));

  const auto path = std::filesystem::temp_directory_path() / "race_switch_table_test.json";
  table.save(path);
  CHECK(SwitchTable::load(path).entries().size() == 3);
  std::filesystem::remove(path);
}

TEST_CASE("calibration rejects meaningless requests") {
  CalibrationRequest req;
  req.candidates = {StagePlan::uniform(2, 16)};
  req.snr_grid_db = {0.0};
  req.trials = 99;
  CHECK_THROWS_AS(calibrate_switch_table(req), std::invalid_argument);
  req.trials = 100;
  req.candidates = {StagePlan({4, 4}), StagePlan::uniform(2, 16)};
  CHECK_THROWS_AS(calibrate_switch_table(req), std::invalid_argument);  // not sorted by M_T
}

TEST_CASE("calibration picks the cheapest adequate plan, else the most accurate") {
  CalibrationRequest req;
  req.candidates = {StagePlan::uniform(2, 64), StagePlan({4, 4, 4}, 64)};
  req.snr_grid_db = {-10.0, 30.0};
  req.gamma = 1e-2;
  req.trials = 400;
  req.seed = 17;
  std::vector<CalibrationPoint> points;
  const SwitchTable table = calibrate_switch_table(req, &points);
  REQUIRE(points.size() == 2);

  // -10 dB: neither plan meets gamma; the lower-PEE plan wins.
  CHECK(points[0].pee[0] > req.gamma);
  CHECK(points[0].pee[1] > req.gamma);
  CHECK(points[0].pee[1] < points[0].pee[0]);
  CHECK(points[0].selected == 1);
  // 30 dB: both well below gamma; cheapest wins.
  CHECK(points[1].pee[0] <= req.gamma);
  CHECK(points[1].selected == 0);

  REQUIRE(table.entries().size() == 2);
  CHECK(std::isinf(table.entries()[0].snr_threshold_db));
  CHECK(table.entries()[0].plan == StagePlan({4, 4, 4}, 64));
  CHECK(table.entries()[1].snr_threshold_db == 30.0);
  CHECK(table.entries()[1].plan == StagePlan::uniform(2, 64));

  // Deterministic for a fixed seed and independent of the worker count.
  req.workers = 3;
  std::vector<CalibrationPoint> again;
  calibrate_switch_table(req, &again);
  for (std::size_t g = 0; g < 2; ++g) CHECK(again[g].pee == points[g].pee);
}
