#include <doctest.h>

#include <algorithm>
#include <random>

#include "magtrack/evaluation.hpp"

using namespace magtrack;

namespace {

PositionEstimate est_at(double t, const Vec3& p) {
  PositionEstimate e;
  e.timestamp_ms = t;
  e.position = p;
  e.converged = true;
  return e;
}

}  // namespace

TEST_CASE("identical timestamps match completely") {
  std::vector<PositionEstimate> est;
  std::vector<TimedPoint> truth;
  for (int i = 0; i < 10; ++i) {
    est.push_back(est_at(i * 100.0, {0.1 * i, 0, 0}));
    truth.push_back({i * 100.0, {0.1 * i, 0, 0}});
  }
  const auto r = align_streams(est, truth, 50.0);
  CHECK(r.pairs.size() == 10);
  CHECK(r.dropped_estimates == 0);
}

TEST_CASE("dense truth matches every estimate within half its period") {
  std::vector<PositionEstimate> est;
  std::vector<TimedPoint> truth;
  for (int i = 0; i < 1000; ++i) truth.push_back({i * 10.0, {0, 0, 0}});  // 100 Hz
  for (int i = 0; i < 23; ++i) est.push_back(est_at(17.0 + i * 420.0, {0, 0, 0}));
  const auto r = align_streams(est, truth, 210.0);
  CHECK(r.pairs.size() == est.size());
  for (size_t i = 0; i < est.size(); ++i)
    CHECK(std::abs(r.pairs[i].timestamp_ms -
                   std::round(r.pairs[i].timestamp_ms / 10.0) * 10.0) <= 5.0);
}

TEST_CASE("disjoint streams refuse to align") {
  std::vector<PositionEstimate> est{est_at(0.0, {}), est_at(100.0, {})};
  std::vector<TimedPoint> truth{{10'000.0, {}}, {10'100.0, {}}};
  CHECK_THROWS_AS(align_streams(est, truth, 210.0), std::runtime_error);
}

TEST_CASE("perfect estimates give an all-zero report") {
  std::vector<AlignedPair> pairs;
  for (int i = 0; i < 5; ++i)
    pairs.push_back({i * 1.0, {0.1 * i, -0.2, 0.5}, {0.1 * i, -0.2, 0.5}});
  const auto r = compute_errors(pairs, "self");
  CHECK(r.mae_m.x == 0.0);
  CHECK(r.mae_m.y == 0.0);
  CHECK(r.mae_m.z == 0.0);
  CHECK(r.std_m.x == 0.0);
  CHECK(r.count == 5);
  CHECK(r.scenario == "self");
}

TEST_CASE("hand-computed two-pair report: MAE 0.05, sample std 0.0707") {
  std::vector<AlignedPair> pairs;
  pairs.push_back({0.0, {0.0, 0, 0}, {0.0, 0, 0}});
  pairs.push_back({1.0, {0.1, 0, 0}, {0.0, 0, 0}});
  const auto r = compute_errors(pairs);
  CHECK(r.mae_m.x == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(r.std_m.x == doctest::Approx(0.070710678118654752).epsilon(1e-12));
}

TEST_CASE("error reports are permutation invariant") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0.0, 0.1);
  std::vector<AlignedPair> pairs;
  for (int i = 0; i < 200; ++i)
    pairs.push_back({i * 1.0, {g(rng), g(rng), g(rng)}, {0, 0, 0}});
  auto shuffled = pairs;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto a = compute_errors(pairs);
  const auto b = compute_errors(shuffled);
  CHECK(a.mae_m.x == doctest::Approx(b.mae_m.x).epsilon(1e-12));
  CHECK(a.std_m.z == doctest::Approx(b.std_m.z).epsilon(1e-12));
}

TEST_CASE("scaling all errors scales MAE and Std linearly") {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> g(0.0, 0.05);
  std::vector<AlignedPair> base, scaled;
  const double c = 3.7;
  for (int i = 0; i < 150; ++i) {
    const Vec3 err{g(rng), g(rng), g(rng)};
    const Vec3 truth{0.3, 0.4, 0.5};
    base.push_back({i * 1.0, truth + err, truth});
    scaled.push_back({i * 1.0, truth + c * err, truth});
  }
  const auto a = compute_errors(base);
  const auto b = compute_errors(scaled);
  CHECK(b.mae_m.x == doctest::Approx(c * a.mae_m.x).epsilon(1e-12));
  CHECK(b.mae_m.y == doctest::Approx(c * a.mae_m.y).epsilon(1e-12));
  CHECK(b.std_m.z == doctest::Approx(c * a.std_m.z).epsilon(1e-12));
}

TEST_CASE("empty inputs are errors") {
  CHECK_THROWS_AS(compute_errors({}), std::invalid_argument);
}

TEST_CASE("report CSV: exact header, one row per scenario and axis") {
  std::vector<ErrorReport> reports;
  reports.push_back({"whiteboard", {0.082, 0.086, 0.097}, {0.062, 0.059, 0.087}, 1200});
  reports.push_back({"waist_v3", {0.116, 0.204, 0.310}, {0.099, 0.131, 0.181}, 900});
  const std::string csv = reports_to_csv(reports);
  CHECK(csv.rfind("scenario,axis,mae_m,std_m,n\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);  // header + 2*3 rows

  const auto parsed = reports_from_csv(csv);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].scenario == "whiteboard");
  CHECK(parsed[0].mae_m.y == doctest::Approx(0.086).epsilon(1e-9));
  CHECK(parsed[1].std_m.z == doctest::Approx(0.181).epsilon(1e-9));
  CHECK(parsed[1].count == 900);
}

TEST_CASE("report JSON round-trips") {
  std::vector<ErrorReport> reports;
  reports.push_back({"table", {0.088, 0.076, 0.082}, {0.077, 0.059, 0.068}, 450});
  const auto parsed = reports_from_json(reports_to_json(reports));
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0].scenario == "table");
  CHECK(parsed[0].mae_m.x == reports[0].mae_m.x);
  CHECK(parsed[0].std_m.y == reports[0].std_m.y);
  CHECK(parsed[0].count == 450);
}
