#include "magtrack/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace magtrack {

namespace {

void require_sorted(std::span<const double> ts, const char* what) {
  if (!std::is_sorted(ts.begin(), ts.end()))
    throw std::invalid_argument(std::string(what) + " stream is not timestamp-sorted");
}

double axis_value(const Vec3& v, int axis) {
  return axis == 0 ? v.x : (axis == 1 ? v.y : v.z);
}

}  // namespace

AlignmentResult align_streams(std::span<const PositionEstimate> estimates,
                              std::span<const TimedPoint> truth,
                              double tolerance_ms) {
  if (estimates.empty() || truth.empty())
    throw std::invalid_argument("cannot align empty streams");
  if (!(tolerance_ms > 0.0))
    throw std::invalid_argument("alignment tolerance must be positive");
  std::vector<double> et, tt;
  for (const auto& e : estimates) et.push_back(e.timestamp_ms);
  for (const auto& t : truth) tt.push_back(t.timestamp_ms);
  require_sorted(et, "estimate");
  require_sorted(tt, "truth");

  AlignmentResult out;
  size_t j = 0;
  for (const auto& e : estimates) {
    while (j + 1 < truth.size() &&
           std::abs(truth[j + 1].timestamp_ms - e.timestamp_ms) <=
               std::abs(truth[j].timestamp_ms - e.timestamp_ms))
      ++j;
    if (std::abs(truth[j].timestamp_ms - e.timestamp_ms) <= tolerance_ms) {
      out.pairs.push_back({e.timestamp_ms, e.position, truth[j].position});
    } else {
      ++out.dropped_estimates;
    }
  }
  if (out.pairs.empty())
    throw std::runtime_error("alignment failed: streams do not overlap in time");
  return out;
}

ErrorReport compute_errors(std::span<const AlignedPair> pairs,
                           const std::string& scenario_name) {
  if (pairs.empty()) throw std::invalid_argument("no aligned pairs");
  ErrorReport report;
  report.scenario = scenario_name;
  report.count = pairs.size();
  const double n = static_cast<double>(pairs.size());
  for (int axis = 0; axis < 3; ++axis) {
    double sum = 0.0;
    for (const auto& p : pairs)
      sum += std::abs(axis_value(p.estimate, axis) - axis_value(p.truth, axis));
    const double mae = sum / n;
    double ss = 0.0;
    for (const auto& p : pairs) {
      const double e =
          std::abs(axis_value(p.estimate, axis) - axis_value(p.truth, axis));
      ss += (e - mae) * (e - mae);
    }
    const double sd = pairs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    if (axis == 0) report.mae_m.x = mae, report.std_m.x = sd;
    if (axis == 1) report.mae_m.y = mae, report.std_m.y = sd;
    if (axis == 2) report.mae_m.z = mae, report.std_m.z = sd;
  }
  return report;
}

std::string reports_to_csv(std::span<const ErrorReport> reports) {
  std::string out = "scenario,axis,mae_m,std_m,n\n";
  char line[256];
  for (const auto& r : reports) {
    const char* axes[3] = {"x", "y", "z"};
    const double mae[3] = {r.mae_m.x, r.mae_m.y, r.mae_m.z};
    const double sd[3] = {r.std_m.x, r.std_m.y, r.std_m.z};
    for (int a = 0; a < 3; ++a) {
      std::snprintf(line, sizeof line, "%s,%s,%.6f,%.6f,%zu\n",
                    r.scenario.c_str(), axes[a], mae[a], sd[a], r.count);
      out += line;
    }
  }
  return out;
}

std::vector<ErrorReport> reports_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != "scenario,axis,mae_m,std_m,n")
    throw std::runtime_error("bad report CSV header");
  std::vector<ErrorReport> out;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string scenario, axis, mae_s, std_s, n_s;
    if (!std::getline(ls, scenario, ',') || !std::getline(ls, axis, ',') ||
        !std::getline(ls, mae_s, ',') || !std::getline(ls, std_s, ',') ||
        !std::getline(ls, n_s))
      throw std::runtime_error("report CSV parse error at line " +
                               std::to_string(line_no));
    // A report's rows arrive as x, y, z; the x row opens a new report.
    if (axis == "x") out.push_back({scenario, {}, {}, 0});
    if (out.empty() || out.back().scenario != scenario)
      throw std::runtime_error("report CSV rows out of order at line " +
                               std::to_string(line_no));
    ErrorReport& r = out.back();
    const double mae = std::stod(mae_s);
    const double sd = std::stod(std_s);
    r.count = static_cast<size_t>(std::stoull(n_s));
    if (axis == "x") r.mae_m.x = mae, r.std_m.x = sd;
    else if (axis == "y") r.mae_m.y = mae, r.std_m.y = sd;
    else if (axis == "z") r.mae_m.z = mae, r.std_m.z = sd;
    else
      throw std::runtime_error("report CSV unknown axis at line " +
                               std::to_string(line_no));
  }
  return out;
}

std::string reports_to_json(std::span<const ErrorReport> reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    arr.push_back({{"scenario", r.scenario},
                   {"mae_m", {r.mae_m.x, r.mae_m.y, r.mae_m.z}},
                   {"std_m", {r.std_m.x, r.std_m.y, r.std_m.z}},
                   {"n", r.count}});
  }
  return arr.dump(2) + "\n";
}

std::vector<ErrorReport> reports_from_json(const std::string& json_text) {
  const auto arr = nlohmann::json::parse(json_text);
  std::vector<ErrorReport> out;
  for (const auto& j : arr) {
    ErrorReport r;
    r.scenario = j.at("scenario").get<std::string>();
    const auto& mae = j.at("mae_m");
    const auto& sd = j.at("std_m");
    r.mae_m = {mae.at(0), mae.at(1), mae.at(2)};
    r.std_m = {sd.at(0), sd.at(1), sd.at(2)};
    r.count = j.at("n").get<size_t>();
    out.push_back(r);
  }
  return out;
}

}  // namespace magtrack
