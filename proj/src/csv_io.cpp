#include "magtrack/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace magtrack {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void expect_header(std::ifstream& in, const std::filesystem::path& path,
                   const std::string& expected) {
  std::string line;
  if (!std::getline(in, line) || line != expected)
    throw ParseError(path.string(), 1, "expected header '" + expected + "'");
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::istringstream ls(line);
  while (std::getline(ls, cur, ',')) fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, const std::filesystem::path& path,
                    size_t line) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(path.string(), line, "bad number '" + s + "'");
  }
}

long parse_long(const std::string& s, const std::filesystem::path& path,
                size_t line) {
  try {
    size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(path.string(), line, "bad integer '" + s + "'");
  }
}

}  // namespace

void write_samples_csv(const std::filesystem::path& path,
                       std::span<const RawSample> samples) {
  auto out = open_out(path);
  out << "timestamp_ms,coil_id,strength\n";
  char line[96];
  for (const auto& s : samples) {
    std::snprintf(line, sizeof line, "%.3f,%d,%u\n", s.timestamp_ms, s.coil_id,
                  s.strength);
    out << line;
  }
}

std::vector<RawSample> read_samples_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  expect_header(in, path, "timestamp_ms,coil_id,strength");
  std::vector<RawSample> samples;
  std::string line;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 3)
      throw ParseError(path.string(), line_no, "expected 3 fields");
    RawSample s;
    s.timestamp_ms = parse_double(f[0], path, line_no);
    s.coil_id = static_cast<int>(parse_long(f[1], path, line_no));
    const long strength = parse_long(f[2], path, line_no);
    if (strength < 0)
      throw ParseError(path.string(), line_no, "negative strength");
    s.strength = static_cast<uint32_t>(strength);
    samples.push_back(s);
  }
  return samples;
}

void write_truth_csv(const std::filesystem::path& path,
                     std::span<const TimedPoint> truth) {
  auto out = open_out(path);
  out << "timestamp_ms,x_m,y_m,z_m\n";
  char line[128];
  for (const auto& t : truth) {
    std::snprintf(line, sizeof line, "%.3f,%.6f,%.6f,%.6f\n", t.timestamp_ms,
                  t.position.x, t.position.y, t.position.z);
    out << line;
  }
}

std::vector<TimedPoint> read_truth_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  expect_header(in, path, "timestamp_ms,x_m,y_m,z_m");
  std::vector<TimedPoint> truth;
  std::string line;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 4)
      throw ParseError(path.string(), line_no, "expected 4 fields");
    truth.push_back({parse_double(f[0], path, line_no),
                     {parse_double(f[1], path, line_no),
                      parse_double(f[2], path, line_no),
                      parse_double(f[3], path, line_no)}});
  }
  return truth;
}

void write_estimates_csv(const std::filesystem::path& path,
                         std::span<const PositionEstimate> estimates) {
  auto out = open_out(path);
  out << "timestamp_ms,x_m,y_m,z_m,residual_rms_m,converged\n";
  char line[192];
  for (const auto& e : estimates) {
    std::snprintf(line, sizeof line, "%.3f,%.6f,%.6f,%.6f,%.6f,%d\n",
                  e.timestamp_ms, e.position.x, e.position.y, e.position.z,
                  e.residual_rms_m, e.converged ? 1 : 0);
    out << line;
  }
}

std::vector<PositionEstimate> read_estimates_csv(
    const std::filesystem::path& path) {
  auto in = open_in(path);
  expect_header(in, path, "timestamp_ms,x_m,y_m,z_m,residual_rms_m,converged");
  std::vector<PositionEstimate> estimates;
  std::string line;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 6)
      throw ParseError(path.string(), line_no, "expected 6 fields");
    PositionEstimate e;
    e.timestamp_ms = parse_double(f[0], path, line_no);
    e.position = {parse_double(f[1], path, line_no),
                  parse_double(f[2], path, line_no),
                  parse_double(f[3], path, line_no)};
    e.residual_rms_m = parse_double(f[4], path, line_no);
    e.converged = parse_long(f[5], path, line_no) != 0;
    estimates.push_back(e);
  }
  return estimates;
}

void write_calibration_pairs_csv(
    const std::filesystem::path& path,
    const std::map<int, std::vector<CalibrationPair>>& pairs_by_coil) {
  auto out = open_out(path);
  out << "coil_id,strength,distance_m\n";
  char line[96];
  for (const auto& [coil_id, pairs] : pairs_by_coil) {
    for (const auto& p : pairs) {
      std::snprintf(line, sizeof line, "%d,%.3f,%.6f\n", coil_id, p.strength,
                    p.distance_m);
      out << line;
    }
  }
}

std::map<int, std::vector<CalibrationPair>> read_calibration_pairs_csv(
    const std::filesystem::path& path) {
  auto in = open_in(path);
  expect_header(in, path, "coil_id,strength,distance_m");
  std::map<int, std::vector<CalibrationPair>> pairs;
  std::string line;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 3)
      throw ParseError(path.string(), line_no, "expected 3 fields");
    const int coil_id = static_cast<int>(parse_long(f[0], path, line_no));
    pairs[coil_id].push_back({parse_double(f[1], path, line_no),
                              parse_double(f[2], path, line_no)});
  }
  return pairs;
}

void write_calibration_json(const std::filesystem::path& path,
                            const CalibrationModel& model) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [coil_id, fit] : model.coils) {
    doc[std::to_string(coil_id)] = {
        {"a", fit.a}, {"b", fit.b}, {"rms", fit.residual_rms}, {"r2", fit.r2}};
  }
  auto out = open_out(path);
  out << doc.dump(2) << "\n";
}

CalibrationModel read_calibration_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  CalibrationModel model;
  for (const auto& [key, value] : doc.items()) {
    CoilCalibration fit;
    fit.a = value.at("a").get<double>();
    fit.b = value.at("b").get<double>();
    fit.residual_rms = value.at("rms").get<double>();
    fit.r2 = value.at("r2").get<double>();
    model.coils[std::stoi(key)] = fit;
  }
  return model;
}

void write_scenario_json(const std::filesystem::path& path, const Scenario& s) {
  nlohmann::json doc;
  doc["name"] = s.name;
  doc["coil"] = {{"turns", s.coil.turns},
                 {"radius_m", s.coil.radius_m},
                 {"current_a", s.coil.current_a},
                 {"drive_frequency_hz", s.coil.drive_frequency_hz}};
  doc["transmitters"] = nlohmann::json::array();
  for (const auto& t : s.transmitters) {
    const Vec3 n = t.normal();
    doc["transmitters"].push_back(
        {{"position", {t.position.x, t.position.y, t.position.z}},
         {"normal", {n.x, n.y, n.z}}});
  }
  doc["workspace"] = {{"lo", {s.workspace.lo.x, s.workspace.lo.y, s.workspace.lo.z}},
                      {"hi", {s.workspace.hi.x, s.workspace.hi.y, s.workspace.hi.z}}};
  doc["truth_noise_sigma_m"] = s.truth_noise_sigma_m;
  doc["truth_rate_hz"] = s.truth_rate_hz;
  auto out = open_out(path);
  out << doc.dump(2) << "\n";
}

Scenario read_scenario_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  Scenario s;
  try {
    s.name = doc.at("name").get<std::string>();
    const auto& coil = doc.at("coil");
    s.coil.turns = coil.at("turns").get<int>();
    s.coil.radius_m = coil.at("radius_m").get<double>();
    s.coil.current_a = coil.at("current_a").get<double>();
    s.coil.drive_frequency_hz = coil.at("drive_frequency_hz").get<double>();
    for (const auto& t : doc.at("transmitters")) {
      const auto& p = t.at("position");
      const auto& n = t.at("normal");
      Pose pose;
      pose.position = {p.at(0), p.at(1), p.at(2)};
      pose.orientation =
          Quat::from_two_vectors(Vec3{0, 0, 1}, Vec3{n.at(0), n.at(1), n.at(2)});
      s.transmitters.push_back(pose);
    }
    const auto& ws = doc.at("workspace");
    s.workspace.lo = {ws.at("lo").at(0), ws.at("lo").at(1), ws.at("lo").at(2)};
    s.workspace.hi = {ws.at("hi").at(0), ws.at("hi").at(1), ws.at("hi").at(2)};
    s.truth_noise_sigma_m = doc.value("truth_noise_sigma_m", 0.02);
    s.truth_rate_hz = doc.value("truth_rate_hz", 100.0);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  s.validate();
  return s;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace magtrack
