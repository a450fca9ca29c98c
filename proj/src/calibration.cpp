#include "magtrack/calibration.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace magtrack {

CoilCalibration fit_linear(std::span<const CalibrationPair> pairs) {
  const size_t n = pairs.size();
  if (n < 2)
    throw std::invalid_argument("linear fit needs at least two pairs");

  double sum_s = 0.0, sum_d = 0.0;
  for (const auto& p : pairs) {
    sum_s += p.strength;
    sum_d += p.distance_m;
  }
  const double mean_s = sum_s / n;
  const double mean_d = sum_d / n;

  double sxx = 0.0, sxd = 0.0, sdd = 0.0;
  for (const auto& p : pairs) {
    const double ds = p.strength - mean_s;
    const double dd = p.distance_m - mean_d;
    sxx += ds * ds;
    sxd += ds * dd;
    sdd += dd * dd;
  }
  if (sxx == 0.0)
    throw std::invalid_argument("linear fit is singular: all strengths equal");

  CoilCalibration fit;
  fit.a = sxd / sxx;
  fit.b = mean_d - fit.a * mean_s;

  double ss_res = 0.0;
  for (const auto& p : pairs) {
    const double r = p.distance_m - (fit.a * p.strength + fit.b);
    ss_res += r * r;
  }
  fit.residual_rms = std::sqrt(ss_res / n);
  fit.r2 = sdd > 0.0 ? 1.0 - ss_res / sdd : 1.0;
  return fit;
}

double estimate_distance(const CalibrationModel& model, int coil_id,
                         double strength) {
  const auto it = model.coils.find(coil_id);
  if (it == model.coils.end())
    throw std::out_of_range("no calibration for coil " +
                            std::to_string(coil_id));
  const double d = it->second.a * strength + it->second.b;
  return d < kMinEstimatedDistanceM ? kMinEstimatedDistanceM : d;
}

DistanceVector frame_to_distances(const CalibrationModel& model,
                                  const Frame& frame, uint32_t adc_max_code) {
  if (!frame.complete)
    throw std::invalid_argument("cannot convert an incomplete frame");
  DistanceVector out;
  const int n = static_cast<int>(frame.strengths.size());
  out.distances_m.resize(n);
  out.valid.resize(n);
  for (int i = 0; i < n; ++i) {
    out.distances_m[i] = estimate_distance(model, i, frame.strengths[i]);
    // Rail-pinned readings (saturated amplifier or signal under the floor)
    // are kept in the vector but excluded from solving.
    const bool railed = frame.strengths[i] <= 0.0 ||
                        frame.strengths[i] >= static_cast<double>(adc_max_code);
    out.valid[i] = !railed;
  }
  return out;
}

}  // namespace magtrack
