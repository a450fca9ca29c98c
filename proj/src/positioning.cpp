#include "magtrack/positioning.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace magtrack {

namespace {

Eigen::MatrixXd centered_positions(const BeaconSet& set) {
  const Vec3 c = set.centroid();
  Eigen::MatrixXd m(set.beacons.size(), 3);
  for (size_t i = 0; i < set.beacons.size(); ++i) {
    const Vec3 d = set.beacons[i].position - c;
    m(i, 0) = d.x;
    m(i, 1) = d.y;
    m(i, 2) = d.z;
  }
  return m;
}

double objective(const BeaconSet& set, const DistanceVector& distances,
                 const Eigen::Vector3d& p) {
  double f = 0.0;
  for (size_t i = 0; i < set.beacons.size(); ++i) {
    if (!distances.valid[i]) continue;
    const Vec3& b = set.beacons[i].position;
    const double r = (p - Eigen::Vector3d(b.x, b.y, b.z)).norm() -
                     distances.distances_m[i];
    f += r * r;
  }
  return f;
}

// Residuals r_i = |p - p_i| - d_i with unit-bearing Jacobian rows. A query
// point exactly on a beacon has no bearing; it is nudged off axis.
void linearize(const BeaconSet& set, const DistanceVector& distances,
               const Eigen::Vector3d& p, Eigen::MatrixXd& jac,
               Eigen::VectorXd& res) {
  size_t row = 0;
  for (size_t i = 0; i < set.beacons.size(); ++i) {
    if (!distances.valid[i]) continue;
    const Vec3& b = set.beacons[i].position;
    Eigen::Vector3d diff = p - Eigen::Vector3d(b.x, b.y, b.z);
    double norm = diff.norm();
    if (norm < 1e-12) {
      diff = Eigen::Vector3d(1e-9, 0.0, 0.0);
      norm = 1e-9;
    }
    res(row) = norm - distances.distances_m[i];
    jac.row(row) = (diff / norm).transpose();
    ++row;
  }
}

}  // namespace

Vec3 BeaconSet::centroid() const {
  if (beacons.empty()) throw std::invalid_argument("empty beacon set");
  Vec3 c;
  for (const auto& b : beacons) c += b.position;
  return c / static_cast<double>(beacons.size());
}

double BeaconSet::non_coplanarity() const {
  if (beacons.size() < 4) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered_positions(*this));
  return svd.singularValues().minCoeff();
}

bool BeaconSet::degenerate(double threshold_ratio) const {
  if (beacons.size() < 4) return true;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered_positions(*this));
  const auto& sv = svd.singularValues();
  return sv.minCoeff() < threshold_ratio * sv.maxCoeff();
}

namespace {

PositionEstimate damped_gauss_newton(const BeaconSet& beacons,
                                     const DistanceVector& distances,
                                     const Vec3& initial_guess,
                                     const SolverOptions& options) {
  const size_t n_valid = distances.valid_count();
  PositionEstimate est;

  Eigen::Vector3d p(initial_guess.x, initial_guess.y, initial_guess.z);
  double f = objective(beacons, distances, p);
  double lambda = options.initial_damping;
  Eigen::MatrixXd jac(n_valid, 3);
  Eigen::VectorXd res(n_valid);

  int it = 0;
  for (; it < options.max_iterations; ++it) {
    linearize(beacons, distances, p, jac, res);
    const Eigen::Vector3d grad = 2.0 * jac.transpose() * res;
    if (grad.norm() < options.gradient_tol) {
      est.converged = true;
      break;
    }
    const Eigen::Matrix3d hess = jac.transpose() * jac;

    bool accepted = false;
    for (int tries = 0; tries < 32 && !accepted; ++tries) {
      const Eigen::Matrix3d damped = hess + lambda * Eigen::Matrix3d::Identity();
      const Eigen::Vector3d step = damped.ldlt().solve(-0.5 * grad);
      if (step.norm() < options.step_tol_m) {
        // Below this scale the objective change is under double rounding, so
        // an f-improvement test would stall; the step criterion stands alone.
        est.converged = true;
        accepted = true;
        break;
      }
      const Eigen::Vector3d cand = p + step;
      const double f_cand = objective(beacons, distances, cand);
      if (f_cand <= f) {
        p = cand;
        f = f_cand;
        lambda = std::max(lambda * 0.3, 1e-12);
        accepted = true;
      } else {
        lambda *= 4.0;
      }
    }
    if (!accepted || est.converged) {
      // Either no damping level improves the objective (stationary point of a
      // possibly non-smooth residual) or the step has collapsed.
      ++it;
      break;
    }
  }

  est.position = Vec3{p.x(), p.y(), p.z()};
  est.iterations = it;
  est.residual_rms_m = std::sqrt(f / static_cast<double>(n_valid));
  if (!est.converged) {
    linearize(beacons, distances, p, jac, res);
    if ((2.0 * jac.transpose() * res).norm() < options.gradient_tol)
      est.converged = true;
  }
  return est;
}

}  // namespace

PositionEstimate multilaterate(const BeaconSet& beacons,
                               const DistanceVector& distances,
                               const Vec3& initial_guess,
                               const SolverOptions& options) {
  if (beacons.size() != distances.distances_m.size() ||
      beacons.size() != distances.valid.size())
    throw std::invalid_argument("beacon/distance size mismatch");
  if (distances.valid_count() < 4)
    throw std::invalid_argument("multilateration needs >= 4 valid distances");
  for (size_t i = 0; i < beacons.size(); ++i)
    if (distances.valid[i] && !(distances.distances_m[i] > 0.0))
      throw std::invalid_argument("valid distances must be positive");

  PositionEstimate est =
      damped_gauss_newton(beacons, distances, initial_guess, options);

  if (options.multistart_residual_m > 0.0 &&
      est.residual_rms_m > options.multistart_residual_m) {
    // A residual this large usually means a local minimum away from the range
    // surfaces; rerun from spread-out starts and keep the best objective.
    Vec3 lo = beacons.beacons.front().position;
    Vec3 hi = lo;
    for (const auto& b : beacons.beacons) {
      lo = {std::min(lo.x, b.position.x), std::min(lo.y, b.position.y),
            std::min(lo.z, b.position.z)};
      hi = {std::max(hi.x, b.position.x), std::max(hi.y, b.position.y),
            std::max(hi.z, b.position.z)};
    }
    const Vec3 pad = 0.5 * (hi - lo) + Vec3{0.2, 0.2, 0.2};
    std::vector<Vec3> starts{beacons.centroid()};
    for (int corner = 0; corner < 8; ++corner)
      starts.push_back({corner & 1 ? hi.x + pad.x : lo.x - pad.x,
                        corner & 2 ? hi.y + pad.y : lo.y - pad.y,
                        corner & 4 ? hi.z + pad.z : lo.z - pad.z});
    for (const Vec3& start : starts) {
      const PositionEstimate alt =
          damped_gauss_newton(beacons, distances, start, options);
      if (alt.residual_rms_m < est.residual_rms_m) est = alt;
    }
  }

  est.geometry_warning = beacons.degenerate();
  est.outlier = est.residual_rms_m > 0.5;
  return est;
}

std::vector<PositionEstimate> solve_stream(
    const BeaconSet& beacons,
    std::span<const std::pair<double, DistanceVector>> frames,
    const SolverOptions& options) {
  std::vector<PositionEstimate> out;
  out.reserve(frames.size());
  const Vec3 centroid = beacons.centroid();
  Vec3 guess = centroid;
  for (const auto& [timestamp, distances] : frames) {
    PositionEstimate est;
    try {
      est = multilaterate(beacons, distances, guess, options);
    } catch (const std::exception&) {
      est.position = guess;
      est.converged = false;
      est.residual_rms_m = std::numeric_limits<double>::quiet_NaN();
    }
    est.timestamp_ms = timestamp;
    if (est.converged) guess = est.position;
    out.push_back(est);
  }
  return out;
}

std::vector<PositionEstimate> smooth_trajectory(
    std::span<const PositionEstimate> estimates, int window) {
  if (window < 1) throw std::invalid_argument("smoothing window must be >= 1");
  std::vector<PositionEstimate> out(estimates.begin(), estimates.end());
  const int n = static_cast<int>(estimates.size());
  const int half = (window - 1) / 2;
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    Vec3 acc;
    for (int j = lo; j <= hi; ++j) acc += estimates[j].position;
    out[i].position = acc / static_cast<double>(hi - lo + 1);
  }
  return out;
}

DilutionReport geometry_quality(const BeaconSet& beacons, const Aabb& region,
                                int grid_per_axis) {
  if (beacons.size() < 4)
    throw std::invalid_argument("geometry study needs >= 4 beacons");
  if (region.empty()) throw std::invalid_argument("empty study region");
  if (grid_per_axis < 1) throw std::invalid_argument("grid must be >= 1");

  DilutionReport report;
  report.degenerate = beacons.degenerate();
  Vec3 sum, peak;
  size_t count = 0;
  const Vec3 ext = region.extent();
  const auto frac = [&](int i) {
    return grid_per_axis == 1 ? 0.5
                              : static_cast<double>(i) / (grid_per_axis - 1);
  };
  for (int ix = 0; ix < grid_per_axis; ++ix) {
    for (int iy = 0; iy < grid_per_axis; ++iy) {
      for (int iz = 0; iz < grid_per_axis; ++iz) {
        const Vec3 p{region.lo.x + frac(ix) * ext.x,
                     region.lo.y + frac(iy) * ext.y,
                     region.lo.z + frac(iz) * ext.z};
        Eigen::MatrixXd jac(beacons.size(), 3);
        for (size_t i = 0; i < beacons.size(); ++i) {
          Eigen::Vector3d diff(p.x - beacons.beacons[i].position.x,
                               p.y - beacons.beacons[i].position.y,
                               p.z - beacons.beacons[i].position.z);
          const double norm = diff.norm();
          if (norm < 1e-9) {
            jac.row(i).setZero();
            continue;
          }
          jac.row(i) = (diff / norm).transpose();
        }
        const Eigen::Matrix3d info = jac.transpose() * jac;
        const Eigen::FullPivLU<Eigen::Matrix3d> lu(info);
        Vec3 amp;
        if (!lu.isInvertible()) {
          const double inf = std::numeric_limits<double>::infinity();
          amp = {inf, inf, inf};
          report.degenerate = true;
        } else {
          const Eigen::Matrix3d cov = lu.inverse();
          amp = {std::sqrt(std::max(cov(0, 0), 0.0)),
                 std::sqrt(std::max(cov(1, 1), 0.0)),
                 std::sqrt(std::max(cov(2, 2), 0.0))};
        }
        sum += amp;
        peak.x = std::max(peak.x, amp.x);
        peak.y = std::max(peak.y, amp.y);
        peak.z = std::max(peak.z, amp.z);
        ++count;
      }
    }
  }
  report.mean_amplification = sum / static_cast<double>(count);
  report.max_amplification = peak;
  return report;
}

}  // namespace magtrack
