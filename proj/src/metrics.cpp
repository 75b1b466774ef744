#include "binpose/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace binpose {

namespace {
constexpr double kRadToDeg = 57.295779513082320876798154814105;
}

double translation_error(const Vec3& t_hat, const Vec3& t) {
  return (t_hat - t).norm();
}

double rotation_error(const RotationMatrix& r_hat, const RotationMatrix& r) {
  if (!is_rotation(r_hat, 1e-6) || !is_rotation(r, 1e-6))
    throw InvalidRotation("input is not a rotation matrix");
  const double trace = (r_hat * r.transpose()).trace();
  const double c = std::clamp((trace - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c) * kRadToDeg;
}

double rotation_error_z_symmetric(const RotationMatrix& r_hat,
                                  const RotationMatrix& r) {
  return std::min(rotation_error(r_hat, r),
                  rotation_error(r_hat, RotationMatrix(r * z_flip())));
}

EvalReport evaluate_set(std::span<const Pose> predictions,
                        std::span<const Pose> ground_truths,
                        bool symmetry_aware) {
  if (predictions.size() != ground_truths.size())
    throw LengthMismatch(std::to_string(predictions.size()) +
                         " predictions vs " +
                         std::to_string(ground_truths.size()) +
                         " ground truths");
  if (predictions.empty()) throw EmptySet("no samples to evaluate");

  EvalReport report;
  report.count = predictions.size();
  report.symmetry_aware = symmetry_aware;
  report.samples.reserve(predictions.size());

  double te_sum = 0.0, re_sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    PoseError e;
    e.te_m = translation_error(predictions[i].translation,
                               ground_truths[i].translation);
    e.re_deg = symmetry_aware
                   ? rotation_error_z_symmetric(predictions[i].rotation,
                                                ground_truths[i].rotation)
                   : rotation_error(predictions[i].rotation,
                                    ground_truths[i].rotation);
    te_sum += e.te_m;
    re_sum += e.re_deg;
    report.samples.push_back(e);
  }
  const double n = static_cast<double>(report.count);
  report.mean_te_cm = 100.0 * te_sum / n;
  report.mean_re_deg = re_sum / n;
  return report;
}

}  // namespace binpose
