#include "wnac/chen.hpp"

#include <cmath>
#include <string>

namespace wnac {

std::string_view to_string(FeedbackVariant v) {
  switch (v) {
    case FeedbackVariant::Full31: return "full31";
    case FeedbackVariant::Weak32: return "weak32";
    case FeedbackVariant::Weaker34: return "weaker34";
    case FeedbackVariant::Zero: return "zero";
  }
  return "unknown";
}

FeedbackVariant parse_feedback_variant(std::string_view name) {
  if (name == "full31") return FeedbackVariant::Full31;
  if (name == "weak32") return FeedbackVariant::Weak32;
  if (name == "weaker34") return FeedbackVariant::Weaker34;
  if (name == "zero") return FeedbackVariant::Zero;
  throw ValidationError("unknown feedback variant '" + std::string(name) +
                        "' (expected full31, weak32, weaker34 or zero)");
}

std::string_view to_string(PerturbationSign s) { return s == PerturbationSign::Plus ? "+" : "-"; }

PerturbationSign parse_perturbation_sign(std::string_view name) {
  if (name == "+" || name == "plus") return PerturbationSign::Plus;
  if (name == "-" || name == "minus") return PerturbationSign::Minus;
  throw ValidationError("unknown perturbation sign '" + std::string(name) + "' (expected + or -)");
}

std::string_view to_string(DriftForm f) {
  return f == DriftForm::Compositional ? "compositional" : "expanded33";
}

DriftForm parse_drift_form(std::string_view name) {
  if (name == "compositional") return DriftForm::Compositional;
  if (name == "expanded33") return DriftForm::Expanded33;
  throw ValidationError("unknown drift form '" + std::string(name) +
                        "' (expected compositional or expanded33)");
}

void ClosedLoopSpec::validate() const {
  if (!std::isfinite(params.a) || !std::isfinite(params.b) || !std::isfinite(params.c)) {
    throw ValidationError("closed loop: Chen parameters must be finite");
  }
  if (!sigma_c.allFinite() || (sigma_c.array() < 0.0).any()) {
    throw ValidationError("closed loop: sigma_c must be finite and nonnegative");
  }
  disturbance.validate();
  if (disturbance.channels() != 3) {
    throw ValidationError("closed loop: the Chen system takes exactly 3 disturbance channels");
  }
  if (form == DriftForm::Expanded33) {
    if (variant != FeedbackVariant::Weak32) {
      throw ValidationError("closed loop: the expanded33 form exists only for weak32 feedback");
    }
    if (sign != PerturbationSign::Plus) {
      throw ValidationError("closed loop: the expanded33 form fixes the perturbation sign to +");
    }
  }
}

Eigen::Vector3d ChenMatrices::f0(const Eigen::Vector3d& x) const {
  return {0.0, -x[0] * x[2], x[0] * x[1]};
}

Eigen::Matrix3d ChenMatrices::D0(const Eigen::Vector3d& x) const {
  Eigen::Matrix3d d;
  d << x[0] - x[1], 0.0, 0.0,
       x[0], 0.0, x[0] + x[1],
       0.0, x[2], 0.0;
  return d;
}

Eigen::Matrix3d ChenMatrices::G(const Eigen::Vector3d& x) const {
  const auto& [a, b, c] = params;
  Eigen::Matrix3d g;
  g << x[0], 0.0, -a * x[0],
       x[1], c, 0.0,
       2.0 * x[2] / 3.0, 0.0, -b * x[2];
  return g;
}

Eigen::Matrix3d ChenMatrices::C(const Eigen::Vector3d& x) const { return x.asDiagonal(); }

ChenMatrices chen_matrices(const ChenParams& params) {
  const auto& [a, b, c] = params;
  ChenMatrices m{params, Eigen::Matrix3d::Zero()};
  m.A0 << -a, a, 0.0,
          c - a, c, 0.0,
          0.0, 0.0, -b;
  return m;
}

Eigen::Matrix3d disturbance_matrix(PerturbationSign sign, const Eigen::Vector3d& x) {
  Eigen::Matrix3d d = chen_matrices(ChenParams{}).D0(x);
  if (sign == PerturbationSign::Plus) {
    d.col(0) = -d.col(0);
    d.col(1) = -d.col(1);
  }
  return d;
}

double rho(const Eigen::Ref<const Vector>& x) { return 0.5 * x.norm(); }

namespace {

struct Gains {
  double margin;  // k1 = -margin * rho
  double cross;   // k2 = -cross * (x1 + x2)
  double k3;
};

Gains gains(FeedbackVariant variant) {
  switch (variant) {
    case FeedbackVariant::Full31: return {1.5, 1.0, -1.0};
    case FeedbackVariant::Weak32: return {1.4, 0.9, -1.0};
    case FeedbackVariant::Weaker34: return {1.0, 0.5, -1.0};
    case FeedbackVariant::Zero: return {0.0, 0.0, 0.0};
  }
  return {0.0, 0.0, 0.0};
}

double rho3(const Eigen::Vector3d& x) { return 0.5 * x.norm(); }

}  // namespace

Eigen::Vector3d feedback(FeedbackVariant variant, const Eigen::Vector3d& x) {
  const Gains g = gains(variant);
  return {-g.margin * rho3(x), -g.cross * (x[0] + x[1]), g.k3};
}

Eigen::Vector3d expanded_weak32_drift(const ChenParams& params, const Eigen::Vector3d& x,
                                      const Eigen::Vector3d& omega) {
  const auto& [a, b, c] = params;
  const double r = rho3(x);
  const double x1 = x[0], x2 = x[1], x3 = x[2];
  return {a * x2 - 1.4 * r * x1 + (x2 - x1) * omega[0],
          (0.1 * c - a) * x1 + 0.1 * c * x2 - x1 * x3 - 1.4 * r * x2 - x1 * omega[0] +
              (x1 + x2) * omega[2],
          x1 * x2 + 0.933 * r * x3 - omega[1] * x3};
}

// G(x) k(x) written out to avoid forming the 3x3 matrix in the inner loop.
Eigen::Vector3d feedback_force(const ChenParams& p, FeedbackVariant variant,
                               const Eigen::Vector3d& x) {
  const Eigen::Vector3d k = feedback(variant, x);
  return {x[0] * k[0] - p.a * x[0] * k[2],
          x[1] * k[0] + p.c * k[1],
          2.0 * x[2] / 3.0 * k[0] - p.b * x[2] * k[2]};
}

namespace {

Eigen::Vector3d disturbance_term(PerturbationSign sign, const Eigen::Vector3d& x,
                                 const Eigen::Vector3d& w) {
  const double s = sign == PerturbationSign::Plus ? -1.0 : 1.0;
  return {s * (x[0] - x[1]) * w[0],
          s * x[0] * w[0] + (x[0] + x[1]) * w[2],
          s * x[2] * w[1]};
}

Eigen::Vector3d compositional_drift(const ClosedLoopSpec& spec, const Eigen::Vector3d& x,
                                    const Eigen::Vector3d& omega) {
  const auto& [a, b, c] = spec.params;
  const Eigen::Vector3d linear(-a * x[0] + a * x[1], (c - a) * x[0] + c * x[1], -b * x[2]);
  const Eigen::Vector3d nonlinear(0.0, -x[0] * x[2], x[0] * x[1]);
  return linear + nonlinear + feedback_force(spec.params, spec.variant, x) +
         disturbance_term(spec.sign, x, omega);
}

}  // namespace

Eigen::Vector3d closed_loop_drift(const ClosedLoopSpec& spec, const Eigen::Vector3d& x,
                                  const Eigen::Vector3d& omega) {
  if (spec.form == DriftForm::Expanded33) return expanded_weak32_drift(spec.params, x, omega);
  return compositional_drift(spec, x, omega);
}

SdeSystem build_closed_loop(const ClosedLoopSpec& spec) {
  spec.validate();
  SdeSystem sys;
  sys.n = 3;
  sys.l = 3;
  sys.p = 3;

  sys.drift = [spec](double, const Vector& x, const Vector& omega, Eigen::Ref<Vector> out) {
    const Eigen::Vector3d xs = x.head<3>();
    const Eigen::Vector3d ws = omega.head<3>();
    out = closed_loop_drift(spec, xs, ws);
  };

  const Eigen::Vector3d sigma_c = spec.sigma_c;
  sys.aiding_diffusion = [sigma_c](const Vector& x, Eigen::Ref<Matrix> out) {
    out.setZero();
    for (Eigen::Index i = 0; i < 3; ++i) out(i, i) = x[i] * sigma_c[i];
  };

  const Eigen::Vector3d sigma_d = spec.disturbance.white_intensities.head<3>();
  const PerturbationSign sign = spec.sign;
  sys.disturbance_diffusion = [sign, sigma_d](const Vector& x, Eigen::Ref<Matrix> out) {
    const double s = sign == PerturbationSign::Plus ? -1.0 : 1.0;
    out << s * (x[0] - x[1]) * sigma_d[0], 0.0, 0.0,
           s * x[0] * sigma_d[0], 0.0, (x[0] + x[1]) * sigma_d[2],
           0.0, s * x[2] * sigma_d[1], 0.0;
  };

  const Eigen::Vector3d amplitudes = spec.disturbance.sin_amplitudes.head<3>();
  sys.deterministic_disturbance = [amplitudes](double t, Eigen::Ref<Vector> out) {
    out = amplitudes * std::sin(t);
  };

  Vector origin_drift(3);
  sys.drift(0.0, Vector::Zero(3), Vector::Zero(3), origin_drift);
  if (origin_drift.cwiseAbs().maxCoeff() != 0.0) {
    throw ValidationError("closed loop: drift does not vanish at the origin");
  }
  return sys;
}

double clf_bound(const ChenParams& params, FeedbackVariant variant, const Eigen::Vector3d& x) {
  const auto& [a, b, c] = params;
  const Eigen::Vector3d k = feedback(variant, x);
  const double x1 = x[0], x2 = x[1], x3 = x[2];
  return -a * x1 * x1 - b * x3 * x3 + c * x2 * (x1 + x2) + (k[0] - a * k[2]) * x1 * x1 +
         k[0] * x2 * x2 + c * k[1] * x2 + (2.0 / 3.0 * k[0] - b * k[2]) * x3 * x3 +
         rho3(x) * (1.5 * x1 * x1 + 1.5 * x2 * x2 + x3 * x3);
}

}  // namespace wnac
