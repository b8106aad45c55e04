#include "wnac/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace wnac {

namespace {

constexpr double kSymmetryTol = 1e-9;
constexpr double kSemidefiniteTol = 1e-10;
// Q counts as positive definite only if lambda_min(Q) > kPassMargin * |Q|.
constexpr double kPassMargin = 1e-9;

Vector symmetric_eigenvalues(const Matrix& m) {
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ValidationError("symmetric eigen-solve failed");
  return solver.eigenvalues();
}

double scale_of(const Matrix& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

void require_square(const Matrix& m, Eigen::Index n, const std::string& name) {
  if (m.rows() != n || m.cols() != n) {
    throw ValidationError(name + " must be " + std::to_string(n) + "x" + std::to_string(n) +
                          ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (!m.allFinite()) throw ValidationError(name + " has non-finite entries");
}

void require_symmetric(const Matrix& m, const std::string& name) {
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol * scale_of(m)) {
    throw ValidationError(name + " is not symmetric (max asymmetry " + std::to_string(asym) + ")");
  }
}

void require_psd(const Matrix& m, const std::string& name) {
  require_symmetric(m, name);
  const double lmin = symmetric_eigenvalues(m).minCoeff();
  if (lmin < -kSemidefiniteTol * scale_of(m)) {
    throw ValidationError(name + " is not positive semidefinite (smallest eigenvalue " +
                          std::to_string(lmin) + ")");
  }
}

void validate_channels(const std::vector<NoiseChannelBound>& channels, Eigen::Index n,
                       const std::string& kind) {
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const auto& ch = channels[i];
    const std::string tag = kind + "[" + std::to_string(i) + "]";
    if (!std::isfinite(ch.sigma) || ch.sigma < 0.0) {
      throw ValidationError(tag + ".sigma must be finite and nonnegative");
    }
    if (!std::isfinite(ch.alpha)) throw ValidationError(tag + ".alpha must be finite");
    require_square(ch.K, n, tag + ".K");
    require_square(ch.J, n, tag + ".J");
    require_psd(ch.K, tag + ".K");
    require_psd(ch.J, tag + ".J");
  }
}

struct Spectrum {
  double min;
  double max;
};

Spectrum spectrum_of(const Matrix& m) {
  const Vector ev = symmetric_eigenvalues(m);
  return {ev.minCoeff(), ev.maxCoeff()};
}

// -Q without the eps-dependent term.
Matrix minus_q_base(const ConditionInputs& in, double beta_max) {
  Matrix m = in.A.transpose() * in.P + in.P * in.A + 2.0 * in.R;
  auto add_channels = [&](const std::vector<NoiseChannelBound>& channels) {
    for (const auto& ch : channels) {
      const double s2 = ch.sigma * ch.sigma;
      m += s2 * ch.K - (2.0 / beta_max) * s2 * ch.alpha * ch.J;
    }
  };
  add_channels(in.aiding);
  add_channels(in.disturbance);
  return m;
}

Matrix with_epsilon(const Matrix& base, const ConditionInputs& in, double eps) {
  return base + eps * in.P * in.P + in.L / eps;
}

// lambda_max(base + eps P^2 + L / eps) is convex in eps, hence unimodal in
// log10(eps); golden-section search on [-6, 6].
double optimal_epsilon(const Matrix& base, const ConditionInputs& in) {
  auto objective = [&](double u) {
    return spectrum_of(with_epsilon(base, in, std::pow(10.0, u))).max;
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = -6.0, hi = 6.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = objective(x1), f2 = objective(x2);
  while (hi - lo > 1e-9) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = objective(x2);
    }
  }
  return std::pow(10.0, 0.5 * (lo + hi));
}

ConditionReport make_report(const Matrix& minus_q, double epsilon, double beta_max) {
  ConditionReport r;
  const Matrix q = -minus_q;
  r.asymmetry = (q - q.transpose()).cwiseAbs().maxCoeff();
  r.Q = 0.5 * (q + q.transpose());
  r.spectrum = symmetric_eigenvalues(r.Q);
  r.lambda_min_Q = r.spectrum.minCoeff();
  const double norm = r.spectrum.cwiseAbs().maxCoeff();
  r.passes = r.lambda_min_Q > kPassMargin * norm && r.lambda_min_Q > 0.0;
  r.epsilon_used = epsilon;
  r.decay_bound = r.lambda_min_Q / (2.0 * beta_max);
  return r;
}

void check_corollary_arguments(const ConditionInputs& base, std::span<const double> c,
                               std::span<const double> sigma_c) {
  if (!base.aiding.empty()) {
    throw ValidationError("corollary: aiding channels are generated from c; pass none");
  }
  if (c.size() != sigma_c.size()) {
    throw ValidationError("corollary: c and sigma_c differ in length");
  }
  for (double ci : c) {
    if (!std::isfinite(ci) || ci <= 0.0) throw ValidationError("corollary: every c_i must be > 0");
  }
  for (double s : sigma_c) {
    if (!std::isfinite(s) || s < 0.0) {
      throw ValidationError("corollary: every sigma_i must be finite and nonnegative");
    }
  }
}

}  // namespace

void ConditionInputs::validate() const {
  const Eigen::Index n = A.rows();
  if (n == 0) throw ValidationError("condition inputs: A is empty");
  require_square(A, n, "A");
  require_square(P, n, "P");
  require_square(L, n, "L");
  require_square(R, n, "R");
  require_symmetric(P, "P");
  if (spectrum_of(P).min <= 0.0) throw ValidationError("P must be positive definite");
  require_psd(L, "L");
  require_psd(R, "R");
  if (epsilon && (!std::isfinite(*epsilon) || *epsilon <= 0.0)) {
    throw ValidationError("epsilon must be positive");
  }
  validate_channels(aiding, n, "aiding");
  validate_channels(disturbance, n, "disturbance");
}

double lemma4_scale(const Matrix& R, const Matrix& S) {
  if (R.rows() != R.cols() || S.rows() != S.cols()) {
    throw ValidationError("lemma4_scale: R and S must be square");
  }
  require_psd(R, "R");
  require_psd(S, "S");
  const double r = std::max(0.0, spectrum_of(R).max);
  const double s = std::max(0.0, spectrum_of(S).max);
  return std::sqrt(r * s);
}

ConditionReport q_theorem1(const ConditionInputs& inputs) {
  inputs.validate();
  const double beta_max = spectrum_of(inputs.P).max;
  const Matrix base = minus_q_base(inputs, beta_max);
  if (inputs.linear_system) return make_report(base, 0.0, beta_max);
  const double eps = inputs.epsilon ? *inputs.epsilon : optimal_epsilon(base, inputs);
  return make_report(with_epsilon(base, inputs, eps), eps, beta_max);
}

ConditionReport q_theorem2(const ConditionInputs& inputs) {
  if (!inputs.disturbance.empty()) {
    throw ValidationError("theorem 2 conditions take no disturbance-noise channels");
  }
  return q_theorem1(inputs);
}

ConditionInputs corollary_substitution(const ConditionInputs& base, std::span<const double> c,
                                       std::span<const double> sigma_c) {
  check_corollary_arguments(base, c, sigma_c);
  base.validate();
  const double beta_min = spectrum_of(base.P).min;
  ConditionInputs out = base;
  out.aiding.reserve(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    out.aiding.push_back({sigma_c[i], c[i] * c[i] * base.P, c[i] * base.P, c[i] * beta_min});
  }
  return out;
}

ConditionReport q_corollary(const ConditionInputs& base, std::span<const double> c,
                            std::span<const double> sigma_c) {
  check_corollary_arguments(base, c, sigma_c);
  base.validate();
  const Spectrum beta = spectrum_of(base.P);
  if (!(2.0 * beta.min > beta.max)) {
    throw ValidationError("corollary precondition 2 beta_min > beta_max fails (beta_min = " +
                          std::to_string(beta.min) + ", beta_max = " + std::to_string(beta.max) +
                          ")");
  }
  return q_theorem1(corollary_substitution(base, c, sigma_c));
}

double min_aiding_intensity(const ConditionInputs& base, std::span<const double> c, double tol) {
  if (!(tol > 0.0)) throw ValidationError("min_aiding_intensity: tolerance must be positive");
  std::vector<double> sigma(c.size(), 0.0);
  auto passes_at = [&](double s2) {
    std::fill(sigma.begin(), sigma.end(), std::sqrt(s2));
    return q_corollary(base, c, sigma).passes;
  };
  if (passes_at(0.0)) return 0.0;

  double lo = 0.0, hi = 1.0;
  while (!passes_at(hi)) {
    lo = hi;
    hi *= 4.0;
    if (hi > 1e200) throw ValidationError("min_aiding_intensity: no finite threshold found");
  }
  while (std::sqrt(hi) - std::sqrt(lo) > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (passes_at(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return std::sqrt(hi);
}

BoundCheckReport verify_condition_bounds(const BoundCheckInputs& in,
                                         const std::vector<Vector>& sample_points) {
  const Eigen::Index n = in.P.rows();
  require_square(in.P, n, "P");
  if (in.aiding_columns.size() != in.aiding_bounds.size()) {
    throw ValidationError("bound check: aiding columns and bounds differ in count");
  }
  if (!in.disturbance_bounds.empty() && !in.disturbance_matrix) {
    throw ValidationError("bound check: disturbance bounds need a disturbance matrix");
  }

  BoundCheckReport report;
  auto record = [&](const std::string& name, double slack, double magnitude, const Vector& x) {
    auto it = std::find_if(report.slacks.begin(), report.slacks.end(),
                           [&](const BoundSlack& s) { return s.condition == name; });
    if (it == report.slacks.end()) {
      report.slacks.push_back({name, slack, x});
    } else if (slack < it->worst_slack) {
      it->worst_slack = slack;
      it->worst_point = x;
    }
    if (slack < -1e-10 * std::max(1.0, magnitude)) report.holds = false;
  };

  for (const Vector& x : sample_points) {
    if (x.size() != n) throw ValidationError("bound check: sample point has the wrong dimension");
    if (x.isZero(0.0)) throw ValidationError("bound check: sample points must be nonzero");
    const Vector px = in.P * x;

    if (in.disturbance_matrix) {
      const Matrix d = in.disturbance_matrix(x);
      if (in.R) {
        const double rhs = x.dot(*in.R * x);
        const double lhs = in.rho(x) * (px.transpose() * d).norm();
        record("margin", rhs - lhs, std::abs(lhs) + std::abs(rhs), x);
      }
      for (std::size_t j = 0; j < in.disturbance_bounds.size(); ++j) {
        const Vector dj = d.col(static_cast<Eigen::Index>(j));
        const auto& [J, K] = in.disturbance_bounds[j];
        const double lower_lhs = px.dot(dj), lower_rhs = x.dot(J * x);
        record("disturbance_lower", lower_lhs - lower_rhs,
               std::abs(lower_lhs) + std::abs(lower_rhs), x);
        const double upper_lhs = dj.dot(in.P * dj), upper_rhs = x.dot(K * x);
        record("disturbance_upper", upper_rhs - upper_lhs,
               std::abs(upper_lhs) + std::abs(upper_rhs), x);
      }
    }

    for (std::size_t i = 0; i < in.aiding_columns.size(); ++i) {
      const Vector ci = in.aiding_columns[i](x);
      const auto& [J, K] = in.aiding_bounds[i];
      const double lower_lhs = px.dot(ci), lower_rhs = x.dot(J * x);
      record("aiding_lower", lower_lhs - lower_rhs, std::abs(lower_lhs) + std::abs(lower_rhs), x);
      const double upper_lhs = ci.dot(in.P * ci), upper_rhs = x.dot(K * x);
      record("aiding_upper", upper_rhs - upper_lhs, std::abs(upper_lhs) + std::abs(upper_rhs), x);
    }
  }

  report.worst_slack = std::numeric_limits<double>::infinity();
  for (const auto& s : report.slacks) report.worst_slack = std::min(report.worst_slack, s.worst_slack);
  if (report.slacks.empty()) report.worst_slack = 0.0;
  return report;
}

}  // namespace wnac
