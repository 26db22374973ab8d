#include "isc/isc_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "isc/error.hpp"
#include "isc/parallel.hpp"
#include "isc/sphere_pose.hpp"

namespace isc {

namespace {

using Params = Eigen::Matrix<double, 5, 1>;

Params to_params(const Intrinsics& k) { return {k.fx, k.fy, k.skew, k.u0, k.v0}; }
Intrinsics from_params(const Params& p) { return {p(0), p(1), p(2), p(3), p(4)}; }

void check_observation(const SphereObservation& o, const char* which) {
  if (o.x_c.size() != o.x_p.size()) {
    throw Error(ErrorCode::InvalidInput, std::string(which) + ": x_c and x_p lengths differ");
  }
  if (o.x_c.size() < kMinCorrespondences) {
    throw Error(ErrorCode::InvalidInput,
                std::string(which) + ": needs at least 10 valid correspondences");
  }
  if (!(o.radius > 0.0)) throw Error(ErrorCode::InvalidInput, std::string(which) + ": radius must be positive");
}

// Everything one objective evaluation produces, in canonical sphere order.
struct Evaluation {
  Eigen::VectorXd residuals;
  ObjectiveValue value;
};

Evaluation evaluate(const Intrinsics& k, const IscProblem& problem) {
  if (!k.valid()) throw Error(ErrorCode::InfeasibleCandidate, "non-positive focal length");
  const size_t n = problem.total_points();
  std::vector<Vec2> xp;
  std::vector<Vec3> X;
  xp.reserve(n);
  X.reserve(n);
  try {
    for (int s : problem.order) {
      const auto& o = problem.obs[static_cast<size_t>(s)];
      const SpherePose pose = sphere_center_from_conic(o.conic, k, o.radius,
                                                       std::numeric_limits<double>::infinity());
      const auto lifted = lift_pixels(o.x_c, k, pose, MissPolicy::ClampToTangent);
      for (size_t i = 0; i < lifted.size(); ++i) {
        X.push_back(*lifted[i]);
        xp.push_back(o.x_p[i]);
      }
    }
  } catch (const Error& e) {
    throw Error(ErrorCode::InfeasibleCandidate, e.what());
  }

  Evaluation ev;
  try {
    ev.value.m_p = dlt_estimate(xp, X);
  } catch (const Error& e) {
    throw Error(ErrorCode::InfeasibleCandidate, e.what());
  }
  const Mat34& m = ev.value.m_p.matrix();
  ev.residuals.resize(static_cast<Eigen::Index>(2 * n + 3));
  size_t offset = 0;
  for (size_t slot = 0; slot < 2; ++slot) {
    const int s = problem.order[slot];
    const size_t count = problem.obs[static_cast<size_t>(s)].x_c.size();
    double sum = 0.0, sq = 0.0;
    for (size_t i = offset; i < offset + count; ++i) {
      const Vec3 h = m * homogeneous(X[i]);
      if (!(std::abs(h.z()) > 1e-12 * h.norm())) {
        throw Error(ErrorCode::InfeasibleCandidate, "point projects to infinity");
      }
      const Vec2 e = xp[i] - h.head<2>() / h.z();
      ev.residuals.segment<2>(static_cast<Eigen::Index>(2 * i)) = e;
      sum += e.norm();
      sq += e.squaredNorm();
    }
    ev.value.sphere_sum[static_cast<size_t>(s)] = sum;
    ev.value.sphere_squared[static_cast<size_t>(s)] = sq;
    offset += count;
  }
  const Vec3 pp = pole_polar_vector(problem.constraint, k);
  ev.residuals.tail<3>() = std::sqrt(problem.mu) * pp;
  ev.value.constraint = pp.squaredNorm();
  ev.value.residual_sum = ev.value.sphere_sum[0] + ev.value.sphere_sum[1];
  ev.value.squared_sum = ev.value.sphere_squared[0] + ev.value.sphere_squared[1];
  ev.value.value = ev.value.residual_sum + problem.mu * ev.value.constraint;
  if (!ev.residuals.allFinite()) throw Error(ErrorCode::InfeasibleCandidate, "non-finite residuals");
  return ev;
}

std::optional<Evaluation> try_evaluate(const Intrinsics& k, const IscProblem& problem) {
  try {
    return evaluate(k, problem);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InfeasibleCandidate) return std::nullopt;
    throw;
  }
}

}  // namespace

IscProblem make_problem(SphereObservation first, SphereObservation second, int cam_w, int cam_h,
                        std::optional<double> mu) {
  check_observation(first, "sphere 1");
  check_observation(second, "sphere 2");
  if (cam_w < 1 || cam_h < 1) throw Error(ErrorCode::InvalidInput, "camera size must be positive");
  if (mu && !(*mu >= 0.0)) throw Error(ErrorCode::InvalidInput, "mu must be >= 0");

  IscProblem p;
  p.obs = {std::move(first), std::move(second)};
  p.cam_w = cam_w;
  p.cam_h = cam_h;
  const auto c0 = p.obs[0].conic.normalized().coefficients();
  const auto c1 = p.obs[1].conic.normalized().coefficients();
  p.order = c1 < c0 ? std::array<int, 2>{1, 0} : std::array<int, 2>{0, 1};
  p.constraint = constraint_pair(p.obs[static_cast<size_t>(p.order[0])].conic,
                                 p.obs[static_cast<size_t>(p.order[1])].conic,
                                 Intrinsics::centered(cam_w, cam_w, cam_h));
  p.mu = mu.value_or(kPenaltyPerPoint * static_cast<double>(p.total_points()));
  return p;
}

ObjectiveValue isc_objective(const Intrinsics& k, const IscProblem& problem) {
  return evaluate(k, problem).value;
}

Eigen::VectorXd isc_residuals(const Intrinsics& k, const IscProblem& problem) {
  return evaluate(k, problem).residuals;
}

CalibResult calibrate(const IscProblem& problem, const CalibOptions& opts) {
  IscProblem prob = problem;
  if (opts.mu) {
    if (!(*opts.mu >= 0.0)) throw Error(ErrorCode::InvalidInput, "mu must be >= 0");
    prob.mu = *opts.mu;
  }
  const double width = prob.cam_w;

  // Start point: logarithmic focal scan with a centered principal point.
  double best_f = 0.0;
  double best_value = std::numeric_limits<double>::infinity();
  const int samples = std::max(2, opts.f_scan_samples);
  for (int i = 0; i < samples; ++i) {
    const double t = static_cast<double>(i) / (samples - 1);
    const double f = width * opts.f_scan_min * std::pow(opts.f_scan_max / opts.f_scan_min, t);
    const auto ev = try_evaluate(Intrinsics::centered(f, prob.cam_w, prob.cam_h), prob);
    if (ev && ev->value.value < best_value) {
      best_value = ev->value.value;
      best_f = f;
    }
  }
  if (!(best_f > 0.0)) throw Error(ErrorCode::NoFeasibleStart, "focal scan found no feasible camera");

  Params p = to_params(Intrinsics::centered(best_f, prob.cam_w, prob.cam_h));
  const double scale = best_f;
  Evaluation current = *try_evaluate(from_params(p), prob);
  double cost = current.residuals.squaredNorm();

  CalibResult result;
  result.initial_focal = best_f;
  result.cost_history.push_back(cost);

  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;
  const Eigen::Index m = current.residuals.size();
  for (; iter < opts.max_iters && !converged; ++iter) {
    // Central differences; the ten evaluations are independent.
    Eigen::Matrix<double, Eigen::Dynamic, 5> jac(m, 5);
    std::array<double, 5> steps{};
    std::array<std::optional<Eigen::VectorXd>, 10> probes;
    for (int j = 0; j < 5; ++j) steps[j] = opts.fd_step * std::max(std::abs(p(j)), scale);
#pragma omp parallel for schedule(static) num_threads(thread_count())
    for (int e = 0; e < 10; ++e) {
      Params q = p;
      q(e / 2) += (e % 2 == 0 ? 1.0 : -1.0) * steps[e / 2];
      if (auto ev = try_evaluate(from_params(q), prob)) probes[e] = std::move(ev->residuals);
    }
    for (int j = 0; j < 5; ++j) {
      const auto& plus = probes[2 * j];
      const auto& minus = probes[2 * j + 1];
      if (plus && minus) {
        jac.col(j) = (*plus - *minus) / (2.0 * steps[j]);
      } else if (plus) {
        jac.col(j) = (*plus - current.residuals) / steps[j];
      } else if (minus) {
        jac.col(j) = (current.residuals - *minus) / steps[j];
      } else {
        jac.col(j).setZero();
      }
    }
    const Eigen::Matrix<double, 5, 5> jtj = jac.transpose() * jac;
    const Params g = jac.transpose() * current.residuals;

    bool accepted = false;
    while (!accepted) {
      Eigen::Matrix<double, 5, 5> a = jtj;
      for (int j = 0; j < 5; ++j) a(j, j) += lambda * std::max(jtj(j, j), 1e-12 * jtj.trace());
      const Params delta = -a.ldlt().solve(g);
      const double rel_step = delta.norm() / p.norm();
      const Params trial = p + delta;
      std::optional<Evaluation> ev;
      if (delta.allFinite()) ev = try_evaluate(from_params(trial), prob);
      const double trial_cost = ev ? ev->residuals.squaredNorm() : std::numeric_limits<double>::infinity();
      if (trial_cost < cost) {
        const double decrease = (cost - trial_cost) / cost;
        p = trial;
        current = std::move(*ev);
        cost = trial_cost;
        result.cost_history.push_back(cost);
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        converged = (decrease < opts.rel_decrease_tol && rel_step < opts.step_tol) || cost == 0.0;
      } else {
        lambda *= 10.0;
        // The model cannot improve even a tiny step: first-order stationary.
        if (rel_step < opts.step_tol || lambda > 1e16) {
          converged = rel_step < opts.step_tol;
          break;
        }
      }
    }
    if (!accepted) {
      ++iter;
      break;
    }
  }

  result.k_c = from_params(p);
  result.m_p = current.value.m_p;
  result.projector = decompose(current.value.m_p);
  result.objective = current.value.residual_sum;
  result.constraint_residual = std::sqrt(current.value.constraint);
  result.constraint_checked = prob.mu > 0.0;
  result.mu = prob.mu;
  for (size_t s = 0; s < 2; ++s) {
    const auto count = prob.obs[s].x_c.size();
    result.counts[s] = count;
    result.sphere_mean_residual[s] = current.value.sphere_sum[s] / static_cast<double>(count);
    result.sphere_rms_residual[s] = std::sqrt(current.value.sphere_squared[s] / static_cast<double>(count));
  }
  result.iterations = iter;
  result.converged = converged;
  return result;
}

}  // namespace isc
