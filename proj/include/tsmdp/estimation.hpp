#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tsmdp/model.hpp"

namespace tsmdp {

using Objective = std::function<double(const Vector&)>;

struct FitOptions {
  double ridge = 1e-6;
  int max_iterations = 500;
  double gradient_tol = 1e-6;  // relative: ||g|| <= tol * (1 + |objective|)
  double fd_step = 1e-6;       // central-difference step for gradients
  std::vector<std::pair<double, double>>* trace = nullptr;  // (objective, |g|) per iter
};

struct FitResult {
  Vector theta_hat;
  Matrix covariance;  // Omega-hat: sample_count * inverse observed information
  bool converged = false;
  double log_likelihood = 0.0;  // ridge-free value at theta_hat
  int iterations = 0;
  bool pinv_used = false;
};

/// Maximizes objective - ridge*||theta||^2 by BFGS ascent with central
/// finite-difference gradients and backtracking line search. Deterministic
/// given init.
FitResult maximize(const Objective& objective, const Vector& init, const FitOptions& opts);

/// Covariance of a sqrt(t)-consistent estimator from the observed Fisher
/// information: Omega = t * (-H)^-1 with H the central-difference Hessian of
/// loglik at theta_hat, symmetrized. Falls back to a pseudo-inverse when the
/// Hessian is ill-conditioned (condition number above 1e12); pinv_used
/// reports that path.
Matrix observed_information_covariance(const Objective& loglik, const Vector& theta_hat,
                                       double sample_count, bool* pinv_used = nullptr);

/// Central-difference Hessian with per-coordinate step
/// h_j = max(1e-5, 1e-5*|theta_j|), symmetrized as (H + H^T)/2.
Matrix finite_difference_hessian(const Objective& f, const Vector& x);

Vector finite_difference_gradient(const Objective& f, const Vector& x, double step);

/// MLE of the dynamics parameter from the accumulated history, plus the
/// observed-information covariance. Ridge keeps weakly identified directions
/// from wandering; it perturbs the optimum by O(ridge) only.
template <DynamicsModel M>
FitResult fit_mle(const HistoryOf<M>& history, const M& model, const Vector& init,
                  const FitOptions& opts = {}) {
  if (history.size() < 2)
    throw InsufficientDataError("mle needs at least 2 records");
  auto loglik = loglik_function(model, history);
  FitResult r = maximize(loglik, init, opts);
  r.covariance = observed_information_covariance(
      loglik, r.theta_hat, static_cast<double>(history.size()), &r.pinv_used);
  return r;
}

template <DynamicsModel M>
Matrix observed_information(const HistoryOf<M>& history, const M& model,
                            const Vector& theta_hat) {
  auto loglik = loglik_function(model, history);
  return observed_information_covariance(loglik, theta_hat,
                                         static_cast<double>(history.size()));
}

}  // namespace tsmdp
