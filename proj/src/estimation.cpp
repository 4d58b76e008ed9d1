#include "tsmdp/estimation.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace tsmdp {

Vector finite_difference_gradient(const Objective& f, const Vector& x, double step) {
  Vector g(x.size());
  Vector xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = step * std::max(1.0, std::fabs(x[j]));
    xp[j] = x[j] + h;
    const double fp = f(xp);
    xp[j] = x[j] - h;
    const double fm = f(xp);
    xp[j] = x[j];
    g[j] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Matrix finite_difference_hessian(const Objective& f, const Vector& x) {
  const Eigen::Index q = x.size();
  Vector h(q);
  for (Eigen::Index j = 0; j < q; ++j) h[j] = std::max(1e-5, 1e-5 * std::fabs(x[j]));

  Matrix H(q, q);
  const double f0 = f(x);
  Vector xp = x;

  for (Eigen::Index j = 0; j < q; ++j) {
    xp[j] = x[j] + h[j];
    const double fp = f(xp);
    xp[j] = x[j] - h[j];
    const double fm = f(xp);
    xp[j] = x[j];
    H(j, j) = (fp - 2.0 * f0 + fm) / (h[j] * h[j]);
  }
  for (Eigen::Index j = 0; j < q; ++j) {
    for (Eigen::Index k = j + 1; k < q; ++k) {
      xp[j] = x[j] + h[j];
      xp[k] = x[k] + h[k];
      const double fpp = f(xp);
      xp[k] = x[k] - h[k];
      const double fpm = f(xp);
      xp[j] = x[j] - h[j];
      xp[k] = x[k] + h[k];
      const double fmp = f(xp);
      xp[k] = x[k] - h[k];
      const double fmm = f(xp);
      xp[j] = x[j];
      xp[k] = x[k];
      H(j, k) = H(k, j) = (fpp - fpm - fmp + fmm) / (4.0 * h[j] * h[k]);
    }
  }
  return 0.5 * (H + H.transpose());
}

FitResult maximize(const Objective& objective, const Vector& init, const FitOptions& opts) {
  const Eigen::Index q = init.size();
  const double ridge = opts.ridge;

  auto penalized = [&](const Vector& th) {
    return objective(th) - ridge * th.squaredNorm();
  };

  Vector x = init;
  double fx = penalized(x);
  if (!std::isfinite(fx))
    throw EstimationError("objective not finite at the initial point");

  Matrix Binv = Matrix::Identity(q, q);  // inverse Hessian approximation (of -f)
  Vector g = finite_difference_gradient(penalized, x, opts.fd_step);

  FitResult result;
  result.converged = false;
  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    if (opts.trace) opts.trace->emplace_back(fx, g.norm());
    if (g.norm() <= opts.gradient_tol * (1.0 + std::fabs(fx))) {
      result.converged = true;
      break;
    }

    Vector direction = Binv * g;  // ascent direction
    if (direction.dot(g) <= 0.0) {
      Binv = Matrix::Identity(q, q);
      direction = g;
    }

    // Backtracking line search on the Armijo condition.
    double step = 1.0;
    const double slope = direction.dot(g);
    double f_new = -std::numeric_limits<double>::infinity();
    Vector x_new;
    bool improved = false;
    for (int ls = 0; ls < 40; ++ls) {
      x_new = x + step * direction;
      f_new = penalized(x_new);
      if (std::isfinite(f_new) && f_new >= fx + 1e-4 * step * slope) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;  // no ascent step found; keep best iterate

    Vector g_new = finite_difference_gradient(penalized, x_new, opts.fd_step);
    Vector s = x_new - x;
    Vector y = g - g_new;  // gradient-of-(-f) differences
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      // BFGS update of the inverse Hessian of -f.
      Vector By = Binv * y;
      const double yBy = y.dot(By);
      Binv += ((sy + yBy) / (sy * sy)) * (s * s.transpose()) -
              (By * s.transpose() + s * By.transpose()) / sy;
    }
    x = x_new;
    fx = f_new;
    g = g_new;
  }
  if (!result.converged && iter < opts.max_iterations &&
      g.norm() <= opts.gradient_tol * (1.0 + std::fabs(fx))) {
    result.converged = true;
  }

  result.theta_hat = x;
  result.iterations = iter;
  result.log_likelihood = objective(x);
  return result;
}

Matrix observed_information_covariance(const Objective& loglik, const Vector& theta_hat,
                                       double sample_count, bool* pinv_used) {
  Matrix H = finite_difference_hessian(loglik, theta_hat);
  Matrix info = -H;  // observed information

  Eigen::SelfAdjointEigenSolver<Matrix> es(info);
  if (es.info() != Eigen::Success)
    throw EstimationError("eigendecomposition of the observed information failed");
  const Vector& ev = es.eigenvalues();
  const double emax = ev.cwiseAbs().maxCoeff();
  const double emin_pos = ev.minCoeff();

  bool pinv = false;
  Vector inv_ev(ev.size());
  if (emax <= 0.0) throw EstimationError("observed information is not positive");
  if (emin_pos <= 0.0 || emax / emin_pos > 1e12) {
    pinv = true;
    const double cutoff = emax * 1e-12;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      inv_ev[i] = ev[i] > cutoff ? 1.0 / ev[i] : 0.0;
    if ((inv_ev.array() == 0.0).all())
      throw EstimationError("observed information is singular beyond repair");
  } else {
    inv_ev = ev.cwiseInverse();
  }
  if (pinv_used) *pinv_used = pinv;

  Matrix cov = es.eigenvectors() * inv_ev.asDiagonal() * es.eigenvectors().transpose();
  cov *= sample_count;
  return 0.5 * (cov + cov.transpose());
}

}  // namespace tsmdp
