#pragma once

#include <algorithm>
#include <cmath>

#include "tsmdp/model.hpp"
#include "tsmdp/policy.hpp"

namespace tsmdp {

/// Scalar-state chain with two actions used for the regret-rate and
/// regret-radius experiments. The action tilts the drift by +/- theta/2:
///
///   S' = rho S + base_drift + theta (A - 1/2) + sigma eps
///   U  = (1 - action_cost) clamp(S', -1, 1) - action_cost A
///
/// Both actions carry information about theta, so the likelihood stays
/// informative whatever the engine plays. With action_cost = 0 the two
/// constant policies have equal value exactly at theta = 0, which makes the
/// argmax boundary analytic.
class DriftChain {
 public:
  using State = double;
  using Action = int;

  struct Config {
    double rho = 0.5;
    double base_drift = 0.3;
    double sigma = 0.5;
    double action_cost = 0.0;
  };

  DriftChain() = default;
  explicit DriftChain(Config cfg) : cfg_(cfg) {}

  Eigen::Index parameter_dim() const { return 1; }
  Vector to_natural(const Vector& theta) const { return theta; }
  Vector to_unconstrained(const Vector& theta) const { return theta; }

  double mean_next(double s, int a, double theta) const {
    return cfg_.rho * s + cfg_.base_drift + theta * (a - 0.5);
  }

  double utility(double next, int action) const {
    return (1.0 - cfg_.action_cost) * std::clamp(next, -1.0, 1.0) -
           cfg_.action_cost * action;
  }

  Transition<double> sample_transition(const double& s, const int& a, const Vector& theta,
                                       RngStream& rng) const {
    const double next = mean_next(s, a, theta[0]) + cfg_.sigma * rng.normal();
    return {next, utility(next, a)};
  }

  double log_density(const double& s, const int& a, const double& next,
                     const Vector& theta) const {
    const double r = next - mean_next(s, a, theta[0]);
    const double v = cfg_.sigma * cfg_.sigma;
    return -0.5 * (std::log(2.0 * M_PI * v) + r * r / v);
  }

  const Config& config() const { return cfg_; }

  FiniteClass<ConstantPolicy<int>> constant_policies() const {
    return FiniteClass<ConstantPolicy<int>>{ConstantPolicy<int>{0}, ConstantPolicy<int>{1}};
  }

 private:
  Config cfg_;
};

/// Threshold rules for DriftChain: act when the state is at or below eta.
struct ThresholdPolicy {
  double threshold = 0.0;
  int act(const double& s, RngStream&) const { return s <= threshold ? 1 : 0; }
};

class ThresholdPolicyClass {
 public:
  using PolicyType = ThresholdPolicy;

  explicit ThresholdPolicyClass(double lo = -1.5, double hi = 1.5) : lo_(lo), hi_(hi) {}

  Eigen::Index dimension() const { return 1; }
  ThresholdPolicy make(const Vector& eta) const { return {eta[0]}; }
  Vector initial_point(RngStream& rng) const {
    Vector v(1);
    v[0] = rng.uniform(lo_, hi_);
    return v;
  }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_, hi_;
};

}  // namespace tsmdp
