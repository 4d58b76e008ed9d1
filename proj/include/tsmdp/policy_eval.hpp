#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "tsmdp/model.hpp"
#include "tsmdp/rng.hpp"

namespace tsmdp {

struct ValueEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  int rollouts = 0;
  int horizon = 0;
};

struct OptimizeOptions {
  int rollouts = 256;
  double gamma = 0.95;
  int max_iterations = 200;    // simplex iterations per restart
  int restarts = 3;
  double simplex_tol = 1e-3;   // diameter at which a restart stops
  long eval_budget = std::numeric_limits<long>::max();
};

template <class P>
struct PolicySearchResult {
  P policy;
  ValueEstimate value;
  Vector params;
  bool budget_exhausted = false;
  long evaluations = 0;
};

/// Monte Carlo estimate of the truncated discounted value
/// V_theta^T(pi) = E_theta sum_{t=1..T} gamma^{t-1} U^t from a fixed start
/// state. Rollout j draws its environment and tie-break streams from
/// substream j of `streams`, so two calls with the same factory use common
/// random numbers and return identical estimates.
template <DynamicsModel M, class P>
  requires PolicyFor<P, typename M::State, typename M::Action>
ValueEstimate estimate_value(const M& model, const Vector& theta, const P& policy,
                             int horizon, const typename M::State& start, int rollouts,
                             double gamma, const StreamFactory& streams) {
  if (horizon < 1) throw DomainError("horizon must be >= 1");
  if (rollouts < 1) throw DomainError("rollouts must be >= 1");

  double sum = 0.0, sumsq = 0.0;
  for (int j = 0; j < rollouts; ++j) {
    auto env_rng = streams.child(2 * j).stream();
    auto tie_rng = streams.child(2 * j + 1).stream();
    typename M::State s = start;
    double total = 0.0, discount = 1.0;
    for (int step = 0; step < horizon; ++step) {
      typename M::Action a = policy.act(s, tie_rng);
      Transition<typename M::State> tr;
      try {
        tr = model.sample_transition(s, a, theta, env_rng);
      } catch (const Error& e) {
        throw Error("rollout " + std::to_string(j) + ": " + e.what());
      }
      total += discount * tr.utility;
      discount *= gamma;
      s = std::move(tr.next);
    }
    sum += total;
    sumsq += total * total;
  }
  ValueEstimate est;
  est.mean = sum / rollouts;
  est.rollouts = rollouts;
  est.horizon = horizon;
  if (rollouts > 1) {
    const double var = std::max(0.0, (sumsq - rollouts * est.mean * est.mean) /
                                         (rollouts - 1));
    est.standard_error = std::sqrt(var / rollouts);
  }
  return est;
}

namespace detail {

struct NelderMeadOptions {
  int max_iterations;
  double tol;
  int restarts;
  long eval_budget;
};

struct NelderMeadResult {
  Vector best_point;
  double best_value;
  long evaluations;
  bool budget_exhausted;
};

/// Derivative-free maximization; tolerates the piecewise-flat objectives
/// that ranking policies produce.
NelderMeadResult nelder_mead_maximize(const std::function<double(const Vector&)>& f,
                                      const std::vector<Vector>& initial_points,
                                      const NelderMeadOptions& opts);

}  // namespace detail

/// Exact argmax over a finite class: every candidate is evaluated with the
/// same rollout streams (common random numbers), so comparison noise cancels
/// where trajectories agree. Equal means resolve to the lowest index.
template <DynamicsModel M, FinitePolicyClass PC>
PolicySearchResult<typename PC::PolicyType> optimize_policy(
    const M& model, const Vector& theta, const PC& policy_class, int horizon,
    const typename M::State& start, const OptimizeOptions& opts,
    const StreamFactory& streams) {
  if (policy_class.size() == 0) throw DomainError("empty policy class");
  const StreamFactory crn = streams.child(stream_tag::kPolicySearch);

  PolicySearchResult<typename PC::PolicyType> best{policy_class.policy(0), {}, {}, false, 0};
  double best_mean = -std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  ValueEstimate best_est;
  long evals = 0;
  bool exhausted = false;
  for (std::size_t i = 0; i < policy_class.size(); ++i) {
    if (evals >= opts.eval_budget && i > 0) {
      exhausted = true;
      break;
    }
    ValueEstimate est = estimate_value(model, theta, policy_class.policy(i), horizon,
                                       start, opts.rollouts, opts.gamma, crn);
    ++evals;
    if (est.mean > best_mean) {
      best_mean = est.mean;
      best_i = i;
      best_est = est;
    }
  }
  best.policy = policy_class.policy(best_i);
  best.value = best_est;
  best.params = policy_class.params(best_i);
  best.evaluations = evals;
  best.budget_exhausted = exhausted;
  return best;
}

/// Simplex search over a continuous eta-family, restarted from `restarts`
/// random initial simplexes, all evaluations sharing one set of rollout
/// streams. Returns the best policy found; deterministic given the factory.
template <DynamicsModel M, ParametricPolicyClass PC>
  requires(!FinitePolicyClass<PC>)
PolicySearchResult<typename PC::PolicyType> optimize_policy(
    const M& model, const Vector& theta, const PC& policy_class, int horizon,
    const typename M::State& start, const OptimizeOptions& opts,
    const StreamFactory& streams) {
  const StreamFactory crn = streams.child(stream_tag::kPolicySearch);
  auto value_of = [&](const Vector& eta) {
    return estimate_value(model, theta, policy_class.make(eta), horizon, start,
                          opts.rollouts, opts.gamma, crn)
        .mean;
  };

  auto init_rng = streams.child(stream_tag::kInit).stream();
  std::vector<Vector> starts;
  starts.reserve(opts.restarts);
  for (int r = 0; r < std::max(1, opts.restarts); ++r)
    starts.push_back(policy_class.initial_point(init_rng));

  detail::NelderMeadOptions nm{opts.max_iterations, opts.simplex_tol, opts.restarts,
                               opts.eval_budget};
  auto nm_result = detail::nelder_mead_maximize(value_of, starts, nm);

  PolicySearchResult<typename PC::PolicyType> result{
      policy_class.make(nm_result.best_point), {}, nm_result.best_point,
      nm_result.budget_exhausted, nm_result.evaluations};
  result.value = estimate_value(model, theta, result.policy, horizon, start,
                                opts.rollouts, opts.gamma, crn);
  return result;
}

}  // namespace tsmdp
