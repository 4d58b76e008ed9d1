#pragma once

#include <Eigen/Core>
#include <concepts>
#include <functional>
#include <utility>

#include "tsmdp/errors.hpp"
#include "tsmdp/history.hpp"
#include "tsmdp/rng.hpp"

namespace tsmdp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

template <class S>
struct Transition {
  S next;
  double utility = 0.0;
};

/// Contract for a parametric dynamics model. Parameters always travel on the
/// unconstrained scale (all of R^q); the model owns the bijection to whatever
/// natural scale its coordinates live on. sample_transition must be a pure
/// function of (state, action, theta, stream position), and log_density must
/// be finite on any transition sample_transition can produce under the same
/// theta.
template <class M>
concept DynamicsModel = requires(const M& m, const typename M::State& s,
                                 const typename M::Action& a, const Vector& theta,
                                 RngStream& rng) {
  typename M::State;
  typename M::Action;
  { m.parameter_dim() } -> std::convertible_to<Eigen::Index>;
  { m.sample_transition(s, a, theta, rng) } -> std::same_as<Transition<typename M::State>>;
  { m.log_density(s, a, s, theta) } -> std::convertible_to<double>;
  { m.to_natural(theta) } -> std::convertible_to<Vector>;
  { m.to_unconstrained(theta) } -> std::convertible_to<Vector>;
};

template <DynamicsModel M>
using HistoryOf = History<typename M::State, typename M::Action>;

/// Sum of transition log-densities over consecutive records. The behaviour
/// distribution over actions and the initial-state density are known to the
/// decision maker and carry no information about theta, so only the f terms
/// appear.
template <DynamicsModel M>
double log_likelihood(const HistoryOf<M>& history, const M& model, const Vector& theta) {
  if (history.size() < 2)
    throw InsufficientDataError("log-likelihood needs at least 2 records, have " +
                                std::to_string(history.size()));
  double total = 0.0;
  for (std::size_t v = 1; v < history.size(); ++v) {
    total += model.log_density(history[v - 1].state, history[v - 1].action,
                               history[v].state, theta);
  }
  return total;
}

template <class M>
concept HasLoglikCache = requires(const M& m, const HistoryOf<M>& h) {
  { m.make_loglik(h) } -> std::convertible_to<std::function<double(const Vector&)>>;
};

/// Returns a callable theta -> log-likelihood. Models may provide
/// make_loglik(history) to precompute per-transition digests; the fallback
/// simply loops over log_density.
template <DynamicsModel M>
std::function<double(const Vector&)> loglik_function(const M& model,
                                                     const HistoryOf<M>& history) {
  if constexpr (HasLoglikCache<M>) {
    return model.make_loglik(history);
  } else {
    return [&model, &history](const Vector& theta) {
      return log_likelihood(history, model, theta);
    };
  }
}

/// A policy maps states to actions, deterministically up to its tie-break
/// stream.
template <class P, class S, class A>
concept PolicyFor = requires(const P& p, const S& s, RngStream& rng) {
  { p.act(s, rng) } -> std::convertible_to<A>;
};

/// Finite policy class: an explicit list of candidate policies.
template <class PC>
concept FinitePolicyClass = requires(const PC& pc, std::size_t i) {
  typename PC::PolicyType;
  { pc.size() } -> std::convertible_to<std::size_t>;
  { pc.policy(i) } -> std::convertible_to<const typename PC::PolicyType&>;
  { pc.params(i) } -> std::convertible_to<Vector>;
};

/// Continuous policy class indexed by a real vector eta.
template <class PC>
concept ParametricPolicyClass = requires(const PC& pc, const Vector& eta, RngStream& rng) {
  typename PC::PolicyType;
  { pc.dimension() } -> std::convertible_to<Eigen::Index>;
  { pc.make(eta) } -> std::convertible_to<typename PC::PolicyType>;
  { pc.initial_point(rng) } -> std::convertible_to<Vector>;
};

}  // namespace tsmdp
