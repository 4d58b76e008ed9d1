#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>

#include "tsmdp/errors.hpp"
#include "tsmdp/estimation.hpp"
#include "tsmdp/model.hpp"
#include "tsmdp/policy_eval.hpp"
#include "tsmdp/rng.hpp"

namespace tsmdp {

/// Rollout horizon r_t = max(1, floor(-log t / log gamma^2)). Balancing the
/// truncation bias gamma^{r_t} against the 1/sqrt(t) estimation noise gives
/// the fastest attainable regret decay; the clamp covers t = 1 where the raw
/// formula yields zero.
inline int truncation_horizon(std::int64_t t, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in (0,1)");
  if (t < 1) throw DomainError("t must be >= 1");
  const double raw = -std::log(static_cast<double>(t)) / std::log(gamma * gamma);
  return std::max(1, static_cast<int>(std::floor(raw)));
}

/// Sampling-distribution approximation of the posterior:
/// Normal(theta_hat, covariance / sample_count).
struct ParameterPosterior {
  Vector theta_hat;
  Matrix covariance;  // Omega-hat, the asymptotic variance scale
  std::int64_t sample_count = 1;
};

/// Symmetric factor L with L L^T = S, via eigendecomposition. Eigenvalues
/// below -1e-10 are a hard error; small negatives are clipped to zero since
/// numerical Hessians are nearly-PSD at best.
inline Matrix symmetric_sqrt(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  Vector ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -1e-10)
      throw NumericError("covariance has eigenvalue " + std::to_string(ev[i]));
    ev[i] = ev[i] > 0.0 ? std::sqrt(ev[i]) : 0.0;
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

/// theta_hat + L z / sqrt(sample_count). The parameter space is all of R^q
/// on the unconstrained scale, so the projection onto it is the identity.
inline Vector draw_perturbed_parameters(const ParameterPosterior& posterior,
                                        RngStream& rng) {
  const Matrix L = symmetric_sqrt(posterior.covariance);
  Vector z(posterior.theta_hat.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return posterior.theta_hat +
         L * z / std::sqrt(static_cast<double>(posterior.sample_count));
}

struct EngineConfig {
  double gamma = 0.95;
  int rollouts_per_eval = 256;
  int policy_search_budget = 512;  // max value evaluations inside one argmax
  int restarts = 3;                // simplex restarts for continuous classes
  int min_fit_epochs = 5;          // use the warm start below this history length
  int refit_every = 1;             // recompute (theta_hat, Omega) every k epochs
  FitOptions fit;
  std::uint64_t master_seed = 0;
};

/// Default estimator: maximum likelihood with observed-information
/// covariance.
struct MleEstimator {
  template <DynamicsModel M>
  FitResult operator()(const M& model, const HistoryOf<M>& history, const Vector& init,
                       const FitOptions& opts) const {
    return fit_mle(history, model, init, opts);
  }
};

template <DynamicsModel M>
struct EpochDiagnostics {
  std::int64_t t = 0;
  int horizon = 0;
  Vector theta_tilde;
  Vector policy_params;
  double value_mean = 0.0;
  double value_se = 0.0;
  bool refit = false;
  bool fit_converged = false;
  bool pinv_used = false;
  bool budget_exhausted = false;
};

/// One online decision process: act / observe / update. The loop itself is
/// strictly sequential; all randomness is drawn from streams keyed by
/// (master_seed, epoch, purpose) so a rerun is bit-identical.
///
/// MakePolicyClass receives the current parameter draw and returns the class
/// to maximize over; environment-side feature maps that depend on the
/// sampled dynamics hook in there.
template <DynamicsModel M, class MakePolicyClass, class Estimator = MleEstimator>
class ThompsonEngine {
 public:
  using State = typename M::State;
  using Action = typename M::Action;
  using PolicyClassType = std::invoke_result_t<MakePolicyClass, const Vector&>;
  using Diagnostics = EpochDiagnostics<M>;

  ThompsonEngine(M model, MakePolicyClass make_policy_class, EngineConfig config,
                 Vector theta_warm_start, Estimator estimator = {})
      : model_(std::move(model)),
        make_policy_class_(std::move(make_policy_class)),
        config_(std::move(config)),
        theta_tilde_(theta_warm_start),
        theta_warm_(std::move(theta_warm_start)),
        estimator_(std::move(estimator)),
        streams_(config_.master_seed) {}

  /// Runs decision epoch t: refreshes the parameter draw from the history,
  /// maximizes the truncated value over the policy class, acts, and records
  /// the observed transition. `env` supplies the real system response:
  /// (state, action, rng) -> Transition.
  template <class Env>
  std::pair<Action, Diagnostics> step(const State& state, Env&& env) {
    const std::int64_t t = ++epoch_;
    Diagnostics diag;
    diag.t = t;

    refresh_parameter_draw(diag);
    diag.theta_tilde = theta_tilde_;

    const int horizon = truncation_horizon(t, config_.gamma);
    diag.horizon = horizon;

    auto policy_class = make_policy_class_(theta_tilde_);
    OptimizeOptions opts;
    opts.rollouts = config_.rollouts_per_eval;
    opts.gamma = config_.gamma;
    opts.eval_budget = config_.policy_search_budget;
    opts.restarts = config_.restarts;
    auto search =
        optimize_policy(model_, theta_tilde_, policy_class, horizon, state, opts,
                        streams_.child(stream_tag::kPolicySearch).child(t));
    diag.policy_params = search.params;
    diag.value_mean = search.value.mean;
    diag.value_se = search.value.standard_error;
    diag.budget_exhausted = search.budget_exhausted;

    auto tie_rng = streams_.child(stream_tag::kTieBreak).stream(t);
    Action action = search.policy.act(state, tie_rng);

    auto env_rng = streams_.child(stream_tag::kEnvironment).stream(t);
    Transition<State> obs = env(state, action, env_rng);
    history_.append(state, action, obs.utility);
    last_next_state_ = obs.next;

    return {std::move(action), std::move(diag)};
  }

  const State& last_next_state() const { return *last_next_state_; }
  const History<State, Action>& history() const { return history_; }
  const Vector& theta_tilde() const { return theta_tilde_; }
  const std::optional<ParameterPosterior>& posterior() const { return posterior_; }

  /// Seeds the engine with pre-management records (e.g. monitoring data
  /// collected before the decision process starts).
  void preload_history(History<State, Action> h) {
    history_ = std::move(h);
    epoch_ = static_cast<std::int64_t>(history_.size());
  }

 private:
  void refresh_parameter_draw(Diagnostics& diag) {
    const auto n = static_cast<std::int64_t>(history_.size());
    if (n < config_.min_fit_epochs || n < 2) {
      theta_tilde_ = theta_warm_;
      return;
    }
    const bool refit_now =
        !posterior_ || (epoch_ - last_fit_epoch_) >= config_.refit_every;
    if (refit_now) {
      try {
        const Vector init = theta_hat_ ? *theta_hat_ : theta_warm_;
        FitResult fit = estimator_(model_, history_, init, config_.fit);
        theta_hat_ = fit.theta_hat;
        posterior_ = ParameterPosterior{fit.theta_hat, fit.covariance, n};
        last_fit_epoch_ = epoch_;
        diag.refit = true;
        diag.fit_converged = fit.converged;
        diag.pinv_used = fit.pinv_used;
      } catch (const Error&) {
        // Ill-posed fit (typically a near-empty or degenerate history):
        // keep sampling from whatever we had, or the warm start.
        if (!posterior_) {
          theta_tilde_ = theta_warm_;
          return;
        }
      }
    }
    posterior_->sample_count = n;
    auto rng = streams_.child(stream_tag::kPosteriorDraw).stream(epoch_);
    theta_tilde_ = draw_perturbed_parameters(*posterior_, rng);
  }

  M model_;
  MakePolicyClass make_policy_class_;
  EngineConfig config_;
  History<State, Action> history_;
  Vector theta_tilde_;
  Vector theta_warm_;
  std::optional<Vector> theta_hat_;
  std::optional<ParameterPosterior> posterior_;
  std::optional<State> last_next_state_;
  Estimator estimator_;
  StreamFactory streams_;
  std::int64_t epoch_ = 0;
  std::int64_t last_fit_epoch_ = -1;
};

}  // namespace tsmdp
