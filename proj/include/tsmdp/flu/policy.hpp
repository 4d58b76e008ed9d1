#pragma once

#include <memory>

#include "tsmdp/flu/model.hpp"

namespace tsmdp::flu {

/// Model-implied probability that agents l and w meet during the upcoming
/// day: over each network edge joining them, the chance both attend that
/// network's venue. Venues are mutually exclusive per agent, so edge
/// contributions add.
double contact_probability(const FluTopology& topo, const FluPopulationState& state,
                           const FluParameters& params, int l, int w);

/// Feature matrix (population x 5): infected indicator, susceptible
/// indicator, age, susceptibility, and expected infectious-contact pressure
/// (sum of contact probabilities with counter-status agents; zero for the
/// recovered).
Matrix compute_features(const FluTopology& topo, const FluPopulationState& state,
                        const FluParameters& params);

/// Treats the m largest scores, breaking ties at the boundary uniformly.
FluAction select_top_m(const std::vector<double>& scores, int m, RngStream& rng);

/// Ranking policy: score every agent by features . eta and treat the top M.
class PriorityPolicy {
 public:
  PriorityPolicy(std::shared_ptr<const FluTopology> topo, FluParameters params,
                 Vector eta, int budget)
      : topo_(std::move(topo)), params_(params), eta_(std::move(eta)), budget_(budget) {}

  FluAction act(const FluPopulationState& state, RngStream& rng) const;

  const Vector& eta() const { return eta_; }
  int budget() const { return budget_; }

 private:
  std::shared_ptr<const FluTopology> topo_;
  FluParameters params_;
  Vector eta_;
  int budget_;
};

/// The eta-family over a fixed budget, instantiated per epoch with the
/// current parameter draw (the contact-pressure feature depends on it).
class FluPolicyClass {
 public:
  using PolicyType = PriorityPolicy;

  FluPolicyClass(std::shared_ptr<const FluTopology> topo, FluParameters params,
                 int budget)
      : topo_(std::move(topo)), params_(params), budget_(budget) {}

  Eigen::Index dimension() const { return 5; }
  PriorityPolicy make(const Vector& eta) const {
    return PriorityPolicy(topo_, params_, eta, budget_);
  }
  Vector initial_point(RngStream& rng) const {
    Vector eta(5);
    for (int i = 0; i < 5; ++i) eta[i] = rng.uniform(-1.0, 1.0);
    return eta;
  }

 private:
  std::shared_ptr<const FluTopology> topo_;
  FluParameters params_;
  int budget_;
};

struct NoTreatmentPolicy {
  int population;
  FluAction act(const FluPopulationState&, RngStream&) const {
    return FluAction(population, 0);
  }
};

/// Treats the M susceptible agents with the highest model-implied chance of
/// infection during the upcoming day, averaging over attendance randomness
/// analytically. Non-susceptible agents rank strictly below every
/// susceptible one.
class MyopicPolicy {
 public:
  MyopicPolicy(std::shared_ptr<const FluTopology> topo, FluParameters params, int budget)
      : topo_(std::move(topo)), params_(params), budget_(budget) {}

  FluAction act(const FluPopulationState& state, RngStream& rng) const;

  /// Expected infection probability for one susceptible agent, exact under
  /// independent attendance draws and no treatments.
  double risk(const FluPopulationState& state, int agent) const;

 private:
  std::shared_ptr<const FluTopology> topo_;
  FluParameters params_;
  int budget_;
};

}  // namespace tsmdp::flu
