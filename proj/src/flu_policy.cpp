#include "tsmdp/flu/policy.hpp"

#include <algorithm>
#include <numeric>

namespace tsmdp::flu {

namespace {

bool linked(const Adjacency& net, int a, int b) {
  const auto& n = net[a];
  return std::find(n.begin(), n.end(), b) != n.end();
}

std::vector<LocationProbs> all_location_probs(const FluTopology& topo,
                                              const FluPopulationState& state,
                                              const FluParameters& params) {
  const bool weekday = is_weekday(state.day);
  std::vector<LocationProbs> probs(topo.population);
  for (int i = 0; i < topo.population; ++i)
    probs[i] =
        attendance_distribution(topo.role[i], weekday, state.status[i] == 1, params);
  return probs;
}

}  // namespace

double contact_probability(const FluTopology& topo, const FluPopulationState& state,
                           const FluParameters& params, int l, int w) {
  const bool weekday = is_weekday(state.day);
  const LocationProbs pl =
      attendance_distribution(topo.role[l], weekday, state.status[l] == 1, params);
  const LocationProbs pw =
      attendance_distribution(topo.role[w], weekday, state.status[w] == 1, params);

  double total = 0.0;
  if (topo.family[l] == topo.family[w] && l != w) total += pl.home * pw.home;
  if (linked(topo.school_net, l, w)) total += pl.school * pw.school;
  if (linked(topo.work_net, l, w)) total += pl.work * pw.work;
  if (linked(topo.public_net, l, w)) total += pl.pub * pw.pub;
  return total;
}

Matrix compute_features(const FluTopology& topo, const FluPopulationState& state,
                        const FluParameters& params) {
  const int L = topo.population;
  Matrix features(L, 5);
  const auto probs = all_location_probs(topo, state, params);

  for (int i = 0; i < L; ++i) {
    features(i, 0) = state.status[i] == 1 ? 1.0 : 0.0;
    features(i, 1) = state.status[i] == 0 ? 1.0 : 0.0;
    features(i, 2) = topo.age[i];
    features(i, 3) = state.susceptibility[i];
    features(i, 4) = 0.0;
  }

  // Contact pressure: susceptible agents accumulate over infected partners
  // and vice versa. Only infected-susceptible pairs contribute, so walking
  // the infected agents' neighbourhoods covers every term once.
  auto accumulate = [&](int inf, int other, double pi_at, double po_at) {
    const double d = pi_at * po_at;
    if (d <= 0.0) return;
    features(inf, 4) += d;
    features(other, 4) += d;
  };
  for (int i = 0; i < L; ++i) {
    if (state.status[i] != 1) continue;
    const LocationProbs& pi = probs[i];
    for (std::int32_t w : topo.family_members[topo.family[i]])
      if (w != i && state.status[w] == 0) accumulate(i, w, pi.home, probs[w].home);
    for (std::int32_t w : topo.school_net[i])
      if (state.status[w] == 0) accumulate(i, w, pi.school, probs[w].school);
    for (std::int32_t w : topo.work_net[i])
      if (state.status[w] == 0) accumulate(i, w, pi.work, probs[w].work);
    for (std::int32_t w : topo.public_net[i])
      if (state.status[w] == 0) accumulate(i, w, pi.pub, probs[w].pub);
  }

  // The pressure feature is defined through the infected/susceptible
  // indicator pair; recovered agents keep an exact zero.
  for (int i = 0; i < L; ++i)
    if (state.status[i] == 2) features(i, 4) = 0.0;
  return features;
}

FluAction select_top_m(const std::vector<double>& scores, int m, RngStream& rng) {
  const int L = static_cast<int>(scores.size());
  FluAction action(L, 0);
  const int budget = std::min(m, L);
  if (budget <= 0) return action;
  if (budget == L) {
    std::fill(action.begin(), action.end(), 1);
    return action;
  }

  std::vector<std::int32_t> order(L);
  std::iota(order.begin(), order.end(), 0);
  std::nth_element(order.begin(), order.begin() + (budget - 1), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  const double boundary = scores[order[budget - 1]];

  std::vector<std::int32_t> tied;
  int above = 0;
  for (int i = 0; i < L; ++i) {
    if (scores[i] > boundary)
      ++above, action[i] = 1;
    else if (scores[i] == boundary)
      tied.push_back(i);
  }

  int remaining = budget - above;
  for (int k = 0; remaining > 0; ++k, --remaining) {
    const int j = k + static_cast<int>(rng.uniform_index(tied.size() - k));
    std::swap(tied[k], tied[j]);
    action[tied[k]] = 1;
  }
  return action;
}

FluAction PriorityPolicy::act(const FluPopulationState& state, RngStream& rng) const {
  const Matrix features = compute_features(*topo_, state, params_);
  const Vector scores = features * eta_;
  return select_top_m({scores.data(), scores.data() + scores.size()}, budget_, rng);
}

double MyopicPolicy::risk(const FluPopulationState& state, int agent) const {
  const FluTopology& topo = *topo_;
  const bool weekday = is_weekday(state.day);
  const LocationProbs own =
      attendance_distribution(topo.role[agent], weekday, false, params_);

  // Condition on the agent's own venue; infected partners' attendance draws
  // are independent given that, so the no-infection factors multiply.
  double risk = 0.0;
  auto venue_term = [&](Loc venue, double p_here) {
    if (p_here <= 0.0) return;
    double no_infection = 1.0;
    auto fold = [&](std::int32_t w) {
      if (state.status[w] != 1) return;
      const double p_w =
          attendance_distribution(topo.role[w], weekday, true, params_).at(venue);
      if (p_w <= 0.0) return;
      const double q = per_contact_probability(params_, topo.age[agent],
                                               state.susceptibility[agent], 0, 0,
                                               topo.age[w]);
      no_infection *= 1.0 - p_w * q;
    };
    switch (venue) {
      case Loc::kHome:
        for (std::int32_t w : topo.family_members[topo.family[agent]])
          if (w != agent) fold(w);
        break;
      case Loc::kSchool:
        for (std::int32_t w : topo.school_net[agent]) fold(w);
        break;
      case Loc::kWork:
        for (std::int32_t w : topo.work_net[agent]) fold(w);
        break;
      case Loc::kPublic:
        for (std::int32_t w : topo.public_net[agent]) fold(w);
        break;
    }
    risk += p_here * (1.0 - no_infection);
  };
  venue_term(Loc::kHome, own.home);
  venue_term(Loc::kSchool, own.school);
  venue_term(Loc::kWork, own.work);
  venue_term(Loc::kPublic, own.pub);
  return risk;
}

FluAction MyopicPolicy::act(const FluPopulationState& state, RngStream& rng) const {
  const int L = topo_->population;
  std::vector<double> scores(L, -1.0);
  for (int i = 0; i < L; ++i)
    if (state.status[i] == 0) scores[i] = risk(state, i);
  return select_top_m(scores, budget_, rng);
}

}  // namespace tsmdp::flu
