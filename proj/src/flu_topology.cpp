#include "tsmdp/flu/topology.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace tsmdp::flu {

NetworkKind network_kind_from_name(const std::string& name) {
  if (name == "BA" || name == "barabasi-albert") return NetworkKind::kBarabasiAlbert;
  if (name == "ER" || name == "erdos-renyi") return NetworkKind::kErdosRenyi;
  if (name == "WS" || name == "watts-strogatz") return NetworkKind::kWattsStrogatz;
  throw ConfigError("unknown network kind '" + name + "'");
}

const char* network_kind_name(NetworkKind kind) {
  switch (kind) {
    case NetworkKind::kBarabasiAlbert: return "BA";
    case NetworkKind::kErdosRenyi: return "ER";
    case NetworkKind::kWattsStrogatz: return "WS";
  }
  return "?";
}

namespace {

void add_edge(Adjacency& adj, int a, int b) {
  adj[a].push_back(b);
  adj[b].push_back(a);
}

bool has_edge(const Adjacency& adj, int a, int b) {
  const auto& n = adj[a];
  return std::find(n.begin(), n.end(), b) != n.end();
}

}  // namespace

Adjacency barabasi_albert(int n, int edges_per_node, RngStream& rng) {
  if (n < 1) throw ParameterError("network size must be >= 1");
  const int m = edges_per_node;
  if (m < 1 || m >= n)
    throw ParameterError("preferential attachment needs 1 <= m < n");

  Adjacency adj(n);
  // Seed clique of m+1 nodes so every arrival finds m attachment targets.
  const int seed = m + 1;
  for (int a = 0; a < seed; ++a)
    for (int b = a + 1; b < seed; ++b) add_edge(adj, a, b);

  // Degree-proportional sampling via the repeated-endpoint list.
  std::vector<std::int32_t> endpoints;
  endpoints.reserve(2 * (seed * (seed - 1) / 2 + static_cast<std::size_t>(m) * n));
  for (int a = 0; a < seed; ++a)
    for (std::int32_t b : adj[a]) {
      (void)b;
      endpoints.push_back(a);
    }

  for (int v = seed; v < n; ++v) {
    std::set<int> targets;
    while (static_cast<int>(targets.size()) < m) {
      const int candidate = endpoints[rng.uniform_index(endpoints.size())];
      targets.insert(candidate);
    }
    for (int t : targets) {
      add_edge(adj, v, t);
      endpoints.push_back(v);
      endpoints.push_back(t);
    }
  }
  return adj;
}

Adjacency erdos_renyi(int n, double edge_prob, RngStream& rng) {
  if (n < 1) throw ParameterError("network size must be >= 1");
  if (edge_prob < 0.0 || edge_prob > 1.0)
    throw ParameterError("edge probability outside [0, 1]");
  Adjacency adj(n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (rng.bernoulli(edge_prob)) add_edge(adj, a, b);
  return adj;
}

Adjacency watts_strogatz(int n, int degree, double rewire_prob, RngStream& rng) {
  if (n < 1) throw ParameterError("network size must be >= 1");
  if (degree >= n) throw ParameterError("lattice degree must be below n");
  if (degree % 2 != 0) throw ParameterError("lattice degree must be even");

  Adjacency adj(n);
  for (int v = 0; v < n; ++v)
    for (int k = 1; k <= degree / 2; ++k) add_edge(adj, v, (v + k) % n);

  if (rewire_prob <= 0.0 || n <= degree + 1) return adj;

  for (int v = 0; v < n; ++v) {
    for (int k = 1; k <= degree / 2; ++k) {
      const int old = (v + k) % n;
      if (!rng.bernoulli(rewire_prob)) continue;
      if (!has_edge(adj, v, old)) continue;  // already rewired away
      int fresh = v;
      int guard = 0;
      do {
        fresh = static_cast<int>(rng.uniform_index(n));
      } while ((fresh == v || has_edge(adj, v, fresh)) && ++guard < 64 * n);
      if (fresh == v || has_edge(adj, v, fresh)) continue;  // saturated node
      adj[v].erase(std::find(adj[v].begin(), adj[v].end(), old));
      adj[old].erase(std::find(adj[old].begin(), adj[old].end(), v));
      add_edge(adj, v, fresh);
    }
  }
  return adj;
}

std::size_t edge_count(const Adjacency& adj) {
  std::size_t degree_sum = 0;
  for (const auto& n : adj) degree_sum += n.size();
  return degree_sum / 2;
}

std::vector<std::int32_t> partition_families(int population, RngStream& rng) {
  if (population < 1) throw ParameterError("population must be >= 1");
  std::vector<std::int32_t> family(population);
  int next = 0;
  std::int32_t id = 0;
  while (population - next >= 16) {
    const int size = 1 + static_cast<int>(rng.uniform_index(15));
    for (int i = 0; i < size; ++i) family[next++] = id;
    ++id;
  }
  while (next < population) family[next++] = id;
  return family;
}

namespace {

// Applies the configured generator to one institution's member list,
// shrinking parameters when the institution is smaller than they assume.
void overlay_institution(Adjacency& out, const std::vector<std::int32_t>& members,
                         const TopologyConfig& cfg, RngStream& rng) {
  const int n = static_cast<int>(members.size());
  if (n < 2) return;
  Adjacency local;
  switch (cfg.kind) {
    case NetworkKind::kBarabasiAlbert: {
      const int m = std::min(cfg.ba_edges_per_node, n - 1);
      local = barabasi_albert(n, m, rng);
      break;
    }
    case NetworkKind::kErdosRenyi: {
      const double p = cfg.er_edge_prob < 0.0
                           ? std::min(1.0, 8.0 / std::max(1, n - 1))
                           : cfg.er_edge_prob;
      local = erdos_renyi(n, p, rng);
      break;
    }
    case NetworkKind::kWattsStrogatz: {
      int k = std::min(cfg.ws_degree, n - 1);
      if (k % 2 != 0) --k;
      if (k < 2) {
        local = erdos_renyi(n, 1.0, rng);  // trivially small group: connect it
        break;
      }
      local = watts_strogatz(n, k, cfg.ws_rewire_prob, rng);
      break;
    }
  }
  for (int a = 0; a < n; ++a)
    for (std::int32_t b : local[a])
      if (a < b) add_edge(out, members[a], members[b]);
}

}  // namespace

FluTopology build_topology(const TopologyConfig& cfg, RngStream& rng) {
  const int L = cfg.population;
  if (L < 1) throw ParameterError("population must be >= 1");

  FluTopology topo;
  topo.population = L;

  // Roles: fixed counts, randomly placed.
  const int n_students = static_cast<int>(cfg.student_fraction * L);
  const int n_employed = static_cast<int>(cfg.employed_fraction * L);
  std::vector<std::int32_t> order(L);
  std::iota(order.begin(), order.end(), 0);
  for (int i = L - 1; i > 0; --i)
    std::swap(order[i], order[rng.uniform_index(i + 1)]);

  topo.role.assign(L, Role::kRetired);
  for (int i = 0; i < n_students; ++i) topo.role[order[i]] = Role::kStudent;
  for (int i = n_students; i < n_students + n_employed && i < L; ++i)
    topo.role[order[i]] = Role::kEmployed;

  topo.age.resize(L);
  for (int i = 0; i < L; ++i) {
    switch (topo.role[i]) {
      case Role::kStudent: topo.age[i] = static_cast<std::int16_t>(rng.uniform_int(1, 25)); break;
      case Role::kEmployed: topo.age[i] = static_cast<std::int16_t>(rng.uniform_int(15, 65)); break;
      case Role::kRetired: topo.age[i] = static_cast<std::int16_t>(rng.uniform_int(50, 90)); break;
    }
  }

  topo.family = partition_families(L, rng);
  const int n_families = topo.family.empty() ? 0 : *std::max_element(topo.family.begin(),
                                                                     topo.family.end()) + 1;
  topo.family_members.resize(n_families);
  for (int i = 0; i < L; ++i) topo.family_members[topo.family[i]].push_back(i);

  topo.n_schools = std::max(1, L / cfg.people_per_school);
  topo.n_employers = std::max(1, L / cfg.people_per_employer);
  topo.school.assign(L, -1);
  topo.work.assign(L, -1);
  std::vector<std::vector<std::int32_t>> school_members(topo.n_schools);
  std::vector<std::vector<std::int32_t>> employer_members(topo.n_employers);
  for (int i = 0; i < L; ++i) {
    if (topo.role[i] == Role::kStudent) {
      topo.school[i] = static_cast<std::int32_t>(rng.uniform_index(topo.n_schools));
      school_members[topo.school[i]].push_back(i);
    } else if (topo.role[i] == Role::kEmployed) {
      topo.work[i] = static_cast<std::int32_t>(rng.uniform_index(topo.n_employers));
      employer_members[topo.work[i]].push_back(i);
    }
  }

  if (L < 2) {
    topo.public_net.resize(L);
  } else {
    switch (cfg.kind) {
      case NetworkKind::kBarabasiAlbert: {
        const int m = std::min(cfg.ba_edges_per_node, L - 1);
        topo.public_net = barabasi_albert(L, m, rng);
        break;
      }
      case NetworkKind::kErdosRenyi: {
        const double p = cfg.er_edge_prob < 0.0
                             ? std::min(1.0, 8.0 / std::max(1, L - 1))
                             : cfg.er_edge_prob;
        topo.public_net = erdos_renyi(L, p, rng);
        break;
      }
      case NetworkKind::kWattsStrogatz: {
        int k = std::min(cfg.ws_degree, L - 1);
        if (k % 2 != 0) --k;
        topo.public_net = k >= 2 ? watts_strogatz(L, k, cfg.ws_rewire_prob, rng)
                                 : erdos_renyi(L, 1.0, rng);
        break;
      }
    }
  }

  topo.school_net.resize(L);
  topo.work_net.resize(L);
  for (const auto& members : school_members)
    overlay_institution(topo.school_net, members, cfg, rng);
  for (const auto& members : employer_members)
    overlay_institution(topo.work_net, members, cfg, rng);
  return topo;
}

}  // namespace tsmdp::flu
