#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsmdp/errors.hpp"
#include "tsmdp/rng.hpp"

namespace tsmdp::flu {

enum class Role : std::uint8_t { kStudent = 0, kEmployed = 1, kRetired = 2 };

enum class NetworkKind { kBarabasiAlbert, kErdosRenyi, kWattsStrogatz };

NetworkKind network_kind_from_name(const std::string& name);
const char* network_kind_name(NetworkKind kind);

using Adjacency = std::vector<std::vector<std::int32_t>>;

/// Undirected, simple graphs over n nodes.
/// Barabasi-Albert: seed clique of m+1 nodes, each arrival attaches m edges
/// preferentially. Erdos-Renyi: each pair independently with probability p.
/// Watts-Strogatz: even-degree ring lattice with per-edge rewiring.
Adjacency barabasi_albert(int n, int edges_per_node, RngStream& rng);
Adjacency erdos_renyi(int n, double edge_prob, RngStream& rng);
Adjacency watts_strogatz(int n, int degree, double rewire_prob, RngStream& rng);

std::size_t edge_count(const Adjacency& adj);

/// Random partition into families of size 1-15: draw sizes uniformly until
/// fewer than 16 agents remain, who form the last family.
std::vector<std::int32_t> partition_families(int population, RngStream& rng);

struct TopologyConfig {
  int population = 1000;
  NetworkKind kind = NetworkKind::kBarabasiAlbert;
  double student_fraction = 0.25;
  double employed_fraction = 0.55;  // the rest are retired
  int people_per_school = 500;      // n_s = max(1, L / people_per_school)
  int people_per_employer = 50;
  int ba_edges_per_node = 4;
  double er_edge_prob = -1.0;  // negative: resolved to 8/(L-1)
  int ws_degree = 8;
  double ws_rewire_prob = 0.1;
};

/// Immutable population structure: who everyone is and which graphs they
/// can meet on. Shared read-only between the simulator, the likelihood and
/// the policies.
struct FluTopology {
  int population = 0;
  std::vector<Role> role;
  std::vector<std::int16_t> age;
  std::vector<std::int32_t> family;  // family id per agent
  std::vector<std::vector<std::int32_t>> family_members;
  std::vector<std::int32_t> school;  // -1 unless a student
  std::vector<std::int32_t> work;    // -1 unless employed
  int n_schools = 0;
  int n_employers = 0;
  Adjacency public_net;
  Adjacency school_net;  // edges only between members of the same school
  Adjacency work_net;
};

FluTopology build_topology(const TopologyConfig& config, RngStream& rng);

inline bool is_weekday(int day) { return day % 7 < 5; }  // day 0 is a Monday

}  // namespace tsmdp::flu
