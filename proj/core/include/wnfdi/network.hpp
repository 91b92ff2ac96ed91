#pragma once

#include <Eigen/Dense>

#include <string>
#include <unordered_map>
#include <vector>

namespace wnfdi {

// Water distribution network model. Junctions are demand nodes with unknown
// hydraulic head; tanks (reservoirs) hold a fixed head and act as sources.
//
// Node references are signed: junction i (1-based) is +i, tank t (1-based)
// is -t. Zero is never a valid reference.
using NodeRef = int;

inline bool is_junction(NodeRef r) { return r > 0; }
inline bool is_tank(NodeRef r) { return r < 0; }
inline int junction_index(NodeRef r) { return r; }
inline int tank_index(NodeRef r) { return -r; }

struct Junction {
  std::string id;
  double elevation_m = 0.0;
  double base_demand_m3s = 0.0;  // nominal extraction under a unit profile
};

struct Tank {
  std::string id;
  double head_m = 0.0;
};

struct Pipe {
  std::string id;
  NodeRef from = 0;
  NodeRef to = 0;
  double length_m = 0.0;
  double diameter_m = 0.0;
  double roughness = 0.0;  // Hazen-Williams coefficient C
};

struct Network {
  std::vector<Junction> junctions;  // junction i lives at junctions[i-1]
  std::vector<Tank> tanks;          // tank t lives at tanks[t-1]
  std::vector<Pipe> pipes;

  int n_junctions() const { return static_cast<int>(junctions.size()); }
  int n_tanks() const { return static_cast<int>(tanks.size()); }
  int n_pipes() const { return static_cast<int>(pipes.size()); }

  // Resolves a node id to a reference; throws validation_error if unknown.
  NodeRef node_ref(const std::string& id) const;
  const std::string& node_id(NodeRef r) const;
};

enum class NetworkFormat { native, inp_subset };

// Parses a network file.
//
// Native format: line oriented, '#' starts a comment, blank lines ignored.
//   [TANKS]      id head_m
//   [JUNCTIONS]  id elevation_m base_demand_m3s
//   [PIPES]      id from_id to_id length_m diameter_m roughness
//
// INP subset: only [JUNCTIONS] (id elev demand), [RESERVOIRS] (id head) and
// [PIPES] (id node1 node2 length diameter roughness) are read; ';' comments.
// Any other section is skipped with a warning on stderr. Values are taken
// verbatim (no unit conversion).
//
// Junction/tank indices follow file order of appearance. The parsed network
// is validated (see validate()).
Network parse_network(const std::string& path, NetworkFormat format);

// Same, from an in-memory string; `origin` labels error messages.
Network parse_network_text(const std::string& text, NetworkFormat format,
                           const std::string& origin = "<memory>");

// Writes the native format. Parsing the output reproduces the network
// exactly (ids, order and values); doubles are printed shortest round-trip.
// `header` lines, if given, are emitted as leading '#' comments.
void write_network(const Network& net, const std::string& path,
                   const std::vector<std::string>& header = {});
std::string write_network_text(const Network& net,
                               const std::vector<std::string>& header = {});

// Structural invariants: at least one tank and one junction, unique ids,
// resolvable pipe endpoints, positive length/diameter/roughness,
// non-negative demands, and connectivity (every node reachable from a tank).
// Throws validation_error naming the offending entity.
void validate(const Network& net);

// Signed incidence matrices. Column e describes pipe e with +1 at its `to`
// node and -1 at its `from` node; junction rows land in B, tank rows in Bf.
// Every column of the stacked matrix [B; Bf] sums to zero.
struct IncidenceMatrices {
  Eigen::MatrixXd B;   // n_junctions x n_pipes
  Eigen::MatrixXd Bf;  // n_tanks x n_pipes
};

IncidenceMatrices incidence(const Network& net);

enum class EdgeWeight { pipe_length, unit };

// All-pairs shortest path distances between junctions, treating pipes as
// undirected edges. Tanks are traversable intermediate nodes. Weighted by
// pipe length in meters or by hop count. Dijkstra per source; entries for
// unreachable pairs would be +inf, but validate() guarantees connectivity.
Eigen::MatrixXd shortest_paths(const Network& net, EdgeWeight weight);

// Junctions within k hops of junction i (hop = one pipe, tanks traversable
// but not reported), including i itself. Sorted ascending. k >= 0.
std::vector<int> k_hop_neighbors(const Network& net, int junction, int k);

// Partition of junctions into communities, used by the community-level
// localization score. community[i-1] is the 1-based community of junction i.
struct CommunityMap {
  std::vector<int> community;
  int n_communities = 0;
};

// Community file: one "node_id community_id" pair per line, '#' comments.
// Every junction must be assigned exactly once.
CommunityMap parse_communities(const std::string& path, const Network& net);
CommunityMap parse_communities_text(const std::string& text, const Network& net,
                                    const std::string& origin = "<memory>");

}  // namespace wnfdi
