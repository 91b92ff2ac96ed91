#include <wnfdi/errors.hpp>
#include <wnfdi/netgen.hpp>
#include <wnfdi/network.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <queue>
#include <string>
#include <vector>

using namespace wnfdi;

namespace {

const char* kSmallNet = R"(# three junctions fed by one tank
[TANKS]
t1 50.0
[JUNCTIONS]
j1 0.0 0.01
j2 0.0 0.02
j3 0.0 0.005
[PIPES]
p1 t1 j1 800 0.3 120
p2 j1 j2 600 0.25 110
p3 j2 j3 400 0.2 100
p4 j1 j3 900 0.2 130
)";

// Independent all-pairs oracle: Floyd-Warshall over the full node set
// (junctions then tanks), undirected, then the junction block is returned.
Eigen::MatrixXd floyd_warshall(const Network& net, EdgeWeight weight) {
  int nj = net.n_junctions(), nt = net.n_tanks();
  int n = nj + nt;
  double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, inf);
  for (int i = 0; i < n; ++i) d(i, i) = 0.0;
  auto flat = [&](NodeRef r) {
    return is_junction(r) ? junction_index(r) - 1 : nj + tank_index(r) - 1;
  };
  for (const Pipe& p : net.pipes) {
    int a = flat(p.from), b = flat(p.to);
    double w = weight == EdgeWeight::pipe_length ? p.length_m : 1.0;
    d(a, b) = std::min(d(a, b), w);
    d(b, a) = std::min(d(b, a), w);
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (d(i, k) + d(k, j) < d(i, j)) d(i, j) = d(i, k) + d(k, j);
  return d.topLeftCorner(nj, nj);
}

// Independent k-hop oracle: breadth-first search counting pipe hops; tanks
// are traversable but never reported.
std::vector<int> bfs_k_hop(const Network& net, int junction, int k) {
  int nj = net.n_junctions(), n = nj + net.n_tanks();
  auto flat = [&](NodeRef r) {
    return is_junction(r) ? junction_index(r) - 1 : nj + tank_index(r) - 1;
  };
  std::vector<std::vector<int>> adj(n);
  for (const Pipe& p : net.pipes) {
    adj[flat(p.from)].push_back(flat(p.to));
    adj[flat(p.to)].push_back(flat(p.from));
  }
  std::vector<int> dist(n, -1);
  std::queue<int> q;
  dist[junction - 1] = 0;
  q.push(junction - 1);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    if (dist[u] == k) continue;
    for (int v : adj[u])
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
  }
  std::vector<int> out;
  for (int i = 0; i < nj; ++i)
    if (dist[i] >= 0 && dist[i] <= k) out.push_back(i + 1);
  return out;
}

}  // namespace

TEST(Network, ParseNative) {
  Network net = parse_network_text(kSmallNet, NetworkFormat::native);
  ASSERT_EQ(net.n_junctions(), 3);
  ASSERT_EQ(net.n_tanks(), 1);
  ASSERT_EQ(net.n_pipes(), 4);
  EXPECT_EQ(net.junctions[1].id, "j2");
  EXPECT_DOUBLE_EQ(net.junctions[1].base_demand_m3s, 0.02);
  EXPECT_DOUBLE_EQ(net.tanks[0].head_m, 50.0);
  EXPECT_EQ(net.pipes[0].from, net.node_ref("t1"));
  EXPECT_EQ(net.pipes[0].to, net.node_ref("j1"));
  EXPECT_TRUE(is_tank(net.node_ref("t1")));
  EXPECT_EQ(junction_index(net.node_ref("j3")), 3);
}

TEST(Network, WriteParseRoundTrip) {
  Network net = parse_network_text(kSmallNet, NetworkFormat::native);
  std::string text = write_network_text(net, {"round trip"});
  Network again = parse_network_text(text, NetworkFormat::native);
  ASSERT_EQ(again.n_junctions(), net.n_junctions());
  ASSERT_EQ(again.n_pipes(), net.n_pipes());
  for (int i = 0; i < net.n_junctions(); ++i) {
    EXPECT_EQ(again.junctions[i].id, net.junctions[i].id);
    EXPECT_EQ(again.junctions[i].base_demand_m3s,
              net.junctions[i].base_demand_m3s);
  }
  for (int e = 0; e < net.n_pipes(); ++e) {
    EXPECT_EQ(again.pipes[e].from, net.pipes[e].from);
    EXPECT_EQ(again.pipes[e].to, net.pipes[e].to);
    EXPECT_EQ(again.pipes[e].roughness, net.pipes[e].roughness);
  }
  // Serialization is canonical: writing the reparse reproduces the bytes.
  EXPECT_EQ(write_network_text(again, {"round trip"}), text);
}

TEST(Network, ParseInpSubset) {
  const char* inp = R"([RESERVOIRS]
r1  42.0
[JUNCTIONS]
n1  1.0  0.004  ; trailing comment
n2  2.0  0.006
[PIPES]
p1  r1  n1  500  0.3  120
p2  n1  n2  300  0.2  110
[OPTIONS]
units si
)";
  Network net = parse_network_text(inp, NetworkFormat::inp_subset);
  ASSERT_EQ(net.n_junctions(), 2);
  ASSERT_EQ(net.n_tanks(), 1);
  ASSERT_EQ(net.n_pipes(), 2);
  EXPECT_DOUBLE_EQ(net.tanks[0].head_m, 42.0);
  EXPECT_DOUBLE_EQ(net.junctions[1].elevation_m, 2.0);
}

TEST(Network, ValidationErrors) {
  // Duplicate id.
  EXPECT_THROW(parse_network_text(R"([TANKS]
t 10
[JUNCTIONS]
a 0 0.01
a 0 0.01
[PIPES]
p1 t a 100 0.2 100
)",
                                  NetworkFormat::native),
               validation_error);
  // Unknown pipe endpoint.
  EXPECT_THROW(parse_network_text(R"([TANKS]
t 10
[JUNCTIONS]
a 0 0.01
[PIPES]
p1 t nope 100 0.2 100
)",
                                  NetworkFormat::native),
               validation_error);
  // Disconnected junction.
  EXPECT_THROW(parse_network_text(R"([TANKS]
t 10
[JUNCTIONS]
a 0 0.01
b 0 0.01
[PIPES]
p1 t a 100 0.2 100
)",
                                  NetworkFormat::native),
               validation_error);
  // Nonpositive diameter.
  EXPECT_THROW(parse_network_text(R"([TANKS]
t 10
[JUNCTIONS]
a 0 0.01
[PIPES]
p1 t a 100 0 100
)",
                                  NetworkFormat::native),
               validation_error);
  // No tank at all.
  EXPECT_THROW(parse_network_text(R"([JUNCTIONS]
a 0 0.01
)",
                                  NetworkFormat::native),
               validation_error);
}

TEST(Network, IncidenceStructure) {
  Network net = parse_network_text(kSmallNet, NetworkFormat::native);
  IncidenceMatrices inc = incidence(net);
  ASSERT_EQ(inc.B.rows(), 3);
  ASSERT_EQ(inc.B.cols(), 4);
  ASSERT_EQ(inc.Bf.rows(), 1);
  // Every stacked column sums to zero and holds exactly one +1 and one -1.
  for (int e = 0; e < 4; ++e) {
    Eigen::VectorXd col(4);
    col << inc.B(0, e), inc.B(1, e), inc.B(2, e), inc.Bf(0, e);
    EXPECT_DOUBLE_EQ(col.sum(), 0.0);
    EXPECT_DOUBLE_EQ(col.cwiseAbs().sum(), 2.0);
    EXPECT_DOUBLE_EQ(col.maxCoeff(), 1.0);
    EXPECT_DOUBLE_EQ(col.minCoeff(), -1.0);
  }
  // Pipe p2 runs j1 -> j2: -1 at j1, +1 at j2.
  EXPECT_DOUBLE_EQ(inc.B(0, 1), -1.0);
  EXPECT_DOUBLE_EQ(inc.B(1, 1), 1.0);
}

TEST(Network, ShortestPathsMatchFloydWarshall) {
  for (std::uint64_t seed : {3u, 7u, 21u}) {
    GenSpec spec;
    spec.n_junctions = 24;
    spec.n_pipes = 31;
    spec.seed = seed;
    Network net = generate_network(spec);
    for (EdgeWeight w : {EdgeWeight::pipe_length, EdgeWeight::unit}) {
      Eigen::MatrixXd got = shortest_paths(net, w);
      Eigen::MatrixXd want = floyd_warshall(net, w);
      ASSERT_EQ(got.rows(), want.rows());
      EXPECT_LE((got - want).cwiseAbs().maxCoeff(), 1e-9)
          << "seed " << seed << " weight " << static_cast<int>(w);
    }
  }
}

TEST(Network, ShortestPathsSymmetricZeroDiagonal) {
  Network net = hanoi_like_network();
  Eigen::MatrixXd d = shortest_paths(net, EdgeWeight::pipe_length);
  EXPECT_LE((d - d.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_DOUBLE_EQ(d.diagonal().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(d.minCoeff(), -1e-12);
}

TEST(Network, KHopMatchesBfs) {
  GenSpec spec;
  spec.n_junctions = 30;
  spec.n_pipes = 40;
  spec.seed = 5;
  Network net = generate_network(spec);
  for (int j : {1, 7, 15, 30})
    for (int k = 0; k <= 3; ++k) {
      std::vector<int> got = k_hop_neighbors(net, j, k);
      std::vector<int> want = bfs_k_hop(net, j, k);
      EXPECT_EQ(got, want) << "junction " << j << " k " << k;
      EXPECT_TRUE(std::is_sorted(got.begin(), got.end()));
    }
  // k = 0 is the junction itself.
  EXPECT_EQ(k_hop_neighbors(net, 4, 0), std::vector<int>{4});
}

TEST(Network, TankIsTraversableForHops) {
  // Two junctions joined only through the tank: one hop each to the tank,
  // two hops junction to junction.
  const char* text = R"([TANKS]
t 30
[JUNCTIONS]
a 0 0.01
b 0 0.01
[PIPES]
p1 t a 100 0.2 100
p2 t b 100 0.2 100
)";
  Network net = parse_network_text(text, NetworkFormat::native);
  EXPECT_EQ(k_hop_neighbors(net, 1, 1), std::vector<int>{1});
  EXPECT_EQ(k_hop_neighbors(net, 1, 2), (std::vector<int>{1, 2}));
}

TEST(Network, Communities) {
  Network net = parse_network_text(kSmallNet, NetworkFormat::native);
  CommunityMap cm = parse_communities_text(R"(# comment
j1 1
j2 2
j3 1
)",
                                           net);
  EXPECT_EQ(cm.n_communities, 2);
  EXPECT_EQ(cm.community, (std::vector<int>{1, 2, 1}));
  // Missing assignment.
  EXPECT_THROW(parse_communities_text("j1 1\nj2 1\n", net), validation_error);
  // Unknown node.
  EXPECT_THROW(parse_communities_text("j1 1\nj2 1\nj3 1\nj9 2\n", net),
               validation_error);
  // Duplicate assignment.
  EXPECT_THROW(parse_communities_text("j1 1\nj2 1\nj3 1\nj1 2\n", net),
               validation_error);
}
