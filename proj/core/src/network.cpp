#include "wnfdi/network.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <queue>

#include "wnfdi/errors.hpp"
#include "textio.hpp"

namespace wnfdi {

namespace tio = textio;

std::string textio::read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open file: " + path);
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) throw io_error("read failure: " + path);
  return data;
}

void textio::write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open file for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw io_error("write failure: " + path);
}

NodeRef Network::node_ref(const std::string& id) const {
  for (int i = 0; i < n_junctions(); ++i)
    if (junctions[static_cast<std::size_t>(i)].id == id) return i + 1;
  for (int t = 0; t < n_tanks(); ++t)
    if (tanks[static_cast<std::size_t>(t)].id == id) return -(t + 1);
  throw validation_error("unknown node id: " + id);
}

const std::string& Network::node_id(NodeRef r) const {
  if (is_junction(r)) return junctions[static_cast<std::size_t>(r - 1)].id;
  return tanks[static_cast<std::size_t>(-r - 1)].id;
}

namespace {

struct RawLine {
  int number = 0;  // 1-based line number in the file
  std::vector<std::string> fields;
};

struct Sections {
  // Section name (upper-cased, without brackets) -> data lines in order.
  std::vector<std::pair<std::string, std::vector<RawLine>>> list;

  std::vector<RawLine>& get(const std::string& name) {
    for (auto& [n, lines] : list)
      if (n == name) return lines;
    list.emplace_back(name, std::vector<RawLine>{});
    return list.back().second;
  }
  const std::vector<RawLine>* find(const std::string& name) const {
    for (auto& [n, lines] : list)
      if (n == name) return &lines;
    return nullptr;
  }
};

std::string upper(std::string_view sv) {
  std::string s(sv);
  for (char& c : s)
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

Sections split_sections(std::string_view text, const std::string& origin,
                        std::string_view comment_markers) {
  Sections out;
  std::vector<RawLine>* current = nullptr;
  int number = 0;
  for (std::string_view raw : tio::split_lines(text)) {
    ++number;
    std::string_view line = tio::trim(tio::strip_comment(raw, comment_markers));
    if (line.empty()) continue;
    if (line.front() == '[') {
      std::size_t close = line.find(']');
      if (close == std::string_view::npos)
        throw validation_error(origin + ":" + tio::fmt(number) +
                               ": unterminated section header");
      current = &out.get(upper(line.substr(1, close - 1)));
      continue;
    }
    if (current == nullptr)
      throw validation_error(origin + ":" + tio::fmt(number) +
                             ": data before any section header");
    RawLine rl;
    rl.number = number;
    for (std::string_view f : tio::split_ws(line)) rl.fields.emplace_back(f);
    current->push_back(std::move(rl));
  }
  return out;
}

[[noreturn]] void line_error(const std::string& origin, const RawLine& line,
                             const std::string& what) {
  throw validation_error(origin + ":" + tio::fmt(line.number) + ": " + what);
}

double field_double(const std::string& origin, const RawLine& line,
                    std::size_t idx, const char* what) {
  double v = 0;
  if (!tio::parse_double(line.fields[idx], v))
    line_error(origin, line,
               std::string("cannot parse ") + what + " '" + line.fields[idx] +
                   "'");
  return v;
}

Network build_network(const Sections& sec, const std::string& origin,
                      bool inp) {
  const char* junctions_name = "JUNCTIONS";
  const char* tanks_name = inp ? "RESERVOIRS" : "TANKS";
  const char* pipes_name = "PIPES";

  if (!inp) {
    for (auto& [name, lines] : sec.list)
      if (name != "TANKS" && name != "JUNCTIONS" && name != "PIPES")
        throw validation_error(origin + ": unknown section [" + name + "]");
  } else {
    for (auto& [name, lines] : sec.list)
      if (name != "RESERVOIRS" && name != "JUNCTIONS" && name != "PIPES")
        std::fprintf(stderr, "warning: %s: ignoring section [%s]\n",
                     origin.c_str(), name.c_str());
  }

  Network net;
  if (const auto* lines = sec.find(tanks_name)) {
    for (const RawLine& l : *lines) {
      if (l.fields.size() < 2)
        line_error(origin, l, "expected 'id head_m'");
      Tank t;
      t.id = l.fields[0];
      t.head_m = field_double(origin, l, 1, "tank head");
      net.tanks.push_back(std::move(t));
    }
  }
  if (const auto* lines = sec.find(junctions_name)) {
    for (const RawLine& l : *lines) {
      if (l.fields.size() < 3)
        line_error(origin, l, "expected 'id elevation_m base_demand_m3s'");
      Junction j;
      j.id = l.fields[0];
      j.elevation_m = field_double(origin, l, 1, "elevation");
      j.base_demand_m3s = field_double(origin, l, 2, "base demand");
      net.junctions.push_back(std::move(j));
    }
  }

  // Node ids live in one namespace so pipe endpoints are unambiguous.
  std::unordered_map<std::string, NodeRef> refs;
  for (int i = 0; i < net.n_junctions(); ++i) {
    const std::string& id = net.junctions[static_cast<std::size_t>(i)].id;
    if (!refs.emplace(id, i + 1).second)
      throw validation_error(origin + ": duplicate node id '" + id + "'");
  }
  for (int t = 0; t < net.n_tanks(); ++t) {
    const std::string& id = net.tanks[static_cast<std::size_t>(t)].id;
    if (!refs.emplace(id, -(t + 1)).second)
      throw validation_error(origin + ": duplicate node id '" + id + "'");
  }

  if (const auto* lines = sec.find(pipes_name)) {
    for (const RawLine& l : *lines) {
      if (l.fields.size() < 6)
        line_error(origin, l,
                   "expected 'id from to length_m diameter_m roughness'");
      Pipe p;
      p.id = l.fields[0];
      auto from = refs.find(l.fields[1]);
      if (from == refs.end())
        line_error(origin, l,
                   "pipe '" + p.id + "' references unknown node '" +
                       l.fields[1] + "'");
      auto to = refs.find(l.fields[2]);
      if (to == refs.end())
        line_error(origin, l,
                   "pipe '" + p.id + "' references unknown node '" +
                       l.fields[2] + "'");
      p.from = from->second;
      p.to = to->second;
      p.length_m = field_double(origin, l, 3, "pipe length");
      p.diameter_m = field_double(origin, l, 4, "pipe diameter");
      p.roughness = field_double(origin, l, 5, "pipe roughness");
      net.pipes.push_back(std::move(p));
    }
  }

  validate(net);
  return net;
}

// Unified node indexing for graph traversals: junction i -> i-1,
// tank t -> n_junctions + t - 1.
int flat_index(const Network& net, NodeRef r) {
  return is_junction(r) ? junction_index(r) - 1
                        : net.n_junctions() + tank_index(r) - 1;
}

struct Adjacency {
  // adj[node] = list of (neighbor flat index, pipe index)
  std::vector<std::vector<std::pair<int, int>>> adj;
};

Adjacency adjacency(const Network& net) {
  Adjacency a;
  a.adj.resize(static_cast<std::size_t>(net.n_junctions() + net.n_tanks()));
  for (int e = 0; e < net.n_pipes(); ++e) {
    const Pipe& p = net.pipes[static_cast<std::size_t>(e)];
    int u = flat_index(net, p.from);
    int v = flat_index(net, p.to);
    a.adj[static_cast<std::size_t>(u)].push_back({v, e});
    a.adj[static_cast<std::size_t>(v)].push_back({u, e});
  }
  return a;
}

}  // namespace

Network parse_network_text(const std::string& text, NetworkFormat format,
                           const std::string& origin) {
  bool inp = format == NetworkFormat::inp_subset;
  Sections sec = split_sections(text, origin, inp ? ";#" : "#");
  return build_network(sec, origin, inp);
}

Network parse_network(const std::string& path, NetworkFormat format) {
  return parse_network_text(tio::read_file(path), format, path);
}

std::string write_network_text(const Network& net,
                               const std::vector<std::string>& header) {
  std::string out;
  for (const std::string& h : header) {
    out += "# ";
    out += h;
    out += '\n';
  }
  out += "[TANKS]\n";
  for (const Tank& t : net.tanks)
    out += t.id + " " + tio::fmt(t.head_m) + "\n";
  out += "\n[JUNCTIONS]\n";
  for (const Junction& j : net.junctions)
    out += j.id + " " + tio::fmt(j.elevation_m) + " " +
           tio::fmt(j.base_demand_m3s) + "\n";
  out += "\n[PIPES]\n";
  for (const Pipe& p : net.pipes)
    out += p.id + " " + net.node_id(p.from) + " " + net.node_id(p.to) + " " +
           tio::fmt(p.length_m) + " " + tio::fmt(p.diameter_m) + " " +
           tio::fmt(p.roughness) + "\n";
  return out;
}

void write_network(const Network& net, const std::string& path,
                   const std::vector<std::string>& header) {
  tio::write_file(path, write_network_text(net, header));
}

void validate(const Network& net) {
  if (net.n_junctions() < 1)
    throw validation_error("network has no junctions");
  if (net.n_tanks() < 1)
    throw validation_error("network has no tank; at least one fixed head "
                           "source is required");

  std::unordered_map<std::string, int> seen;
  for (const Junction& j : net.junctions)
    if (++seen[j.id] > 1)
      throw validation_error("duplicate node id '" + j.id + "'");
  for (const Tank& t : net.tanks)
    if (++seen[t.id] > 1)
      throw validation_error("duplicate node id '" + t.id + "'");
  std::unordered_map<std::string, int> seen_pipes;
  for (const Pipe& p : net.pipes)
    if (++seen_pipes[p.id] > 1)
      throw validation_error("duplicate pipe id '" + p.id + "'");

  for (const Junction& j : net.junctions)
    if (!(j.base_demand_m3s >= 0) || !std::isfinite(j.elevation_m))
      throw validation_error("junction '" + j.id +
                             "' has a negative or non-finite property");
  for (const Tank& t : net.tanks)
    if (!std::isfinite(t.head_m))
      throw validation_error("tank '" + t.id + "' has a non-finite head");

  int n = net.n_junctions(), nt = net.n_tanks();
  for (const Pipe& p : net.pipes) {
    auto in_range = [&](NodeRef r) {
      return (is_junction(r) && junction_index(r) <= n) ||
             (is_tank(r) && tank_index(r) <= nt);
    };
    if (p.from == 0 || p.to == 0 || !in_range(p.from) || !in_range(p.to))
      throw validation_error("pipe '" + p.id +
                             "' has an unresolved endpoint reference");
    if (p.from == p.to)
      throw validation_error("pipe '" + p.id + "' is a self loop");
    if (!(p.length_m > 0))
      throw validation_error("pipe '" + p.id + "' has non-positive length");
    if (!(p.diameter_m > 0))
      throw validation_error("pipe '" + p.id + "' has non-positive diameter");
    if (!(p.roughness > 0))
      throw validation_error("pipe '" + p.id + "' has non-positive roughness");
  }

  // Connectivity: every node must be reachable from some tank, otherwise the
  // hydraulic problem has no bounded solution for the cut-off part.
  Adjacency a = adjacency(net);
  std::vector<char> visited(a.adj.size(), 0);
  std::queue<int> q;
  for (int t = 0; t < nt; ++t) {
    visited[static_cast<std::size_t>(n + t)] = 1;
    q.push(n + t);
  }
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (auto [v, e] : a.adj[static_cast<std::size_t>(u)]) {
      if (!visited[static_cast<std::size_t>(v)]) {
        visited[static_cast<std::size_t>(v)] = 1;
        q.push(v);
      }
    }
  }
  for (int i = 0; i < n; ++i)
    if (!visited[static_cast<std::size_t>(i)])
      throw validation_error(
          "node '" + net.junctions[static_cast<std::size_t>(i)].id +
          "' is not connected to any tank");
}

IncidenceMatrices incidence(const Network& net) {
  IncidenceMatrices m;
  m.B = Eigen::MatrixXd::Zero(net.n_junctions(), net.n_pipes());
  m.Bf = Eigen::MatrixXd::Zero(net.n_tanks(), net.n_pipes());
  for (int e = 0; e < net.n_pipes(); ++e) {
    const Pipe& p = net.pipes[static_cast<std::size_t>(e)];
    auto put = [&](NodeRef r, double sign) {
      if (is_junction(r))
        m.B(junction_index(r) - 1, e) += sign;
      else
        m.Bf(tank_index(r) - 1, e) += sign;
    };
    put(p.from, -1.0);
    put(p.to, +1.0);
  }
  return m;
}

Eigen::MatrixXd shortest_paths(const Network& net, EdgeWeight weight) {
  const int n = net.n_junctions();
  const int total = n + net.n_tanks();
  Adjacency a = adjacency(net);
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd dist(n, n);

  std::vector<double> d(static_cast<std::size_t>(total));
  using Item = std::pair<double, int>;
  for (int src = 0; src < n; ++src) {
    std::fill(d.begin(), d.end(), inf);
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    d[static_cast<std::size_t>(src)] = 0;
    pq.push({0.0, src});
    while (!pq.empty()) {
      auto [du, u] = pq.top();
      pq.pop();
      if (du > d[static_cast<std::size_t>(u)]) continue;
      for (auto [v, e] : a.adj[static_cast<std::size_t>(u)]) {
        double w = weight == EdgeWeight::unit
                       ? 1.0
                       : net.pipes[static_cast<std::size_t>(e)].length_m;
        double dv = du + w;
        if (dv < d[static_cast<std::size_t>(v)]) {
          d[static_cast<std::size_t>(v)] = dv;
          pq.push({dv, v});
        }
      }
    }
    for (int j = 0; j < n; ++j) dist(src, j) = d[static_cast<std::size_t>(j)];
  }
  return dist;
}

std::vector<int> k_hop_neighbors(const Network& net, int junction, int k) {
  if (junction < 1 || junction > net.n_junctions())
    throw validation_error("junction index out of range: " +
                           tio::fmt(junction));
  if (k < 0) throw validation_error("hop count must be non-negative");
  Adjacency a = adjacency(net);
  const int total = net.n_junctions() + net.n_tanks();
  std::vector<int> hops(static_cast<std::size_t>(total), -1);
  std::queue<int> q;
  hops[static_cast<std::size_t>(junction - 1)] = 0;
  q.push(junction - 1);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    if (hops[static_cast<std::size_t>(u)] == k) continue;
    for (auto [v, e] : a.adj[static_cast<std::size_t>(u)]) {
      if (hops[static_cast<std::size_t>(v)] < 0) {
        hops[static_cast<std::size_t>(v)] = hops[static_cast<std::size_t>(u)] + 1;
        q.push(v);
      }
    }
  }
  std::vector<int> out;
  for (int j = 0; j < net.n_junctions(); ++j)
    if (hops[static_cast<std::size_t>(j)] >= 0) out.push_back(j + 1);
  return out;
}

CommunityMap parse_communities_text(const std::string& text,
                                    const Network& net,
                                    const std::string& origin) {
  CommunityMap map;
  map.community.assign(static_cast<std::size_t>(net.n_junctions()), 0);
  int number = 0;
  for (std::string_view raw : tio::split_lines(text)) {
    ++number;
    std::string_view line = tio::trim(tio::strip_comment(raw, "#"));
    if (line.empty()) continue;
    auto fields = tio::split_ws(line);
    if (fields.size() != 2)
      throw validation_error(origin + ":" + tio::fmt(number) +
                             ": expected 'node_id community_id'");
    NodeRef r;
    try {
      r = net.node_ref(std::string(fields[0]));
    } catch (const validation_error&) {
      throw validation_error(origin + ":" + tio::fmt(number) +
                             ": unknown node id '" + std::string(fields[0]) +
                             "'");
    }
    if (!is_junction(r))
      throw validation_error(origin + ":" + tio::fmt(number) + ": node '" +
                             std::string(fields[0]) + "' is not a junction");
    int c = 0;
    if (!tio::parse_int(fields[1], c) || c < 1)
      throw validation_error(origin + ":" + tio::fmt(number) +
                             ": community id must be a positive integer");
    std::size_t idx = static_cast<std::size_t>(junction_index(r) - 1);
    if (map.community[idx] != 0)
      throw validation_error(origin + ":" + tio::fmt(number) +
                             ": node '" + std::string(fields[0]) +
                             "' assigned twice");
    map.community[idx] = c;
    map.n_communities = std::max(map.n_communities, c);
  }
  for (int i = 0; i < net.n_junctions(); ++i)
    if (map.community[static_cast<std::size_t>(i)] == 0)
      throw validation_error(
          origin + ": junction '" +
          net.junctions[static_cast<std::size_t>(i)].id +
          "' has no community assignment");
  return map;
}

CommunityMap parse_communities(const std::string& path, const Network& net) {
  return parse_communities_text(tio::read_file(path), net, path);
}

}  // namespace wnfdi
