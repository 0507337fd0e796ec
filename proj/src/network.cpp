#include "bm/network.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace bm {

void validate_spins(std::span<const std::int8_t> s, int n_nodes) {
  if (static_cast<int>(s.size()) != n_nodes)
    throw DimensionError("spin configuration length does not match node count");
  for (auto v : s)
    if (v != 1 && v != -1)
      throw std::invalid_argument("spin states must be +1 or -1");
}

ClampPattern ClampPattern::none(int n_nodes) {
  ClampPattern p;
  p.clamped.assign(n_nodes, 0);
  p.values.assign(n_nodes, 0);
  return p;
}

ClampPattern ClampPattern::leading(std::span<const std::int8_t> visible, int n_nodes) {
  if (static_cast<int>(visible.size()) > n_nodes)
    throw DimensionError("more clamped values than nodes");
  ClampPattern p = none(n_nodes);
  for (std::size_t i = 0; i < visible.size(); ++i) {
    if (visible[i] != 1 && visible[i] != -1)
      throw std::invalid_argument("clamped values must be +1 or -1");
    p.clamped[i] = 1;
    p.values[i] = visible[i];
  }
  return p;
}

int ClampPattern::n_free() const {
  int f = 0;
  for (auto c : clamped) f += c ? 0 : 1;
  return f;
}

void ClampPattern::validate(int n_nodes) const {
  if (size() != n_nodes || static_cast<int>(values.size()) != n_nodes)
    throw DimensionError("clamp pattern length does not match node count");
  for (int i = 0; i < n_nodes; ++i) {
    if (clamped[i]) {
      if (values[i] != 1 && values[i] != -1)
        throw std::invalid_argument("clamped node lacks a +/-1 value");
    } else if (values[i] != 0) {
      throw std::invalid_argument("free node carries a clamp value");
    }
  }
}

Network::Network(int n_nodes) : n_(n_nodes) {
  if (n_nodes < 1) throw std::invalid_argument("network needs at least one node");
  w_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
  bias_.assign(n_, 0.0);
  adj_.resize(n_);
}

Network Network::complete(int n_nodes) {
  Network net(n_nodes);
  for (int i = 0; i < n_nodes; ++i)
    for (int j = i + 1; j < n_nodes; ++j) net.add_edge(i, j);
  return net;
}

int Network::check_node(int i) const {
  if (i < 0 || i >= n_) throw std::out_of_range("node index out of range");
  return i;
}

void Network::add_edge(int i, int j, double w) {
  check_node(i);
  check_node(j);
  if (i == j) throw std::invalid_argument("self edges are not allowed");
  auto e = std::minmax(i, j);
  auto pos = std::lower_bound(edges_.begin(), edges_.end(),
                              std::pair<int, int>(e.first, e.second));
  if (pos != edges_.end() && *pos == std::pair<int, int>(e.first, e.second))
    throw std::invalid_argument("duplicate edge");
  edges_.insert(pos, {e.first, e.second});
  adj_[i].push_back(j);
  adj_[j].push_back(i);
  std::sort(adj_[i].begin(), adj_[i].end());
  std::sort(adj_[j].begin(), adj_[j].end());
  w_[idx(i, j)] = w;
  w_[idx(j, i)] = w;
}

bool Network::has_edge(int i, int j) const {
  check_node(i);
  check_node(j);
  if (i == j) return false;
  auto e = std::minmax(i, j);
  return std::binary_search(edges_.begin(), edges_.end(),
                            std::pair<int, int>(e.first, e.second));
}

void Network::set_weight(int i, int j, double w) {
  if (!has_edge(i, j)) throw std::invalid_argument("pair is not an edge");
  w_[idx(i, j)] = w;
  w_[idx(j, i)] = w;
}

std::string network_to_json(const Network& net) {
  nlohmann::ordered_json j;
  j["L"] = net.size();
  auto edges = nlohmann::ordered_json::array();
  for (auto [a, b] : net.edges())
    edges.push_back({a + 1, b + 1, net.weight(a, b)});
  j["edges"] = edges;
  auto biases = nlohmann::ordered_json::array();
  for (int i = 0; i < net.size(); ++i) biases.push_back(net.bias(i));
  j["biases"] = biases;
  return j.dump(2) + "\n";
}

Network network_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("network parse error: ") + e.what());
  }
  if (!j.contains("L") || !j.contains("edges") || !j.contains("biases"))
    throw std::invalid_argument("network file needs fields L, edges, biases");
  const int n = j["L"].get<int>();
  Network net(n);
  for (const auto& e : j["edges"]) {
    if (!e.is_array() || e.size() != 3)
      throw std::invalid_argument("edge entries must be [i, j, w]");
    const int a = e[0].get<int>();
    const int b = e[1].get<int>();
    if (a < 1 || a > n || b < 1 || b > n)
      throw std::invalid_argument("edge index out of range (indices are 1-based)");
    net.add_edge(a - 1, b - 1, e[2].get<double>());
  }
  const auto& biases = j["biases"];
  if (static_cast<int>(biases.size()) != n)
    throw std::invalid_argument("biases length does not match L");
  for (int i = 0; i < n; ++i) net.set_bias(i, biases[i].get<double>());
  return net;
}

void save_network(const Network& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << network_to_json(net);
  if (!out) throw std::runtime_error("write failed: " + path);
}

Network load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return network_from_json(ss.str());
}

}  // namespace bm
