#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bm {

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Thrown when an exact computation would enumerate more than 2^kEnumerationLimit
// configurations.
struct EnumerationLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kEnumerationLimit = 20;

// Positive temperature. T divides the effective couplings everywhere, so
// evaluation at temperature T equals evaluation of the (w/T, b/T) network at
// T = 1.
struct Temperature {
  double value;
  explicit Temperature(double t) : value(t) {
    if (!(t > 0.0)) throw std::invalid_argument("temperature must be positive");
  }
};

// A configuration of +/-1 states, one per node.
using SpinConfig = std::vector<std::int8_t>;

void validate_spins(std::span<const std::int8_t> s, int n_nodes);

// Which nodes are held fixed at observed values. Free entries carry value 0.
struct ClampPattern {
  std::vector<std::uint8_t> clamped;  // 0/1 per node
  std::vector<std::int8_t> values;    // +/-1 where clamped, 0 elsewhere

  static ClampPattern none(int n_nodes);
  // Clamp nodes 0..visible.size()-1 to the given +/-1 values; the rest are free.
  static ClampPattern leading(std::span<const std::int8_t> visible, int n_nodes);

  int size() const { return static_cast<int>(clamped.size()); }
  int n_free() const;
  void validate(int n_nodes) const;
};

// Symmetric pairwise couplings over a fixed adjacency plus per-node biases.
// The diagonal is zero and weights off the adjacency are identically zero.
class Network {
 public:
  explicit Network(int n_nodes);

  // Fully interconnected topology (all pairs are neighbours).
  static Network complete(int n_nodes);

  int size() const { return n_; }

  void add_edge(int i, int j, double w = 0.0);
  bool has_edge(int i, int j) const;

  double weight(int i, int j) const { return w_[idx(i, j)]; }
  void set_weight(int i, int j, double w);  // edge must exist

  double bias(int i) const { return bias_[check_node(i)]; }
  void set_bias(int i, double b) { bias_[check_node(i)] = b; }

  // Edges as (i, j) with i < j, sorted lexicographically. This is the
  // canonical parameter order used by snapshots and file output.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int i) const { return adj_[check_node(i)]; }

  // Edge weights plus biases.
  int n_parameters() const { return static_cast<int>(edges_.size()) + n_; }

 private:
  int check_node(int i) const;
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(check_node(i)) * n_ + check_node(j);
  }

  int n_;
  std::vector<double> w_;  // dense n x n, kept symmetric with zero diagonal
  std::vector<double> bias_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adj_;
};

// Structured text round-trip; indices in the file are 1-based.
std::string network_to_json(const Network& net);
Network network_from_json(const std::string& text);
void save_network(const Network& net, const std::string& path);
Network load_network(const std::string& path);

}  // namespace bm
