#include "bm/exact.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>

namespace bm {

namespace {

void check_enumerable(int n_free) {
  if (n_free > kEnumerationLimit)
    throw EnumerationLimitError("exact enumeration limited to " +
                                std::to_string(kEnumerationLimit) + " free nodes");
}

// Walks every configuration of the free nodes in Gray-code order, maintaining
// the energy incrementally: flipping node k changes E by
// 2 * s_k * (sum_j w_kj s_j + b_k) evaluated before the flip. Clamped nodes
// stay at their observed values throughout.
template <typename Visit>
void for_each_config(const Network& net, const ClampPattern& clamp, Visit&& visit) {
  const int n = net.size();
  clamp.validate(n);
  std::vector<int> free_nodes;
  for (int i = 0; i < n; ++i)
    if (!clamp.clamped[i]) free_nodes.push_back(i);
  const int nf = static_cast<int>(free_nodes.size());
  check_enumerable(nf);

  std::vector<std::int8_t> s(n);
  for (int i = 0; i < n; ++i) s[i] = clamp.clamped[i] ? clamp.values[i] : -1;

  double e = energy(net, s);
  visit(std::span<const std::int8_t>(s), e);

  const std::uint64_t total = std::uint64_t{1} << nf;
  for (std::uint64_t t = 1; t < total; ++t) {
    const int k = free_nodes[std::countr_zero(t)];
    double field = net.bias(k);
    for (int j : net.neighbors(k)) field += net.weight(k, j) * s[j];
    e += 2.0 * s[k] * field;
    s[k] = static_cast<std::int8_t>(-s[k]);
    visit(std::span<const std::int8_t>(s), e);
  }
}

}  // namespace

double energy(const Network& net, std::span<const std::int8_t> s) {
  validate_spins(s, net.size());
  double e = 0.0;
  for (auto [i, j] : net.edges()) e += net.weight(i, j) * s[i] * s[j];
  for (int i = 0; i < net.size(); ++i) e += net.bias(i) * s[i];
  return -e;
}

double log_clamped_partition(const Network& net, const ClampPattern& clamp,
                             Temperature T) {
  // Streaming log-sum-exp: rescale the accumulator whenever a new maximum
  // exponent appears.
  double max_x = -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for_each_config(net, clamp, [&](std::span<const std::int8_t>, double e) {
    const double x = -e / T.value;
    if (x <= max_x) {
      acc += std::exp(x - max_x);
    } else {
      acc = acc * std::exp(max_x - x) + 1.0;
      max_x = x;
    }
  });
  return max_x + std::log(acc);
}

double log_partition(const Network& net, Temperature T) {
  return log_clamped_partition(net, ClampPattern::none(net.size()), T);
}

double partition_function(const Network& net, Temperature T) {
  return std::exp(log_partition(net, T));
}

double log_prob(const Network& net, std::span<const std::int8_t> s, Temperature T) {
  return -energy(net, s) / T.value - log_partition(net, T);
}

Matrix exact_pair_correlations(const Network& net, Temperature T,
                               const ClampPattern* clamp) {
  const int n = net.size();
  const ClampPattern cp = clamp ? *clamp : ClampPattern::none(n);
  const double log_w = log_clamped_partition(net, cp, T);

  Matrix corr = Matrix::zeros(n + 1, n + 1);
  for_each_config(net, cp, [&](std::span<const std::int8_t> s, double e) {
    const double p = std::exp(-e / T.value - log_w);
    for (int i = 0; i < n; ++i) {
      corr(0, i + 1) += p * s[i];
      for (int j = i + 1; j < n; ++j) corr(i + 1, j + 1) += p * s[i] * s[j];
    }
  });
  corr(0, 0) = 1.0;
  for (int i = 0; i < n; ++i) {
    corr(i + 1, i + 1) = 1.0;
    corr(i + 1, 0) = corr(0, i + 1);
    for (int j = i + 1; j < n; ++j) corr(j + 1, i + 1) = corr(i + 1, j + 1);
  }
  return corr;
}

double exact_log_likelihood(const Network& net,
                            const std::vector<ClampPattern>& patterns,
                            Temperature T) {
  const double log_z = log_partition(net, T);
  double ll = 0.0;
  for (const auto& p : patterns) ll += log_clamped_partition(net, p, T) - log_z;
  return ll;
}

Matrix exact_likelihood_gradient(const Network& net,
                                 const std::vector<ClampPattern>& patterns,
                                 Temperature T) {
  if (patterns.empty()) throw std::invalid_argument("no patterns");
  const int n = net.size();
  Matrix grad = Matrix::zeros(n + 1, n + 1);
  for (const auto& p : patterns) {
    const Matrix c = exact_pair_correlations(net, T, &p);
    for (std::size_t k = 0; k < grad.data().size(); ++k) grad.data()[k] += c.data()[k];
  }
  const double inv_n = 1.0 / static_cast<double>(patterns.size());
  const Matrix f = exact_pair_correlations(net, T);
  for (std::size_t k = 0; k < grad.data().size(); ++k)
    grad.data()[k] = grad.data()[k] * inv_n - f.data()[k];
  return grad;
}

double kl_divergence_discrete(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw DimensionError("KL divergence needs tables over the same support");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0 || q[i] < 0.0)
      throw std::invalid_argument("probability tables must be nonnegative");
    if (p[i] == 0.0) continue;
    if (q[i] <= 0.0)
      throw std::invalid_argument("q is zero where p has mass");
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return kl;
}

}  // namespace bm
