#pragma once

#include <span>
#include <vector>

#include "bm/matrix.hpp"
#include "bm/network.hpp"

namespace bm {

// E(S) = -sum_i { sum_{j>i} w_ij s_i s_j + b_i s_i }
double energy(const Network& net, std::span<const std::int8_t> s);

// ln sum over free-node configurations of exp(-E/T), clamped nodes held at
// their observed values. Log-sum-exp accumulation; Gray-code enumeration with
// incremental energy updates.
double log_clamped_partition(const Network& net, const ClampPattern& clamp,
                             Temperature T);

double log_partition(const Network& net, Temperature T);
double partition_function(const Network& net, Temperature T);

double log_prob(const Network& net, std::span<const std::int8_t> s, Temperature T);

// (L+1)x(L+1) matrix of <s_i s_j>; index 0 is the always-on bias unit, so row
// 0 holds the first moments. Diagonal entries are 1. With a clamp, the
// expectation is under the conditional distribution of the free nodes.
Matrix exact_pair_correlations(const Network& net, Temperature T,
                               const ClampPattern* clamp = nullptr);

// sum_n ln sum_H exp(-E(H, V_n)/T) - N ln Z
double exact_log_likelihood(const Network& net,
                            const std::vector<ClampPattern>& patterns,
                            Temperature T);

// Pattern-averaged gradient of the log likelihood: mean_n <s_i s_j>_{C,n}
// minus <s_i s_j>_F, as an (L+1)x(L+1) matrix (zero diagonal).
Matrix exact_likelihood_gradient(const Network& net,
                                 const std::vector<ClampPattern>& patterns,
                                 Temperature T);

// sum_x p(x) ln(p(x)/q(x)) over a shared finite support.
double kl_divergence_discrete(std::span<const double> p, std::span<const double> q);

}  // namespace bm
