#pragma once

#include <span>
#include <vector>

#include "bm/matrix.hpp"
#include "bm/network.hpp"
#include "bm/rng.hpp"

namespace bm {

// Descending temperatures ending at 1.
struct AnnealSchedule {
  std::vector<double> temperatures;

  static AnnealSchedule single() { return AnnealSchedule{{1.0}}; }
  // n values from t_start down to 1, geometric including both endpoints.
  static AnnealSchedule geometric(double t_start, int n_steps);

  void validate() const;
};

struct FixedPointSettings {
  int max_sweeps = 20;       // cap on sweeps (or coordinate cycles)
  double rel_tol = 1e-4;     // relative change of the objective
  double damping = 0.0;      // in [0,1); 0 = plain updates

  void validate() const;
};

struct MeanFieldResult {
  std::vector<double> means;
  bool converged = false;
  int sweeps = 0;
  std::vector<double> objective_trace;  // objective after each sweep, entry 0 = initial
};

// -p ln p - (1-p) ln(1-p), with 0 ln 0 = 0.
double binary_entropy(double p);

// q_i(s) under a factorized distribution with the given mean: (1 + s*mean)/2.
double mf_marginal_prob(double mean, int spin);

// L_F(m) = E_Q[E/T] - H(Q); an upper bound on -ln Z(T).
double mf_free_objective(const Network& net, std::span<const double> means,
                         Temperature T);

// The two pieces of L_F: (E_Q[E/T], H(Q)) with every node free. The mixture
// bound reuses this so that its one-component case agrees term by term.
std::pair<double, double> mf_energy_entropy(const Network& net,
                                            std::span<const double> means,
                                            Temperature T);

// L_C(mu) = -E_Q[E/T] + H over free nodes; a lower bound on the clamped
// log-partition ln sum_H exp(-E(H,V)/T). Clamped entries of `means` must equal
// their observed values.
double mf_clamped_objective(const Network& net, std::span<const double> means,
                            const ClampPattern& clamp, Temperature T);

// Sequential tanh fixed-point sweeps at a single temperature. Clamped entries
// of init are forced to their observed values and never move. Convergence is
// relative change of the phase objective (L_F free, L_C clamped).
MeanFieldResult mf_fixed_point(const Network& net, const ClampPattern* clamp,
                               Temperature T, std::vector<double> init,
                               const FixedPointSettings& settings);

// Fixed point at each temperature of the schedule, warm-starting each stage
// from the previous one; returns the T = 1 result.
MeanFieldResult mf_anneal(const Network& net, const ClampPattern* clamp,
                          const AnnealSchedule& schedule, std::vector<double> init,
                          const FixedPointSettings& settings);

// mean_n mu_n,i mu_n,j - m_i m_j as an (L+1)x(L+1) matrix with zero diagonal;
// weights (if given) are per-pattern multiplicities.
Matrix mf_learning_gradient(const std::vector<std::vector<double>>& mu_per_pattern,
                            std::span<const double> pattern_weights,
                            std::span<const double> free_means);

// Shared initialization policy for free-phase variational means: i.i.d.
// uniform on (-0.1, 0.1), which breaks the m = 0 symmetry of bias-free nets.
std::vector<double> draw_initial_means(Rng& rng, int n);

}  // namespace bm
