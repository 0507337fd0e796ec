#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "bm/matrix.hpp"
#include "bm/meanfield.hpp"
#include "bm/network.hpp"
#include "bm/rng.hpp"

namespace bm {

// Smoothing-table entries below this are clamped up; hits are counted.
inline constexpr double kSmoothingFloor = 1e-12;

// A convex combination of factorized +/-1 distributions, plus the auxiliary
// quantities that make its free-energy bound tractable: per-component
// factorized smoothing tables R_i(s|l) > 0 and positive scalars lambda_l.
// Parameter objects are value types; updates return new snapshots.
struct MixtureParams {
  std::vector<double> alphas;                              // K, simplex
  std::vector<std::vector<double>> means;                  // K x L, in [-1,1]
  std::vector<std::vector<std::array<double, 2>>> smoothing;  // [l][i] = {R(-1|l), R(+1|l)}
  std::vector<double> lambdas;                             // K, positive

  int n_components() const { return static_cast<int>(alphas.size()); }
  int n_nodes() const { return means.empty() ? 0 : static_cast<int>(means[0].size()); }
  void validate() const;
};

// alphas uniform, means i.i.d. uniform(-0.1, 0.1) drawn component-major,
// smoothing tables uniform (1/2 per state), lambdas set to their optimum.
MixtureParams mixture_init(int n_components, int n_nodes, Rng& rng);

struct BoundBreakdown {
  double energy_term;     // sum_l alpha_l E_{Q_l}[E/T]
  double entropy_term;    // sum_l alpha_l H(Q_l)
  double mutual_info_lb;  // I_lambda
  double total;           // energy - entropy - mutual_info_lb, >= -ln Z(T)
};

// Q_mix(s) = sum_l alpha_l prod_i q_li(s_i).
double mix_prob(const MixtureParams& params, std::span<const std::int8_t> s);

// pi_l = sum_S R(S|l) Q_mix(S), computed factorized. Strictly positive.
double component_overlap(const MixtureParams& params, int l);

// I(l,S) by full enumeration (diagnostic; respects the enumeration limit).
double mutual_info_exact(const MixtureParams& params);

// I_lambda <= I(l,S) for every valid parameter setting; all configuration
// sums are evaluated factorized, so this scales polynomially.
double mutual_info_lower_bound(const MixtureParams& params);

// lambda_l <- alpha_l / pi_l, the maximizer of I_lambda in lambda. Components
// with alpha_l = 0 keep their lambda.
MixtureParams update_lambdas(MixtureParams params);

// Coordinate-wise stationary re-estimation of the factorized smoothing tables,
// holding everything else fixed; I_lambda never decreases. Tables are floored
// at kSmoothingFloor (hits counted) and renormalized per site with the scale
// absorbed into lambda, which leaves I_lambda unchanged.
MixtureParams update_smoothing(MixtureParams params, int* floor_hits = nullptr);

// Exact minimizer of the total bound over the simplex with all other blocks
// fixed (the bound is linear in alpha plus the negative mixing entropy, hence
// convex): a softmax re-estimate. Never worsens the bound.
MixtureParams update_alphas(MixtureParams params, const Network& net, Temperature T);

// Sequential per-site tanh updates of the component means; the usual
// mean-field local field gains forcing terms from dI_lambda/dm. Each site
// update is the exact coordinate minimizer, so the bound never worsens.
MixtureParams update_component_means(MixtureParams params, const Network& net,
                                     Temperature T);

BoundBreakdown mixture_free_bound(const MixtureParams& params, const Network& net,
                                  Temperature T);

struct MixtureTracePoint {
  double temperature;
  int cycle;
  double total;
};

struct MixtureResult {
  MixtureParams params;
  bool converged = false;  // at the final temperature
  int cycles = 0;          // cycles run at the final temperature
  std::vector<MixtureTracePoint> trace;
  int floor_hits = 0;
};

// Coordinate ascent cycles (means -> smoothing -> lambdas -> alphas) at one
// temperature until the bound's relative change drops below rel_tol or
// max_sweeps cycles elapse.
MixtureResult optimize_mixture_at(const Network& net, Temperature T,
                                  MixtureParams init,
                                  const FixedPointSettings& settings);

// Full anneal: optimize at each temperature of the schedule with warm starts.
MixtureResult optimize_mixture(const Network& net, const AnnealSchedule& schedule,
                               MixtureParams init, const FixedPointSettings& settings);

// (L+1)x(L+1) matrix with entry (i,j) = sum_l alpha_l m_li m_lj, first moments
// in row/column 0, unit diagonal.
Matrix mixture_pair_correlations(const MixtureParams& params);

// mean_n mu_n,i mu_n,j - sum_l alpha_l m_li m_lj, zero diagonal.
Matrix mixture_learning_gradient(const std::vector<std::vector<double>>& mu_per_pattern,
                                 std::span<const double> pattern_weights,
                                 const MixtureParams& params);

// Structured text round-trip of the full parameter set.
std::string mixture_to_json(const MixtureParams& params);
MixtureParams mixture_from_json(const std::string& text);
void save_mixture(const MixtureParams& params, const std::string& path);
MixtureParams load_mixture(const std::string& path);

}  // namespace bm
