#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bm/matrix.hpp"
#include "bm/meanfield.hpp"
#include "bm/mixture.hpp"
#include "bm/network.hpp"
#include "bm/patterns.hpp"

namespace bm {

enum class Engine { exact, meanfield, mixture };

std::string engine_name(Engine e);

struct TrainConfig {
  Engine engine = Engine::meanfield;
  int n_components = 1;  // mixture engine only
  double learning_rate = 0.25;
  int n_iterations = 1;
  AnnealSchedule anneal = AnnealSchedule::single();
  double init_weight_std = 0.1;
  FixedPointSettings fixed_point;
  std::uint64_t seed = 1;
  // The clamped phase runs at T = 1 by default; annealing language in the
  // free phase does not apply to it unless this is set.
  bool clamped_anneal = false;
  // Re-initialize free-phase variational parameters each iteration (fresh
  // anneal). Carrying them over suppresses mode hopping.
  bool carry_over_free_params = false;

  void validate() const;
};

struct IterationRow {
  int iteration = 0;
  // Variational objective pieces from the E-step (at the pre-update weights).
  double clamped_avg = 0.0;  // multiplicity-weighted mean of L_C
  double free_bound = 0.0;   // L_F (meanfield) or the mixture bound total
  double cost = 0.0;         // clamped_avg + free_bound; the ascent objective
  double bound_energy = 0.0, bound_entropy = 0.0, bound_mi = 0.0;  // mixture
  // Exact diagnostics at the post-update weights, when enumerable (else NaN).
  double exact_log_lik = 0.0;
  double kl = 0.0;
  bool clamped_converged = true;
  bool free_converged = true;
  int floor_hits = 0;
  // Post-update parameter snapshot: edge weights in canonical order, then biases.
  std::vector<double> params_flat;
  // Free-phase variational snapshot from the E-step (empty for the exact engine).
  std::vector<double> free_alphas;
  std::vector<std::vector<double>> free_means;
};

struct RunRecord {
  int n_nodes = 0;
  std::vector<std::pair<int, int>> edge_order;
  TrainConfig config;
  std::vector<IterationRow> rows;
  std::optional<Network> final_net;
};

// Weights and biases i.i.d. Gaussian(0, stddev^2) on the topology's adjacency.
Network init_network(const Network& topology, double stddev, std::uint64_t seed);

// Free-phase state carried across iterations when warm starts are enabled.
struct FreeState {
  std::vector<double> means;           // meanfield engine
  std::optional<MixtureParams> mixture;  // mixture engine
};

struct EStepResult {
  // Clamped side, one entry per pattern.
  std::vector<std::vector<double>> mu;  // variational engines
  std::vector<Matrix> clamped_corr;     // exact engine
  bool clamped_converged = true;
  double clamped_avg = 0.0;
  // Free side; exactly one of these is meaningful, by engine.
  std::optional<Matrix> free_corr;
  std::optional<MeanFieldResult> mf;
  std::optional<MixtureResult> mix;
};

// Clamped mean-field inference per pattern and free-phase inference by the
// configured engine. `iteration` seeds the fresh free-phase initialization;
// `warm` (nullable) supplies carried-over free-phase parameters.
EStepResult e_step(const Network& net, const std::vector<ClampPattern>& patterns,
                   const TrainConfig& config, int iteration,
                   const FreeState* warm = nullptr);

// Pattern-averaged learning gradient for the engine that produced `es`.
Matrix gradient_from_e_step(const EStepResult& es,
                            std::span<const double> pattern_weights);

// w <- w + learning_rate * gradient on the adjacency; biases from row 0.
Network m_step(const Network& net, const Matrix& gradient, double learning_rate);

// Alternate e_step / m_step from a fresh Gaussian init; one record row per
// iteration. Deterministic given the config (including its seed).
RunRecord train(const Network& topology, const PatternSet& patterns,
                const TrainConfig& config);

// KL(empirical visible distribution || model marginal P(V)) by enumeration.
double model_visible_kl(const Network& net, const PatternSet& patterns, Temperature T);

// Metrics-only CSV rows (see run_record_columns) and a JSON sidecar holding
// the full per-iteration parameter and variational snapshots.
std::vector<std::string> run_record_columns();
std::vector<std::vector<std::string>> run_record_rows(const RunRecord& record);
std::string run_record_sidecar_json(const RunRecord& record);

}  // namespace bm
