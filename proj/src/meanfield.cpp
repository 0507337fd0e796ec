#include "bm/meanfield.hpp"

#include <cmath>
#include <stdexcept>

namespace bm {

namespace {

void validate_means(std::span<const double> means, int n) {
  if (static_cast<int>(means.size()) != n)
    throw DimensionError("means length does not match node count");
  for (double m : means)
    if (!(m >= -1.0 && m <= 1.0))
      throw std::invalid_argument("means must lie in [-1, 1]");
}

// E_Q[E/T] - H(Q restricted to free nodes). The free objective is this with
// every node free; the clamped objective is its negation.
double variational_free_energy(const Network& net, std::span<const double> means,
                               const ClampPattern& clamp, Temperature T) {
  double e = 0.0;
  for (auto [i, j] : net.edges()) e += net.weight(i, j) * means[i] * means[j];
  for (int i = 0; i < net.size(); ++i) e += net.bias(i) * means[i];
  double h = 0.0;
  for (int i = 0; i < net.size(); ++i) {
    if (clamp.clamped[i]) continue;
    const double p = 0.5 * (1.0 + means[i]);
    h += binary_entropy(p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p));
  }
  return -e / T.value - h;
}

}  // namespace

AnnealSchedule AnnealSchedule::geometric(double t_start, int n_steps) {
  if (n_steps < 1) throw std::invalid_argument("schedule needs at least one step");
  if (!(t_start >= 1.0)) throw std::invalid_argument("start temperature must be >= 1");
  AnnealSchedule s;
  s.temperatures.resize(n_steps);
  if (n_steps == 1) {
    s.temperatures[0] = 1.0;
  } else {
    for (int k = 0; k < n_steps; ++k)
      s.temperatures[k] =
          std::pow(t_start, static_cast<double>(n_steps - 1 - k) / (n_steps - 1));
    s.temperatures.back() = 1.0;
  }
  s.validate();
  return s;
}

void AnnealSchedule::validate() const {
  if (temperatures.empty()) throw std::invalid_argument("empty anneal schedule");
  for (std::size_t k = 0; k < temperatures.size(); ++k) {
    if (!(temperatures[k] > 0.0))
      throw std::invalid_argument("temperatures must be positive");
    if (k > 0 && !(temperatures[k] < temperatures[k - 1]))
      throw std::invalid_argument("schedule must be strictly decreasing");
  }
  if (temperatures.back() != 1.0)
    throw std::invalid_argument("schedule must end at T = 1");
}

void FixedPointSettings::validate() const {
  if (max_sweeps < 1) throw std::invalid_argument("max_sweeps must be >= 1");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");
  if (!(damping >= 0.0 && damping < 1.0))
    throw std::invalid_argument("damping must lie in [0, 1)");
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::domain_error("binary_entropy needs p in [0, 1]");
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
  return h;
}

double mf_marginal_prob(double mean, int spin) {
  if (spin != 1 && spin != -1) throw std::invalid_argument("spin must be +1 or -1");
  if (!(mean >= -1.0 && mean <= 1.0))
    throw std::invalid_argument("mean must lie in [-1, 1]");
  return 0.5 * (1.0 + spin * mean);
}

double mf_free_objective(const Network& net, std::span<const double> means,
                         Temperature T) {
  const auto [e_over_t, h] = mf_energy_entropy(net, means, T);
  return e_over_t - h;
}

std::pair<double, double> mf_energy_entropy(const Network& net,
                                            std::span<const double> means,
                                            Temperature T) {
  validate_means(means, net.size());
  double e = 0.0;
  for (auto [i, j] : net.edges()) e += net.weight(i, j) * means[i] * means[j];
  for (int i = 0; i < net.size(); ++i) e += net.bias(i) * means[i];
  double h = 0.0;
  for (int i = 0; i < net.size(); ++i) {
    const double p = 0.5 * (1.0 + means[i]);
    h += binary_entropy(p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p));
  }
  return {-e / T.value, h};
}

double mf_clamped_objective(const Network& net, std::span<const double> means,
                            const ClampPattern& clamp, Temperature T) {
  validate_means(means, net.size());
  clamp.validate(net.size());
  for (int i = 0; i < net.size(); ++i)
    if (clamp.clamped[i] && means[i] != static_cast<double>(clamp.values[i]))
      throw std::invalid_argument("clamped means must equal their observed values");
  return -variational_free_energy(net, means, clamp, T);
}

MeanFieldResult mf_fixed_point(const Network& net, const ClampPattern* clamp,
                               Temperature T, std::vector<double> init,
                               const FixedPointSettings& settings) {
  settings.validate();
  const int n = net.size();
  const ClampPattern cp = clamp ? *clamp : ClampPattern::none(n);
  cp.validate(n);
  validate_means(init, n);

  MeanFieldResult res;
  res.means = std::move(init);
  for (int i = 0; i < n; ++i)
    if (cp.clamped[i]) res.means[i] = static_cast<double>(cp.values[i]);

  // Internally we always descend E_Q[E/T] - H; the clamped objective is its
  // negation, so relative-change convergence is identical either way.
  double prev = variational_free_energy(net, res.means, cp, T);
  res.objective_trace.push_back(prev);

  for (int sweep = 1; sweep <= settings.max_sweeps; ++sweep) {
    for (int i = 0; i < n; ++i) {
      if (cp.clamped[i]) continue;
      double field = net.bias(i);
      for (int j : net.neighbors(i)) field += net.weight(i, j) * res.means[j];
      const double target = std::tanh(field / T.value);
      res.means[i] = settings.damping * res.means[i] +
                     (1.0 - settings.damping) * target;
    }
    const double obj = variational_free_energy(net, res.means, cp, T);
    res.objective_trace.push_back(obj);
    res.sweeps = sweep;
    if (std::abs(obj - prev) <= settings.rel_tol * std::max(std::abs(prev), 1e-12)) {
      res.converged = true;
      break;
    }
    prev = obj;
  }

  if (clamp) {
    // Report the clamped objective in the trace (sign flip of what we tracked).
    for (double& v : res.objective_trace) v = -v;
  }
  return res;
}

MeanFieldResult mf_anneal(const Network& net, const ClampPattern* clamp,
                          const AnnealSchedule& schedule, std::vector<double> init,
                          const FixedPointSettings& settings) {
  schedule.validate();
  MeanFieldResult res;
  res.means = std::move(init);
  for (double t : schedule.temperatures) {
    res = mf_fixed_point(net, clamp, Temperature(t), std::move(res.means), settings);
  }
  return res;
}

Matrix mf_learning_gradient(const std::vector<std::vector<double>>& mu_per_pattern,
                            std::span<const double> pattern_weights,
                            std::span<const double> free_means) {
  if (mu_per_pattern.empty()) throw std::invalid_argument("no patterns");
  const int n = static_cast<int>(free_means.size());
  if (!pattern_weights.empty() && pattern_weights.size() != mu_per_pattern.size())
    throw DimensionError("pattern weight count does not match pattern count");

  double total_w = 0.0;
  Matrix grad = Matrix::zeros(n + 1, n + 1);
  for (std::size_t p = 0; p < mu_per_pattern.size(); ++p) {
    const auto& mu = mu_per_pattern[p];
    if (static_cast<int>(mu.size()) != n)
      throw DimensionError("pattern means length does not match node count");
    const double w = pattern_weights.empty() ? 1.0 : pattern_weights[p];
    total_w += w;
    for (int i = 0; i < n; ++i) {
      grad(0, i + 1) += w * mu[i];
      for (int j = i + 1; j < n; ++j) grad(i + 1, j + 1) += w * mu[i] * mu[j];
    }
  }
  if (!(total_w > 0.0)) throw std::invalid_argument("pattern weights sum to zero");
  for (int i = 0; i < n; ++i) {
    grad(0, i + 1) = grad(0, i + 1) / total_w - free_means[i];
    grad(i + 1, 0) = grad(0, i + 1);
    for (int j = i + 1; j < n; ++j) {
      grad(i + 1, j + 1) =
          grad(i + 1, j + 1) / total_w - free_means[i] * free_means[j];
      grad(j + 1, i + 1) = grad(i + 1, j + 1);
    }
  }
  return grad;
}

std::vector<double> draw_initial_means(Rng& rng, int n) {
  std::vector<double> m(n);
  for (double& v : m) v = rng.uniform(-0.1, 0.1);
  return m;
}

}  // namespace bm
