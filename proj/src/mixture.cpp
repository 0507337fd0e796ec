#include "bm/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace bm {

namespace {

double q_of(double mean, int spin) { return 0.5 * (1.0 + spin * mean); }

// rho[l][k][i] = sum_s R_i(s|l) q_ki(s): the per-site overlap between the
// smoothing table of component l and the marginals of component k. All the
// configuration sums in I_lambda reduce to products of these.
struct RhoTable {
  int n_comp = 0;
  int n_nodes = 0;
  std::vector<double> rho;

  static RhoTable build(const MixtureParams& p) {
    RhoTable t;
    t.n_comp = p.n_components();
    t.n_nodes = p.n_nodes();
    t.rho.resize(static_cast<std::size_t>(t.n_comp) * t.n_comp * t.n_nodes);
    for (int l = 0; l < t.n_comp; ++l)
      for (int k = 0; k < t.n_comp; ++k)
        for (int i = 0; i < t.n_nodes; ++i) t.refresh(p, l, k, i);
    return t;
  }

  double& at(int l, int k, int i) {
    return rho[(static_cast<std::size_t>(l) * n_comp + k) * n_nodes + i];
  }
  double at(int l, int k, int i) const {
    return rho[(static_cast<std::size_t>(l) * n_comp + k) * n_nodes + i];
  }

  void refresh(const MixtureParams& p, int l, int k, int i) {
    at(l, k, i) = p.smoothing[l][i][0] * q_of(p.means[k][i], -1) +
                  p.smoothing[l][i][1] * q_of(p.means[k][i], +1);
  }

  double log_prod(int l, int k) const {
    double s = 0.0;
    for (int i = 0; i < n_nodes; ++i) s += std::log(at(l, k, i));
    return s;
  }
  double log_prod_excluding(int l, int k, int skip) const {
    double s = 0.0;
    for (int i = 0; i < n_nodes; ++i)
      if (i != skip) s += std::log(at(l, k, i));
    return s;
  }
};

// pi_l = sum_k alpha_k exp(sum_i ln rho_lki); products go through logs so
// long chains of small per-site overlaps cannot underflow pairwise.
double overlap_from_rho(const MixtureParams& p, const RhoTable& rho, int l) {
  double pi = 0.0;
  for (int k = 0; k < p.n_components(); ++k)
    pi += p.alphas[k] * std::exp(rho.log_prod(l, k));
  return pi;
}

// sum_i sum_s q_li(s) ln R_i(s|l)
double smoothing_cross_entropy(const MixtureParams& p, int l) {
  double a = 0.0;
  const int n = p.n_nodes();
  for (int i = 0; i < n; ++i) {
    a += q_of(p.means[l][i], -1) * std::log(p.smoothing[l][i][0]) +
         q_of(p.means[l][i], +1) * std::log(p.smoothing[l][i][1]);
  }
  return a;
}

double mutual_info_lb_impl(const MixtureParams& p, const RhoTable& rho) {
  const int K = p.n_components();
  double term_r = 0.0;      // sum_l alpha_l sum_S Q_l ln R(S|l)
  double term_alpha = 0.0;  // -sum_l alpha_l ln alpha_l
  double term_pi = 0.0;     // -sum_l lambda_l pi_l
  double term_lam = 0.0;    // sum_l alpha_l ln lambda_l
  for (int l = 0; l < K; ++l) {
    if (p.alphas[l] > 0.0) {
      term_r += p.alphas[l] * smoothing_cross_entropy(p, l);
      term_alpha -= p.alphas[l] * std::log(p.alphas[l]);
      term_lam += p.alphas[l] * std::log(p.lambdas[l]);
    }
    term_pi -= p.lambdas[l] * overlap_from_rho(p, rho, l);
  }
  return term_r + term_alpha + term_pi + term_lam + 1.0;
}

void update_lambdas_inplace(MixtureParams& p, const RhoTable& rho) {
  for (int l = 0; l < p.n_components(); ++l) {
    if (p.alphas[l] > 0.0)
      p.lambdas[l] = p.alphas[l] / std::max(overlap_from_rho(p, rho, l), 1e-300);
  }
}

// Coordinate-wise stationary point of I_lambda in R_i(.|l):
//   R_i(s|l) = alpha_l q_li(s) / (lambda_l sum_k alpha_k q_ki(s) prod_{i'!=i} rho_lki')
// I_lambda is concave in each site table (log term plus a linear term), so
// this is the exact per-site maximizer. Sites are swept sequentially with rho
// refreshed after each one; distinct components do not interact. Afterwards
// each table is normalized with the scale absorbed into lambda_l, which is a
// gauge transformation leaving I_lambda invariant.
void update_smoothing_inplace(MixtureParams& p, RhoTable& rho, int* floor_hits) {
  const int K = p.n_components();
  const int n = p.n_nodes();
  for (int l = 0; l < K; ++l) {
    if (p.alphas[l] == 0.0) continue;
    for (int i = 0; i < n; ++i) {
      double denom[2] = {0.0, 0.0};
      for (int k = 0; k < K; ++k) {
        if (p.alphas[k] == 0.0) continue;
        const double part = p.alphas[k] * std::exp(rho.log_prod_excluding(l, k, i));
        denom[0] += part * q_of(p.means[k][i], -1);
        denom[1] += part * q_of(p.means[k][i], +1);
      }
      for (int s = 0; s < 2; ++s) {
        const int spin = s == 0 ? -1 : +1;
        double r = p.alphas[l] * q_of(p.means[l][i], spin) /
                   std::max(p.lambdas[l] * denom[s], 1e-300);
        if (r < kSmoothingFloor) {
          r = kSmoothingFloor;
          if (floor_hits) ++*floor_hits;
        }
        p.smoothing[l][i][s] = r;
      }
      for (int k = 0; k < K; ++k) rho.refresh(p, l, k, i);
    }
    // Gauge fix: normalize each site table; lambda_l absorbs the product of
    // the normalizers.
    double log_scale = 0.0;
    for (int i = 0; i < n; ++i) {
      const double z = p.smoothing[l][i][0] + p.smoothing[l][i][1];
      p.smoothing[l][i][0] /= z;
      p.smoothing[l][i][1] /= z;
      for (int s = 0; s < 2; ++s) {
        if (p.smoothing[l][i][s] < kSmoothingFloor) {
          p.smoothing[l][i][s] = kSmoothingFloor;
          if (floor_hits) ++*floor_hits;
        }
      }
      log_scale += std::log(z);
      for (int k = 0; k < K; ++k) rho.refresh(p, l, k, i);
    }
    p.lambdas[l] = std::max(p.lambdas[l] * std::exp(log_scale), 1e-300);
  }
}

// The total bound as a function of alpha is sum_k alpha_k beta_k
// + sum_k alpha_k ln alpha_k - 1 with everything else fixed: convex, so the
// simplex minimizer is the softmax of -beta.
void update_alphas_inplace(MixtureParams& p, const RhoTable& rho, const Network& net,
                           Temperature T) {
  const int K = p.n_components();
  if (K == 1) {
    p.alphas[0] = 1.0;
    return;
  }
  std::vector<double> beta(K);
  for (int k = 0; k < K; ++k) {
    const auto [e_over_t, h] = mf_energy_entropy(net, p.means[k], T);
    double d = 0.0;
    for (int l = 0; l < K; ++l) d += p.lambdas[l] * std::exp(rho.log_prod(l, k));
    beta[k] = (e_over_t - h) - smoothing_cross_entropy(p, k) - std::log(p.lambdas[k]) + d;
  }
  const double shift = *std::min_element(beta.begin(), beta.end());
  double norm = 0.0;
  for (int k = 0; k < K; ++k) {
    p.alphas[k] = std::exp(-(beta[k] - shift));
    norm += p.alphas[k];
  }
  for (int k = 0; k < K; ++k) p.alphas[k] /= norm;
}

// Per-site stationary update of m_li. The bound is convex in each mean (the
// entropy supplies the curvature; the energy and I_lambda pieces are linear),
// so  m_li = tanh( field_i/T + forcing )  with
//   forcing = (1/2) ln(R_i(+|l)/R_i(-|l))
//           - (1/2) sum_j lambda_j (R_i(+|j)-R_i(-|j)) prod_{i'!=i} rho_jli'
// is the exact coordinate minimizer.
void update_means_inplace(MixtureParams& p, RhoTable& rho, const Network& net,
                          Temperature T) {
  const int K = p.n_components();
  const int n = p.n_nodes();
  for (int l = 0; l < K; ++l) {
    if (p.alphas[l] == 0.0) continue;
    auto& m = p.means[l];
    for (int i = 0; i < n; ++i) {
      double field = net.bias(i);
      for (int j : net.neighbors(i)) field += net.weight(i, j) * m[j];
      double repel = 0.0;
      for (int j = 0; j < K; ++j) {
        repel += p.lambdas[j] * (p.smoothing[j][i][1] - p.smoothing[j][i][0]) *
                 std::exp(rho.log_prod_excluding(j, l, i));
      }
      const double forcing =
          0.5 * std::log(p.smoothing[l][i][1] / p.smoothing[l][i][0]) - 0.5 * repel;
      m[i] = std::tanh(field / T.value + forcing);
      for (int j = 0; j < K; ++j) rho.refresh(p, j, l, i);
    }
  }
}

BoundBreakdown bound_impl(const MixtureParams& p, const RhoTable& rho,
                          const Network& net, Temperature T) {
  BoundBreakdown b{0.0, 0.0, 0.0, 0.0};
  for (int l = 0; l < p.n_components(); ++l) {
    if (p.alphas[l] == 0.0) continue;
    const auto [e_over_t, h] = mf_energy_entropy(net, p.means[l], T);
    b.energy_term += p.alphas[l] * e_over_t;
    b.entropy_term += p.alphas[l] * h;
  }
  b.mutual_info_lb = mutual_info_lb_impl(p, rho);
  b.total = (b.energy_term - b.entropy_term) - b.mutual_info_lb;
  return b;
}

}  // namespace

void MixtureParams::validate() const {
  const int K = n_components();
  if (K < 1) throw std::invalid_argument("mixture needs at least one component");
  const int n = n_nodes();
  if (n < 1) throw std::invalid_argument("mixture needs at least one node");
  if (static_cast<int>(means.size()) != K ||
      static_cast<int>(smoothing.size()) != K ||
      static_cast<int>(lambdas.size()) != K)
    throw DimensionError("mixture parameter blocks disagree on component count");
  double alpha_sum = 0.0;
  for (double a : alphas) {
    if (!(a >= 0.0)) throw std::invalid_argument("mixing weights must be nonnegative");
    alpha_sum += a;
  }
  if (std::abs(alpha_sum - 1.0) > 1e-9)
    throw std::invalid_argument("mixing weights must sum to 1");
  for (int l = 0; l < K; ++l) {
    if (static_cast<int>(means[l].size()) != n ||
        static_cast<int>(smoothing[l].size()) != n)
      throw DimensionError("mixture parameter blocks disagree on node count");
    for (double m : means[l])
      if (!(m >= -1.0 && m <= 1.0))
        throw std::invalid_argument("component means must lie in [-1, 1]");
    for (const auto& r : smoothing[l])
      if (!(r[0] > 0.0) || !(r[1] > 0.0))
        throw std::invalid_argument("smoothing tables must be strictly positive");
    if (!(lambdas[l] > 0.0))
      throw std::invalid_argument("lambdas must be strictly positive");
  }
}

MixtureParams mixture_init(int n_components, int n_nodes, Rng& rng) {
  if (n_components < 1) throw std::invalid_argument("need at least one component");
  MixtureParams p;
  p.alphas.assign(n_components, 1.0 / n_components);
  p.means.reserve(n_components);
  for (int l = 0; l < n_components; ++l) p.means.push_back(draw_initial_means(rng, n_nodes));
  p.smoothing.assign(n_components,
                     std::vector<std::array<double, 2>>(n_nodes, {0.5, 0.5}));
  p.lambdas.assign(n_components, 1.0);
  return update_lambdas(std::move(p));
}

double mix_prob(const MixtureParams& params, std::span<const std::int8_t> s) {
  params.validate();
  validate_spins(s, params.n_nodes());
  double total = 0.0;
  for (int l = 0; l < params.n_components(); ++l) {
    double q = params.alphas[l];
    for (int i = 0; i < params.n_nodes(); ++i) q *= q_of(params.means[l][i], s[i]);
    total += q;
  }
  return total;
}

double component_overlap(const MixtureParams& params, int l) {
  params.validate();
  if (l < 0 || l >= params.n_components())
    throw std::out_of_range("component index out of range");
  return overlap_from_rho(params, RhoTable::build(params), l);
}

double mutual_info_exact(const MixtureParams& params) {
  params.validate();
  const int n = params.n_nodes();
  const int K = params.n_components();
  if (n > kEnumerationLimit)
    throw EnumerationLimitError("mutual_info_exact limited to " +
                                std::to_string(kEnumerationLimit) + " nodes");
  double info = 0.0;
  std::vector<std::int8_t> s(n);
  const std::uint64_t total = std::uint64_t{1} << n;
  std::vector<double> q(K);
  for (std::uint64_t code = 0; code < total; ++code) {
    for (int i = 0; i < n; ++i)
      s[i] = (code >> i) & 1 ? std::int8_t{1} : std::int8_t{-1};
    double mix = 0.0;
    for (int l = 0; l < K; ++l) {
      q[l] = 1.0;
      for (int i = 0; i < n; ++i) q[l] *= q_of(params.means[l][i], s[i]);
      mix += params.alphas[l] * q[l];
    }
    for (int l = 0; l < K; ++l) {
      if (params.alphas[l] == 0.0 || q[l] == 0.0) continue;
      info += params.alphas[l] * q[l] * std::log(q[l] / mix);
    }
  }
  return info;
}

double mutual_info_lower_bound(const MixtureParams& params) {
  params.validate();
  return mutual_info_lb_impl(params, RhoTable::build(params));
}

MixtureParams update_lambdas(MixtureParams params) {
  params.validate();
  const RhoTable rho = RhoTable::build(params);
  update_lambdas_inplace(params, rho);
  return params;
}

MixtureParams update_smoothing(MixtureParams params, int* floor_hits) {
  params.validate();
  RhoTable rho = RhoTable::build(params);
  update_smoothing_inplace(params, rho, floor_hits);
  return params;
}

MixtureParams update_alphas(MixtureParams params, const Network& net, Temperature T) {
  params.validate();
  if (params.n_nodes() != net.size())
    throw DimensionError("mixture and network disagree on node count");
  const RhoTable rho = RhoTable::build(params);
  update_alphas_inplace(params, rho, net, T);
  return params;
}

MixtureParams update_component_means(MixtureParams params, const Network& net,
                                     Temperature T) {
  params.validate();
  if (params.n_nodes() != net.size())
    throw DimensionError("mixture and network disagree on node count");
  RhoTable rho = RhoTable::build(params);
  update_means_inplace(params, rho, net, T);
  return params;
}

BoundBreakdown mixture_free_bound(const MixtureParams& params, const Network& net,
                                  Temperature T) {
  params.validate();
  if (params.n_nodes() != net.size())
    throw DimensionError("mixture and network disagree on node count");
  return bound_impl(params, RhoTable::build(params), net, T);
}

MixtureResult optimize_mixture_at(const Network& net, Temperature T,
                                  MixtureParams init,
                                  const FixedPointSettings& settings) {
  settings.validate();
  init.validate();
  if (init.n_nodes() != net.size())
    throw DimensionError("mixture and network disagree on node count");

  MixtureResult res;
  res.params = std::move(init);
  RhoTable rho = RhoTable::build(res.params);
  double prev = bound_impl(res.params, rho, net, T).total;
  for (int cycle = 1; cycle <= settings.max_sweeps; ++cycle) {
    update_means_inplace(res.params, rho, net, T);
    update_smoothing_inplace(res.params, rho, &res.floor_hits);
    update_lambdas_inplace(res.params, rho);
    update_alphas_inplace(res.params, rho, net, T);
    const double total = bound_impl(res.params, rho, net, T).total;
    res.trace.push_back({T.value, cycle, total});
    res.cycles = cycle;
    if (std::abs(total - prev) <= settings.rel_tol * std::max(std::abs(prev), 1e-12)) {
      res.converged = true;
      break;
    }
    prev = total;
  }
  return res;
}

MixtureResult optimize_mixture(const Network& net, const AnnealSchedule& schedule,
                               MixtureParams init, const FixedPointSettings& settings) {
  schedule.validate();
  MixtureResult res;
  res.params = std::move(init);
  for (double t : schedule.temperatures) {
    MixtureResult stage =
        optimize_mixture_at(net, Temperature(t), std::move(res.params), settings);
    res.params = std::move(stage.params);
    res.converged = stage.converged;
    res.cycles = stage.cycles;
    res.floor_hits += stage.floor_hits;
    res.trace.insert(res.trace.end(), stage.trace.begin(), stage.trace.end());
  }
  return res;
}

Matrix mixture_pair_correlations(const MixtureParams& params) {
  params.validate();
  const int n = params.n_nodes();
  Matrix corr = Matrix::zeros(n + 1, n + 1);
  for (int l = 0; l < params.n_components(); ++l) {
    const double a = params.alphas[l];
    const auto& m = params.means[l];
    for (int i = 0; i < n; ++i) {
      corr(0, i + 1) += a * m[i];
      for (int j = i + 1; j < n; ++j) corr(i + 1, j + 1) += a * m[i] * m[j];
    }
  }
  corr(0, 0) = 1.0;
  for (int i = 0; i < n; ++i) {
    corr(i + 1, i + 1) = 1.0;
    corr(i + 1, 0) = corr(0, i + 1);
    for (int j = i + 1; j < n; ++j) corr(j + 1, i + 1) = corr(i + 1, j + 1);
  }
  return corr;
}

Matrix mixture_learning_gradient(const std::vector<std::vector<double>>& mu_per_pattern,
                                 std::span<const double> pattern_weights,
                                 const MixtureParams& params) {
  const Matrix free_corr = mixture_pair_correlations(params);
  const int n = params.n_nodes();
  if (mu_per_pattern.empty()) throw std::invalid_argument("no patterns");
  if (!pattern_weights.empty() && pattern_weights.size() != mu_per_pattern.size())
    throw DimensionError("pattern weight count does not match pattern count");

  Matrix grad = Matrix::zeros(n + 1, n + 1);
  double total_w = 0.0;
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
    grad(0, i + 1) = grad(0, i + 1) / total_w - free_corr(0, i + 1);
    grad(i + 1, 0) = grad(0, i + 1);
    for (int j = i + 1; j < n; ++j) {
      grad(i + 1, j + 1) = grad(i + 1, j + 1) / total_w - free_corr(i + 1, j + 1);
      grad(j + 1, i + 1) = grad(i + 1, j + 1);
    }
  }
  return grad;
}

std::string mixture_to_json(const MixtureParams& params) {
  params.validate();
  nlohmann::ordered_json j;
  j["components"] = params.n_components();
  j["nodes"] = params.n_nodes();
  j["alphas"] = params.alphas;
  j["means"] = params.means;
  auto tables = nlohmann::ordered_json::array();
  for (const auto& comp : params.smoothing) {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : comp) rows.push_back({r[0], r[1]});
    tables.push_back(rows);
  }
  j["smoothing"] = tables;
  j["lambdas"] = params.lambdas;
  return j.dump(2) + "\n";
}

MixtureParams mixture_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("mixture parse error: ") + e.what());
  }
  MixtureParams p;
  p.alphas = j.at("alphas").get<std::vector<double>>();
  p.means = j.at("means").get<std::vector<std::vector<double>>>();
  p.lambdas = j.at("lambdas").get<std::vector<double>>();
  for (const auto& comp : j.at("smoothing")) {
    std::vector<std::array<double, 2>> rows;
    for (const auto& r : comp) rows.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
    p.smoothing.push_back(std::move(rows));
  }
  p.validate();
  return p;
}

void save_mixture(const MixtureParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << mixture_to_json(params);
  if (!out) throw std::runtime_error("write failed: " + path);
}

MixtureParams load_mixture(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return mixture_from_json(ss.str());
}

}  // namespace bm
