#include "cdand/sdmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <json.hpp>

#include "cdand/errors.hpp"

namespace cdand {

namespace {

constexpr double kLogSqrt2Pi = 0.9189385332046727;  // ln sqrt(2 pi)

double log_normal_pdf(double x, double mean, double stddev) {
  const double z = (x - mean) / stddev;
  return -0.5 * z * z - std::log(stddev) - kLogSqrt2Pi;
}

double logsumexp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double sample_stddev(std::span<const double> samples) {
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  return std::sqrt(var / static_cast<double>(samples.size()));
}

// k-means++ style seeding over the 1-D samples.
std::vector<double> seed_means(std::span<const double> samples, int k, std::mt19937_64& rng) {
  std::vector<double> centers;
  centers.reserve(k);
  std::uniform_int_distribution<std::size_t> first(0, samples.size() - 1);
  centers.push_back(samples[first(rng)]);
  std::vector<double> dist_sq(samples.size());
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (double c : centers) best = std::min(best, (samples[i] - c) * (samples[i] - c));
      dist_sq[i] = best;
      total += best;
    }
    if (total <= 0.0) {
      centers.push_back(samples[first(rng)]);  // duplicated data, seed anywhere
      continue;
    }
    std::uniform_real_distribution<double> pick(0.0, total);
    double target = pick(rng);
    std::size_t chosen = samples.size() - 1;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      target -= dist_sq[i];
      if (target <= 0.0) { chosen = i; break; }
    }
    centers.push_back(samples[chosen]);
  }
  std::sort(centers.begin(), centers.end());
  return centers;
}

void check_partition_masses(const GmmParams& p) {
  double lower = 0.0, upper = 0.0;
  for (int k = 0; k < p.component_count; ++k)
    (k < p.split() ? lower : upper) += p.weights[k];
  if (std::abs(lower - (1.0 - p.pi)) > 1e-9 || std::abs(upper - p.pi) > 1e-9)
    throw std::logic_error("fit_cem: partition masses drifted from the prior");
}

double project_unit(double v) { return std::clamp(v, 0.0, 1.0); }

void project_sigmoid(SigmoidParams& p) {
  p.phi1 = std::max(p.phi1, 0.0);
  p.phi2 = std::max(p.phi2, 0.0);
  p.phi4 = std::max(p.phi4, 0.0);
  if (p.phi1 + p.phi4 > 1.0) {
    // nearest point on the simplex edge within the nonnegative quadrant
    double x = (p.phi1 - p.phi4 + 1.0) / 2.0;
    x = std::clamp(x, 0.0, 1.0);
    p.phi1 = x;
    p.phi4 = 1.0 - x;
  }
}

double evaluate_sd_raw(const SigmoidParams& p, double rho) {
  return p.phi1 / (1.0 + std::exp(-p.phi2 * (rho - p.phi3))) + p.phi4;
}

double sigmoid_objective(std::span<const double> rho, std::span<const double> target,
                         const SigmoidParams& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double r = evaluate_sd_raw(p, rho[i]) - target[i];
    s += r * r;
  }
  return s;
}

}  // namespace

void SurveyPrior::validate(int component_count) const {
  if (!(pi > 0.0) || !(pi < 1.0))
    throw InsufficientLabels("survey prior: pi must lie strictly inside (0,1)");
  if (static_cast<int>(samples.size()) < 10 * component_count)
    throw InvalidConfig("survey prior: need at least 10*K score samples");
  for (double s : samples)
    if (!std::isfinite(s)) throw InvalidConfig("survey prior: non-finite score sample");
}

void GmmParams::validate() const {
  if (component_count < 2 || static_cast<int>(weights.size()) != component_count ||
      static_cast<int>(means.size()) != component_count ||
      static_cast<int>(stds.size()) != component_count)
    throw InvalidConfig("gmm: inconsistent parameter vectors");
  for (int k = 0; k + 1 < component_count; ++k)
    if (means[k] > means[k + 1]) throw InvalidConfig("gmm: means not sorted");
  for (double s : stds)
    if (!(s > 0.0)) throw InvalidConfig("gmm: nonpositive std");
  check_partition_masses(*this);
}

namespace detail {
void weighted_mean_std(std::span<const double> samples, std::span<const double> resp,
                       double& mean, double& stddev) {
  double total = 0.0, acc = 0.0;
  for (std::size_t q = 0; q < samples.size(); ++q) {
    total += resp[q];
    acc += resp[q] * samples[q];
  }
  mean = acc / total;
  double var = 0.0;
  for (std::size_t q = 0; q < samples.size(); ++q)
    var += resp[q] * (samples[q] - mean) * (samples[q] - mean);
  stddev = std::sqrt(var / total);
}
}  // namespace detail

GmmParams fit_cem(const SurveyPrior& prior, int component_count, std::uint64_t seed, double eps,
                  int max_iter, CemDiagnostics* diag) {
  if (component_count < 2) throw InvalidConfig("fit_cem: need at least 2 components");
  prior.validate(component_count);
  const auto& samples = prior.samples;
  const std::size_t q_count = samples.size();
  const int k_count = component_count;
  const int split = (k_count + 1) / 2;

  const double overall_std = sample_stddev(samples);
  const double std_floor = 1e-6 * overall_std;
  if (overall_std <= 0.0)
    throw DegenerateComponent("fit_cem: zero-variance sample set");

  GmmParams p;
  p.component_count = k_count;
  p.pi = prior.pi;
  std::mt19937_64 rng(seed);
  p.means = seed_means(samples, k_count, rng);
  p.stds.assign(k_count, overall_std);
  p.weights.resize(k_count);
  for (int k = 0; k < k_count; ++k)
    p.weights[k] = k < split ? (1.0 - prior.pi) / split : prior.pi / (k_count - split);

  if (diag) *diag = CemDiagnostics{};
  std::vector<double> log_terms(k_count);
  std::vector<std::vector<double>> resp(k_count, std::vector<double>(q_count));
  std::vector<double> resp_sums(k_count);
  double prev_loglik = -std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < max_iter; ++iter) {
    // E-step in the log domain
    std::fill(resp_sums.begin(), resp_sums.end(), 0.0);
    for (std::size_t q = 0; q < q_count; ++q) {
      for (int k = 0; k < k_count; ++k)
        log_terms[k] = std::log(p.weights[k]) + log_normal_pdf(samples[q], p.means[k], p.stds[k]);
      const double lse = logsumexp(log_terms);
      for (int k = 0; k < k_count; ++k) {
        const double z = std::exp(log_terms[k] - lse);
        resp[k][q] = z;
        resp_sums[k] += z;
      }
    }
    for (int k = 0; k < k_count; ++k)
      if (resp_sums[k] < 1e-12)
        throw EmptyResponsibility("fit_cem: component " + std::to_string(k) +
                                  " lost all responsibility");

    // M-step: means/stds as in standard EM
    std::vector<double> new_means(k_count), new_stds(k_count);
    for (int k = 0; k < k_count; ++k) {
      detail::weighted_mean_std(samples, resp[k], new_means[k], new_stds[k]);
      if (new_stds[k] < std_floor)
        throw DegenerateComponent("fit_cem: component " + std::to_string(k) + " collapsed");
    }

    // sort means ascending, permuting the companion quantities
    std::vector<int> order(k_count);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return new_means[a] < new_means[b]; });
    std::vector<double> sums_sorted(k_count);
    for (int k = 0; k < k_count; ++k) {
      p.means[k] = new_means[order[k]];
      p.stds[k] = new_stds[order[k]];
      sums_sorted[k] = resp_sums[order[k]];
    }

    // renormalize mixing weights within each partition to pin the prior mass
    double lower_sum = 0.0, upper_sum = 0.0;
    for (int k = 0; k < k_count; ++k) (k < split ? lower_sum : upper_sum) += sums_sorted[k];
    if (lower_sum <= 0.0 || upper_sum <= 0.0)
      throw EmptyResponsibility("fit_cem: a partition lost all responsibility");
    for (int k = 0; k < k_count; ++k)
      p.weights[k] = k < split ? (1.0 - prior.pi) * sums_sorted[k] / lower_sum
                               : prior.pi * sums_sorted[k] / upper_sum;
    check_partition_masses(p);

    // log-likelihood of the post-sort state
    double loglik = 0.0;
    for (std::size_t q = 0; q < q_count; ++q) {
      for (int k = 0; k < k_count; ++k)
        log_terms[k] = std::log(p.weights[k]) + log_normal_pdf(samples[q], p.means[k], p.stds[k]);
      loglik += logsumexp(log_terms);
    }
    if (diag) {
      diag->loglik.push_back(loglik);
      diag->iterations = iter + 1;
      if (iter > 0 && loglik < prev_loglik - 1e-9 * (1.0 + std::abs(prev_loglik)))
        diag->monotonicity_violations++;
    }
    const bool converged = iter > 0 && std::abs(loglik - prev_loglik) <= eps;
    prev_loglik = loglik;
    if (converged) break;
  }
  return p;
}

double gmm_density(const GmmParams& p, double rho) {
  std::vector<double> log_terms(p.component_count);
  for (int k = 0; k < p.component_count; ++k)
    log_terms[k] = std::log(p.weights[k]) + log_normal_pdf(rho, p.means[k], p.stds[k]);
  return std::exp(logsumexp(log_terms));
}

double gmm_posterior(const GmmParams& p, double rho) {
  std::vector<double> all(p.component_count);
  for (int k = 0; k < p.component_count; ++k)
    all[k] = std::log(p.weights[k]) + log_normal_pdf(rho, p.means[k], p.stds[k]);
  const double den = logsumexp(all);
  std::vector<double> upper(all.begin() + p.split(), all.end());
  const double num = logsumexp(upper);
  if (!std::isfinite(den)) return 0.0;  // no mass anywhere representable
  return project_unit(std::exp(num - den));
}

double evaluate_sd(const SigmoidParams& p, double rho) {
  return project_unit(evaluate_sd_raw(p, rho));
}

SigmoidParams sigmoid_init_from_gmm(const GmmParams& p) {
  const int split = p.split();
  SigmoidParams init;
  const double mu_lo = p.means[split - 1];
  const double mu_hi = split < p.component_count ? p.means[split] : p.means[split - 1];
  const double w_lo = p.weights[split - 1];
  const double w_hi = split < p.component_count ? p.weights[split] : p.weights[split - 1];
  init.phi3 = (w_lo + w_hi) > 0.0 ? (w_lo * mu_lo + w_hi * mu_hi) / (w_lo + w_hi)
                                  : (mu_lo + mu_hi) / 2.0;
  const double gap = mu_hi - mu_lo;
  init.phi2 = gap > 1e-9 ? 4.0 / gap : 1.0;
  init.phi1 = std::min(1.0, p.pi * 1.5);
  init.phi4 = 0.01;
  project_sigmoid(init);
  return init;
}

SigmoidParams fit_sigmoid_least_squares(std::span<const double> rho,
                                        std::span<const double> target, SigmoidParams init,
                                        double* final_objective) {
  if (rho.size() != target.size())
    throw std::invalid_argument("fit_sigmoid: sample/target length mismatch");
  if (rho.size() < 4) throw InvalidConfig("fit_sigmoid: need at least 4 sample points");

  project_sigmoid(init);
  SigmoidParams p = init;
  double cost = sigmoid_objective(rho, target, p);
  if (!std::isfinite(cost)) throw FitDiverged("fit_sigmoid: non-finite objective");
  double damping = 1e-3;

  for (int iter = 0; iter < 500; ++iter) {
    double jtj[4][4] = {};
    double jtr[4] = {};
    for (std::size_t i = 0; i < rho.size(); ++i) {
      const double t = -p.phi2 * (rho[i] - p.phi3);
      const double s = 1.0 / (1.0 + std::exp(t));
      const double ds = s * (1.0 - s);
      const double row[4] = {s, p.phi1 * ds * (rho[i] - p.phi3), -p.phi1 * p.phi2 * ds, 1.0};
      const double r = p.phi1 * s + p.phi4 - target[i];
      for (int a = 0; a < 4; ++a) {
        jtr[a] += row[a] * r;
        for (int b = 0; b < 4; ++b) jtj[a][b] += row[a] * row[b];
      }
    }

    // damped normal equations, 4x4 Gaussian elimination with partial pivoting
    double m[4][5];
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) m[a][b] = jtj[a][b];
      m[a][a] += damping * (1.0 + jtj[a][a]);
      m[a][4] = -jtr[a];
    }
    bool singular = false;
    for (int col = 0; col < 4 && !singular; ++col) {
      int piv = col;
      for (int r2 = col + 1; r2 < 4; ++r2)
        if (std::abs(m[r2][col]) > std::abs(m[piv][col])) piv = r2;
      if (std::abs(m[piv][col]) < 1e-300) { singular = true; break; }
      std::swap(m[col], m[piv]);
      for (int r2 = col + 1; r2 < 4; ++r2) {
        const double f = m[r2][col] / m[col][col];
        for (int c2 = col; c2 < 5; ++c2) m[r2][c2] -= f * m[col][c2];
      }
    }
    double step[4] = {};
    if (!singular) {
      for (int a = 3; a >= 0; --a) {
        double acc = m[a][4];
        for (int b = a + 1; b < 4; ++b) acc -= m[a][b] * step[b];
        step[a] = acc / m[a][a];
      }
    }
    const double step_norm =
        std::sqrt(step[0] * step[0] + step[1] * step[1] + step[2] * step[2] + step[3] * step[3]);
    if (singular || step_norm < 1e-12 * (1.0 + std::abs(p.phi1) + std::abs(p.phi2) +
                                         std::abs(p.phi3) + std::abs(p.phi4))) {
      if (singular) damping *= 10.0;
      else break;
      if (damping > 1e12) break;
      continue;
    }

    SigmoidParams cand{p.phi1 + step[0], p.phi2 + step[1], p.phi3 + step[2], p.phi4 + step[3]};
    project_sigmoid(cand);
    const double cand_cost = sigmoid_objective(rho, target, cand);
    if (!std::isfinite(cand_cost)) throw FitDiverged("fit_sigmoid: non-finite objective");
    if (cand_cost <= cost) {
      p = cand;
      cost = cand_cost;
      damping = std::max(damping / 3.0, 1e-12);
    } else {
      damping *= 4.0;
      if (damping > 1e12) break;
    }
  }
  if (final_objective) *final_objective = cost;
  return p;
}

SigmoidParams fit_sigmoid(const GmmParams& params, std::span<const double> samples,
                          double* final_objective) {
  params.validate();
  std::vector<double> target(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) target[i] = gmm_posterior(params, samples[i]);
  return fit_sigmoid_least_squares(samples, target, sigmoid_init_from_gmm(params),
                                   final_objective);
}

std::string sd_mapping_to_json(const SdMapping& mapping) {
  nlohmann::json j;
  j["K"] = mapping.gmm.component_count;
  j["alpha"] = mapping.gmm.weights;
  j["mu"] = mapping.gmm.means;
  j["sigma"] = mapping.gmm.stds;
  j["phi"] = {mapping.phi.phi1, mapping.phi.phi2, mapping.phi.phi3, mapping.phi.phi4};
  j["pi"] = mapping.pi;
  j["seed"] = mapping.seed;
  return j.dump(2);
}

SdMapping sd_mapping_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("sd mapping: ") + e.what());
  }
  try {
    SdMapping m;
    m.gmm.component_count = j.at("K").get<int>();
    m.gmm.weights = j.at("alpha").get<std::vector<double>>();
    m.gmm.means = j.at("mu").get<std::vector<double>>();
    m.gmm.stds = j.at("sigma").get<std::vector<double>>();
    const auto phi = j.at("phi").get<std::vector<double>>();
    if (phi.size() != 4) throw SchemaMismatch("sd mapping: phi must hold 4 values");
    m.phi = {phi[0], phi[1], phi[2], phi[3]};
    m.pi = j.at("pi").get<double>();
    m.gmm.pi = m.pi;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.gmm.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaMismatch(std::string("sd mapping: ") + e.what());
  }
}

}  // namespace cdand
