#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cdand {

/// Site-survey statistics: scores collected over survey locations plus the
/// surveyed average NLoS probability.
struct SurveyPrior {
  std::vector<double> samples;
  double pi = 0.0;

  void validate(int component_count) const;
};

/// One-dimensional Gaussian mixture with means sorted ascending. Components
/// below the split carry total weight 1-pi (LoS-like), the rest pi.
struct GmmParams {
  int component_count = 0;
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> stds;
  double pi = 0.0;

  int split() const { return (component_count + 1) / 2; }  // ceil(K/2)
  void validate() const;
};

struct CemDiagnostics {
  std::vector<double> loglik;
  int iterations = 0;
  int monotonicity_violations = 0;
};

/// Constrained EM: standard E/M steps, means re-sorted ascending each
/// iteration, mixing weights renormalized within the two partitions so their
/// masses stay at 1-pi and pi. Stops when the log-likelihood change falls
/// below eps or after max_iter iterations.
GmmParams fit_cem(const SurveyPrior& prior, int component_count, std::uint64_t seed,
                  double eps = 1e-3, int max_iter = 200, CemDiagnostics* diag = nullptr);

/// Mixture density and the posterior NLoS probability induced by the upper
/// partition, both evaluated in the log domain.
double gmm_density(const GmmParams& params, double rho);
double gmm_posterior(const GmmParams& params, double rho);

/// Generalized sigmoid phi1 / (1 + exp(-phi2 (rho - phi3))) + phi4 with
/// phi1, phi2, phi4 >= 0 and phi1 + phi4 <= 1.
struct SigmoidParams {
  double phi1 = 0.0;
  double phi2 = 0.0;
  double phi3 = 0.0;
  double phi4 = 0.0;
};

double evaluate_sd(const SigmoidParams& phi, double rho);

/// Deterministic initialization for the sigmoid fit, derived from the fitted
/// mixture (midpoint between the two partition-boundary means, scale-aware
/// slope).
SigmoidParams sigmoid_init_from_gmm(const GmmParams& params);

/// Constrained least squares of the sigmoid against arbitrary targets via
/// projected Levenberg-Marquardt. Never increases the objective relative to
/// the initialization.
SigmoidParams fit_sigmoid_least_squares(std::span<const double> rho,
                                        std::span<const double> target, SigmoidParams init,
                                        double* final_objective = nullptr);

/// Fit the sigmoid to the GMM-induced posterior over the sample points.
SigmoidParams fit_sigmoid(const GmmParams& params, std::span<const double> samples,
                          double* final_objective = nullptr);

/// Fitted score-to-probability mapping.
struct SdMapping {
  GmmParams gmm;
  SigmoidParams phi;
  double pi = 0.0;
  std::uint64_t seed = 0;

  double operator()(double rho) const { return evaluate_sd(phi, rho); }
};

std::string sd_mapping_to_json(const SdMapping& mapping);
SdMapping sd_mapping_from_json(const std::string& text);

namespace detail {
/// Single-component weighted mean/std update, the building block of the
/// M-step (exposed for tests).
void weighted_mean_std(std::span<const double> samples, std::span<const double> resp,
                       double& mean, double& stddev);
}  // namespace detail

}  // namespace cdand
