#pragma once

#include "winfer/distribution.hpp"
#include "winfer/integrate.hpp"
#include "winfer/weight.hpp"

namespace winfer {

// Simple hypothesis p against alternative q, with outcome weight phi.
struct HypothesisProblem {
  Distribution p;
  Distribution q;
  WeightFunction phi;

  void validate() const { check_problem_support(phi, p, q); }
};

// value may be +inf for KL, Chernoff, Renyi, Bhattacharyya.
struct DivergenceValue {
  double value = 0.0;
  double error = 0.0;
  Method method = Method::quadrature;

  bool infinite() const;
};

// The printed Renyi and Tsallis divergences carry 1/(1-alpha), which makes
// them tend to -KL as alpha -> 1. corrected uses 1/(alpha-1).
enum class Convention { corrected, as_printed };

// E_phi(p)
DivergenceValue weighted_mass(const WeightFunction& phi, const Distribution& p,
                              const IntegrationConfig& cfg = {});

DivergenceValue weighted_tv(const HypothesisProblem& prob, const IntegrationConfig& cfg = {});
// Supremum over all 2^m subsets; m <= 20.
double weighted_tv_sup_oracle(const HypothesisProblem& prob);
DivergenceValue delta(const HypothesisProblem& prob, const IntegrationConfig& cfg = {});
DivergenceValue hellinger(const HypothesisProblem& prob, const IntegrationConfig& cfg = {});
DivergenceValue bhattacharyya_coeff(const HypothesisProblem& prob, const IntegrationConfig& cfg = {});
DivergenceValue kl(const HypothesisProblem& prob, const IntegrationConfig& cfg = {});

DivergenceValue chernoff_coeff(const HypothesisProblem& prob, double alpha,
                               const IntegrationConfig& cfg = {});
DivergenceValue chernoff_div(const HypothesisProblem& prob, double alpha,
                             const IntegrationConfig& cfg = {});
// alpha = 1 returns kl.
DivergenceValue renyi_div(const HypothesisProblem& prob, double alpha, const IntegrationConfig& cfg = {},
                          Convention conv = Convention::corrected);
DivergenceValue tsallis_div(const HypothesisProblem& prob, double alpha,
                            const IntegrationConfig& cfg = {},
                            Convention conv = Convention::corrected);
DivergenceValue bhattacharyya_div(const HypothesisProblem& prob, const IntegrationConfig& cfg = {});

DivergenceValue shannon_entropy(const Distribution& p, const WeightFunction& phi,
                                const IntegrationConfig& cfg = {});
DivergenceValue renyi_entropy(const Distribution& p, const WeightFunction& phi, double alpha,
                              const IntegrationConfig& cfg = {});
DivergenceValue renyi_entropy_ext(const Distribution& p, const WeightFunction& phi, double alpha,
                                  double beta, const IntegrationConfig& cfg = {});

}  // namespace winfer
