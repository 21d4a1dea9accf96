#pragma once

// Monte Carlo harness: AR(1) null model, mean-shift/variance-rescale
// alternatives on an altered node set, per-replicate test evaluation and
// calibration/FWER/power summaries.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ggmlrt/lrt.hpp"
#include "ggmlrt/matrix.hpp"
#include "ggmlrt/multiplicity.hpp"

namespace ggmlrt {

enum class Statistic { kW = 0, kT = 1 };
std::string_view statistic_name(Statistic s);

struct ScenarioSpec {
  std::string name = "H0";
  int p = 8;
  double rho = 0.4;
  int n1 = 100;
  int n2 = 100;
  double delta_mu = 0.0;
  double xi = 1.0;
  std::vector<int> altered;  // S, one-based; empty under H0
  int b = 2000;
  std::uint64_t master_seed = 1;
  double alpha = 0.05;
  std::vector<int> l_values = {1};

  // Throws DomainError on violated invariants. The Bartlett margin
  // p + 2 <= min(n1, n2) is checked separately by bartlett_feasible().
  void validate() const;
  bool bartlett_feasible() const;

  // Stable identifier, e.g. "S1_p8_n100x100_dmu1.5_xi0.5".
  std::string cell_id() const;
};

struct Mu0Sigma0 {
  std::vector<double> mu0;
  DenseMatrix sigma0;
};

// (rho^{|t-s|})
DenseMatrix ar1_covariance(int p, double rho);

// Mean shifted by delta_mu on `altered`; covariance conjugated by
// diag(d) with d_j = sqrt(xi) on `altered` and 1 elsewhere.
Mu0Sigma0 perturb_params(const Mu0Sigma0& base, const std::vector<int>& altered,
                         double delta_mu, double xi);

struct ReplicateOutcome {
  std::uint64_t replicate_index = 0;
  GlobalTestResult global;
  std::vector<std::vector<SubsetIncrement>> increments;  // parallel to spec.l_values
};

// Group 1 ~ N(0, Sigma0), group 2 ~ perturbed, from derive_stream(seed, r).
TwoSampleData simulate_data(const ScenarioSpec& spec, std::uint64_t r);
ReplicateOutcome simulate_replicate(const ScenarioSpec& spec, std::uint64_t r);

inline constexpr std::size_t kMaxStoredDraws = 5000;

struct SubsetSummary {
  NodeSet m;
  int dof = 0;
  std::array<double, 2> reject{};      // by Statistic, unadjusted at alpha
  std::array<double, 2> mean_delta{};
  std::array<double, 2> ks{};          // vs chi2_{dof}
  std::vector<double> draws_t;         // delta_t, first kMaxStoredDraws replicates
  std::vector<double> draws_w;
};

// [method][statistic], method indexed by Adjustment.
using RateGrid = std::array<std::array<std::optional<double>, 2>, 2>;

struct FamilySummary {
  int l = 0;
  std::vector<SubsetSummary> subsets;
  RateGrid fwer;       // empty when every subset meets the altered set
  RateGrid power_any;  // empty when no subset meets the altered set
  RateGrid power_all;
};

struct MonteCarloSummary {
  ScenarioSpec spec;
  int completed = 0;
  int failures = 0;
  std::array<double, 2> global_reject{};
  double global_ks_uniform_t = 0.0;  // KS of global p_t against U(0, 1)
  std::vector<FamilySummary> families;
  std::vector<double> lambda_hat;    // per node; empty unless 1 is in l_values

  const FamilySummary* family(int l) const;
};

// threads == 0 reads GGMLRT_THREADS, falling back to hardware concurrency.
// The result does not depend on the thread count.
MonteCarloSummary run_scenario(const ScenarioSpec& spec, unsigned threads = 0);

unsigned default_thread_count();

// sup_x |F_n(x) - F(x)| over the sorted sample.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

// max(0, mean_delta - (p + 1))
double estimate_noncentrality(double mean_delta, int p);

struct NoncentralFit {
  int node = 0;
  double lambda_hat = 0.0;
  double ks_noncentral = 0.0;  // delta_t draws vs noncentral chi2_{p+1}(lambda_hat)
  double ks_central = 0.0;
};

std::vector<NoncentralFit> conjecture_check(const MonteCarloSummary& summary);
std::vector<NoncentralFit> conjecture_check(const ScenarioSpec& spec, unsigned threads = 0);

}  // namespace ggmlrt
