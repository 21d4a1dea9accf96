#include "ggmlrt/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "ggmlrt/error.hpp"
#include "ggmlrt/random.hpp"
#include "ggmlrt/special.hpp"

namespace ggmlrt {

std::string_view statistic_name(Statistic s) { return s == Statistic::kW ? "W" : "T"; }

namespace {

std::string short_number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

// Everything a replicate needs that does not depend on the replicate index.
struct ScenarioModel {
  std::vector<double> mean1;
  std::vector<double> mean2;
  SpdFactor chol1;
  SpdFactor chol2;

  explicit ScenarioModel(const ScenarioSpec& spec)
      : ScenarioModel(spec, Mu0Sigma0{std::vector<double>(static_cast<std::size_t>(spec.p), 0.0),
                                      ar1_covariance(spec.p, spec.rho)}) {}

 private:
  ScenarioModel(const ScenarioSpec& spec, const Mu0Sigma0& base)
      : ScenarioModel(base, perturb_params(base, spec.altered, spec.delta_mu, spec.xi)) {}
  ScenarioModel(const Mu0Sigma0& base, const Mu0Sigma0& alt)
      : mean1(base.mu0), mean2(alt.mu0), chol1(cholesky(base.sigma0)),
        chol2(cholesky(alt.sigma0)) {}
};

TwoSampleData draw_data(const ScenarioSpec& spec, const ScenarioModel& model, std::uint64_t r) {
  const RandomSource stream = derive_stream(spec.master_seed, r);
  MvnDraw g1 = mvn_sample(stream, model.mean1, model.chol1, static_cast<std::size_t>(spec.n1));
  MvnDraw g2 = mvn_sample(g1.next, model.mean2, model.chol2, static_cast<std::size_t>(spec.n2));
  return TwoSampleData(std::move(g1.x), std::move(g2.x));
}

ReplicateOutcome run_replicate(const ScenarioSpec& spec, const ScenarioModel& model,
                               std::uint64_t r) {
  const TwoSampleData data = draw_data(spec, model, r);

  ReplicateOutcome out;
  out.replicate_index = r;
  const SampleMoments moments = sample_moments(data);
  out.global = adjusted_t(moments);
  for (const int l : spec.l_values) out.increments.push_back(increment_scan(moments, out.global, l));
  return out;
}

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

double rate(long hits, int total) {
  return total > 0 ? static_cast<double>(hits) / total : 0.0;
}

}  // namespace

void ScenarioSpec::validate() const {
  if (p < 2) throw DomainError("scenario requires p >= 2");
  if (!(std::abs(rho) < 1.0)) throw DomainError("scenario requires |rho| < 1");
  if (n1 < 2 || n2 < 2) throw DomainError("scenario requires n1, n2 >= 2");
  if (!(xi > 0.0) || !std::isfinite(xi)) throw DomainError("scenario requires xi > 0");
  if (!std::isfinite(delta_mu)) throw DomainError("scenario requires finite delta_mu");
  if (b < 1) throw DomainError("scenario requires b >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (!altered.empty()) NodeSet(altered, p);
  if (altered.empty() && (delta_mu != 0.0 || xi != 1.0)) {
    throw DomainError("an empty altered set requires delta_mu = 0 and xi = 1");
  }
  if (l_values.empty()) throw DomainError("scenario requires at least one l value");
  for (std::size_t i = 0; i < l_values.size(); ++i) {
    if (l_values[i] < 1 || l_values[i] > p - 1) throw DomainError("l values must lie in 1..p-1");
    if (i > 0 && l_values[i] <= l_values[i - 1]) throw DomainError("l values must be increasing");
  }
}

bool ScenarioSpec::bartlett_feasible() const {
  return p + 2 <= std::min(n1, n2);
}

std::string ScenarioSpec::cell_id() const {
  std::string id = name + "_p" + std::to_string(p) + "_n" + std::to_string(n1) + "x" +
                   std::to_string(n2) + "_dmu" + short_number(delta_mu) + "_xi" + short_number(xi);
  if (rho != 0.4) id += "_rho" + short_number(rho);
  return id;
}

const FamilySummary* MonteCarloSummary::family(int l) const {
  for (const auto& f : families) {
    if (f.l == l) return &f;
  }
  return nullptr;
}

DenseMatrix ar1_covariance(int p, double rho) {
  if (p < 1) throw DomainError("ar1_covariance requires p >= 1");
  if (!(std::abs(rho) < 1.0)) throw DomainError("ar1_covariance requires |rho| < 1");
  DenseMatrix s(static_cast<std::size_t>(p), static_cast<std::size_t>(p));
  for (int t = 0; t < p; ++t) {
    for (int u = 0; u < p; ++u) s(t, u) = std::pow(rho, std::abs(t - u));
  }
  return s;
}

Mu0Sigma0 perturb_params(const Mu0Sigma0& base, const std::vector<int>& altered, double delta_mu,
                         double xi) {
  const std::size_t p = base.mu0.size();
  if (!(xi > 0.0)) throw DomainError("perturb_params requires xi > 0");
  std::vector<double> d(p, 1.0);
  Mu0Sigma0 out = base;
  for (const int j : altered) {
    if (j < 1 || static_cast<std::size_t>(j) > p) throw DomainError("altered node outside 1..p");
    out.mu0[static_cast<std::size_t>(j - 1)] += delta_mu;
    d[static_cast<std::size_t>(j - 1)] = std::sqrt(xi);
  }
  for (std::size_t t = 0; t < p; ++t) {
    for (std::size_t u = 0; u < p; ++u) out.sigma0(t, u) = d[t] * base.sigma0(t, u) * d[u];
  }
  return out;
}

TwoSampleData simulate_data(const ScenarioSpec& spec, std::uint64_t r) {
  spec.validate();
  return draw_data(spec, ScenarioModel(spec), r);
}

ReplicateOutcome simulate_replicate(const ScenarioSpec& spec, std::uint64_t r) {
  spec.validate();
  return run_replicate(spec, ScenarioModel(spec), r);
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("GGMLRT_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw DomainError("ks_statistic requires a nonempty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, std::abs((i + 1) / n - f), std::abs(i / n - f)});
  }
  return d;
}

double estimate_noncentrality(double mean_delta, int p) {
  if (p < 2) throw DomainError("estimate_noncentrality requires p >= 2");
  return std::max(0.0, mean_delta - (p + 1));
}

MonteCarloSummary run_scenario(const ScenarioSpec& spec, unsigned threads) {
  spec.validate();
  if (!spec.bartlett_feasible()) {
    throw DomainError("scenario " + spec.cell_id() + " violates p + 2 <= min(n1, n2)");
  }
  if (threads == 0) threads = default_thread_count();
  const ScenarioModel model(spec);

  const std::size_t b = static_cast<std::size_t>(spec.b);
  std::vector<std::optional<ReplicateOutcome>> outcomes(b);
  parallel_for(b, threads, [&](std::size_t r) {
    try {
      outcomes[r] = run_replicate(spec, model, r);
    } catch (const NotPositiveDefinite&) {
      // counted as a failed replicate below
    }
  });

  // Aggregation runs on one thread in replicate order.
  MonteCarloSummary s;
  s.spec = spec;
  const std::optional<NodeSet> altered =
      spec.altered.empty() ? std::nullopt : std::optional<NodeSet>(NodeSet(spec.altered, spec.p));
  const double alpha = spec.alpha;

  std::array<long, 2> global_hits{};
  std::vector<double> global_pt;
  for (const auto& o : outcomes) {
    if (!o) {
      ++s.failures;
      continue;
    }
    ++s.completed;
    global_hits[0] += o->global.p_w <= alpha;
    global_hits[1] += o->global.p_t <= alpha;
    global_pt.push_back(o->global.p_t);
  }
  for (int k = 0; k < 2; ++k) s.global_reject[static_cast<std::size_t>(k)] = rate(global_hits[static_cast<std::size_t>(k)], s.completed);
  if (!global_pt.empty()) {
    s.global_ks_uniform_t = ks_statistic(global_pt, [](double u) { return std::clamp(u, 0.0, 1.0); });
  }

  for (std::size_t li = 0; li < spec.l_values.size(); ++li) {
    const int l = spec.l_values[li];
    FamilySummary fam;
    fam.l = l;
    const auto subsets = enumerate_subsets(spec.p, l);
    const std::size_t m = subsets.size();
    std::vector<bool> is_null(m, true);
    for (std::size_t k = 0; k < m; ++k) is_null[k] = !(altered && subsets[k].intersects(*altered));
    const long n_null = std::count(is_null.begin(), is_null.end(), true);
    const long n_alt = static_cast<long>(m) - n_null;

    std::vector<std::array<long, 2>> hits(m, {0, 0});
    std::vector<std::array<double, 2>> sums(m, {0.0, 0.0});
    std::array<std::array<long, 2>, 2> fwer_hits{}, any_hits{}, all_hits{};
    for (std::size_t k = 0; k < m; ++k) {
      fam.subsets.push_back(SubsetSummary{subsets[k], dof_increment(l, spec.p)});
    }

    std::vector<std::string> labels(m);
    for (std::size_t k = 0; k < m; ++k) labels[k] = subsets[k].to_string();

    for (const auto& o : outcomes) {
      if (!o) continue;
      const auto& incs = o->increments[li];
      std::array<std::vector<double>, 2> raw{std::vector<double>(m), std::vector<double>(m)};
      for (std::size_t k = 0; k < m; ++k) {
        const auto& inc = incs[k];
        raw[0][k] = inc.p_w;
        raw[1][k] = inc.p_t;
        hits[k][0] += inc.p_w <= alpha;
        hits[k][1] += inc.p_t <= alpha;
        sums[k][0] += inc.delta_w;
        sums[k][1] += inc.delta_t;
        auto& sub = fam.subsets[k];
        if (sub.draws_t.size() < kMaxStoredDraws) {
          sub.draws_t.push_back(inc.delta_t);
          sub.draws_w.push_back(inc.delta_w);
        }
      }
      for (const Adjustment method : {Adjustment::kBonferroni, Adjustment::kHolm}) {
        const auto mi = static_cast<std::size_t>(method);
        for (std::size_t st = 0; st < 2; ++st) {
          const auto adj = adjust(PValueFamily(labels, raw[st]), method);
          bool false_reject = false;
          bool any_alt = false;
          bool all_alt = true;
          for (std::size_t k = 0; k < m; ++k) {
            const bool rej = adj[k] <= alpha;
            if (is_null[k]) {
              false_reject = false_reject || rej;
            } else {
              any_alt = any_alt || rej;
              all_alt = all_alt && rej;
            }
          }
          fwer_hits[mi][st] += false_reject;
          any_hits[mi][st] += any_alt;
          all_hits[mi][st] += all_alt;
        }
      }
    }

    for (std::size_t k = 0; k < m; ++k) {
      auto& sub = fam.subsets[k];
      const double dof = sub.dof;
      auto ref = [dof](double x) { return chi2_cdf(x, dof); };
      for (std::size_t st = 0; st < 2; ++st) {
        sub.reject[st] = rate(hits[k][st], s.completed);
        sub.mean_delta[st] = s.completed > 0 ? sums[k][st] / s.completed : 0.0;
      }
      if (!sub.draws_t.empty()) {
        sub.ks[0] = ks_statistic(sub.draws_w, ref);
        sub.ks[1] = ks_statistic(sub.draws_t, ref);
      }
    }
    for (std::size_t mi = 0; mi < 2; ++mi) {
      for (std::size_t st = 0; st < 2; ++st) {
        if (n_null > 0) fam.fwer[mi][st] = rate(fwer_hits[mi][st], s.completed);
        if (n_alt > 0) {
          fam.power_any[mi][st] = rate(any_hits[mi][st], s.completed);
          fam.power_all[mi][st] = rate(all_hits[mi][st], s.completed);
        }
      }
    }
    s.families.push_back(std::move(fam));
  }

  if (const FamilySummary* singles = s.family(1)) {
    for (const auto& sub : singles->subsets) {
      s.lambda_hat.push_back(estimate_noncentrality(sub.mean_delta[1], spec.p));
    }
  }
  return s;
}

std::vector<NoncentralFit> conjecture_check(const MonteCarloSummary& summary) {
  const FamilySummary* singles = summary.family(1);
  if (!singles) throw DomainError("conjecture_check requires l = 1 in the scenario");
  const double k = summary.spec.p + 1;
  std::vector<NoncentralFit> out;
  for (std::size_t j = 0; j < singles->subsets.size(); ++j) {
    const auto& sub = singles->subsets[j];
    NoncentralFit fit;
    fit.node = sub.m.members().front();
    fit.lambda_hat = summary.lambda_hat.at(j);
    const double lambda = fit.lambda_hat;
    if (!sub.draws_t.empty()) {
      fit.ks_noncentral = ks_statistic(
          sub.draws_t, [k, lambda](double x) { return 1.0 - noncentral_chi2_sf(x, k, lambda); });
      fit.ks_central = ks_statistic(sub.draws_t, [k](double x) { return chi2_cdf(x, k); });
    }
    out.push_back(fit);
  }
  return out;
}

std::vector<NoncentralFit> conjecture_check(const ScenarioSpec& spec, unsigned threads) {
  if (spec.altered.empty()) throw DomainError("conjecture_check requires a nonempty altered set");
  ScenarioSpec singles = spec;
  singles.l_values = {1};
  return conjecture_check(run_scenario(singles, threads));
}

}  // namespace ggmlrt
