// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Monte Carlo criteria use B = 2000 and fixed seeds.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ggmlrt/error.hpp"
#include "ggmlrt/lrt.hpp"
#include "ggmlrt/matrix.hpp"
#include "ggmlrt/multiplicity.hpp"
#include "ggmlrt/simulation.hpp"
#include "ggmlrt/special.hpp"
#include "oracles.hpp"

namespace {

namespace fs = std::filesystem;
using namespace ggmlrt;

constexpr int kB = 2000;
constexpr std::uint64_t kSeed = 20240601;
constexpr int kT = static_cast<int>(Statistic::kT);
constexpr int kW = static_cast<int>(Statistic::kW);
constexpr int kHolm = static_cast<int>(Adjustment::kHolm);
constexpr int kBonf = static_cast<int>(Adjustment::kBonferroni);

// Collects failed checks for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++count_;
    if (!ok && failures_.size() < 8) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  void note(const std::string& s) { notes_.push_back(s); }
  bool passed() const { return failed_ == 0; }
  std::string detail() const {
    std::string out = std::to_string(count_ - failed_) + "/" + std::to_string(count_) + " checks";
    for (const auto& n : notes_) out += "; " + n;
    for (const auto& f : failures_) out += "; FAILED " + f;
    return out;
  }

 private:
  int count_ = 0;
  int failed_ = 0;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

ScenarioSpec null_cell(int n) {
  ScenarioSpec s;
  s.n1 = s.n2 = n;
  s.b = kB;
  s.master_seed = kSeed;
  s.l_values = {1, 2, 3};
  return s;
}

// H0 summaries shared by criteria 1-3.
const MonteCarloSummary& null_summary(int n) {
  static std::map<int, MonteCarloSummary> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, run_scenario(null_cell(n))).first;
  return it->second;
}

bool type_one_error(Check& c) {
  for (const int n : {100, 250}) {
    const auto& singles = *null_summary(n).family(1);
    double lo = 1.0, hi = 0.0;
    for (const auto& s : singles.subsets) {
      const double r = s.reject[kT];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      c.expect(std::abs(r - 0.05) <= 0.015, "n=" + std::to_string(n) + " node " + s.m.to_string() + fmt(" T %.4f", r));
    }
    c.note("n=" + std::to_string(n) + fmt(" T [%.4f,", lo) + fmt("%.4f]", hi));
  }
  const auto& small = *null_summary(10).family(1);
  double wlo = 1.0, whi = 0.0, tlo = 1.0, thi = 0.0;
  for (const auto& s : small.subsets) {
    wlo = std::min(wlo, s.reject[kW]);
    whi = std::max(whi, s.reject[kW]);
    tlo = std::min(tlo, s.reject[kT]);
    thi = std::max(thi, s.reject[kT]);
    c.expect(std::abs(s.reject[kW] - 0.84) <= 0.03, "n=10 node " + s.m.to_string() + fmt(" W %.4f", s.reject[kW]));
    c.expect(std::abs(s.reject[kT] - 0.116) <= 0.02, "n=10 node " + s.m.to_string() + fmt(" T %.4f", s.reject[kT]));
  }
  c.note(fmt("n=10 W [%.4f,", wlo) + fmt("%.4f]", whi) + fmt(" T [%.4f,", tlo) + fmt("%.4f]", thi));
  return c.passed();
}

bool calibration(Check& c) {
  const auto& big = null_summary(250);
  for (const int l : {1, 2, 3}) {
    const FamilySummary& fam = *big.family(l);
    double worst = 0.0;
    for (const auto& s : fam.subsets) {
      worst = std::max(worst, s.ks[kT]);
      c.expect(s.ks[kT] < 0.05, "n=250 " + s.m.to_string() + fmt(" KS %.4f", s.ks[kT]));
    }
    c.note("l=" + std::to_string(l) + " df " + std::to_string(fam.subsets.front().dof) + fmt(" max KS %.4f", worst));
  }
  double weakest = 1.0;
  for (const auto& s : null_summary(10).family(1)->subsets) {
    weakest = std::min(weakest, s.ks[kW]);
    c.expect(s.ks[kW] > 0.2, "n=10 W " + s.m.to_string() + fmt(" KS %.4f", s.ks[kW]));
  }
  c.note(fmt("n=10 W min KS %.4f", weakest));
  return c.passed();
}

bool fwer_control(Check& c) {
  double worst = 0.0;
  for (const int n : {50, 100, 250}) {
    for (const int l : {1, 2, 3}) {
      const FamilySummary& fam = *null_summary(n).family(l);
      for (const int method : {kHolm, kBonf}) {
        const double f = fam.fwer[method][kT].value_or(1.0);
        worst = std::max(worst, f);
        c.expect(f <= 0.065, "n=" + std::to_string(n) + " l=" + std::to_string(l) +
                                 (method == kHolm ? " holm" : " bonferroni") + fmt(" %.4f", f));
      }
    }
  }
  c.note(fmt("max FWER %.4f", worst));
  return c.passed();
}

bool conjecture(Check& c) {
  ScenarioSpec s;
  s.name = "S2";
  s.altered = {1, 2};
  s.delta_mu = 1.5;
  s.xi = 0.5;
  s.b = kB;
  s.master_seed = kSeed;
  const auto fits = conjecture_check(s);
  double highest_other = 0.0;
  for (const auto& f : fits) {
    if (f.node > 2) highest_other = std::max(highest_other, f.lambda_hat);
  }
  for (const auto& f : fits) {
    if (f.node > 2) continue;
    c.expect(f.ks_noncentral < 0.10, "node " + std::to_string(f.node) + fmt(" KS %.4f", f.ks_noncentral));
    c.expect(f.lambda_hat > highest_other, "node " + std::to_string(f.node) + fmt(" lambda %.3f", f.lambda_hat));
    c.note("node " + std::to_string(f.node) + fmt(" lambda %.2f", f.lambda_hat) + fmt(" KS %.4f", f.ks_noncentral));
  }
  c.note(fmt("max unaltered lambda %.2f", highest_other));
  return c.passed();
}

bool power(Check& c) {
  const std::vector<double> shifts = {0.0, 0.5, 1.0, 1.5};
  // [scenario][n][xi][shift] -> {any, all}
  std::map<std::string, std::map<int, std::map<double, std::vector<std::pair<double, double>>>>> grid;
  for (const std::string name : {"S1", "S3"}) {
    for (const int n : {50, 100}) {
      for (const double xi : {0.5, 1.0, 1.5}) {
        for (const double d : shifts) {
          ScenarioSpec s;
          s.name = name;
          s.altered = name == "S1" ? std::vector<int>{1} : std::vector<int>{1, 2, 3, 4, 5};
          s.n1 = s.n2 = n;
          s.delta_mu = d;
          s.xi = xi;
          s.b = kB;
          s.master_seed = kSeed;
          const MonteCarloSummary m = run_scenario(s);
          const FamilySummary& fam = *m.family(1);
          grid[name][n][xi].emplace_back(fam.power_any[kHolm][kT].value(), fam.power_all[kHolm][kT].value());
        }
      }
    }
  }
  auto se = [](double p) { return std::sqrt(p * (1.0 - p) / kB); };
  int pairs = 0;
  for (auto& [name, by_n] : grid) {
    for (auto& [n, by_xi] : by_n) {
      for (auto& [xi, row] : by_xi) {
        for (std::size_t k = 1; k < row.size(); ++k) {
          const std::string where = name + " n=" + std::to_string(n) + fmt(" xi=%.1f", xi) + fmt(" dmu=%.1f", shifts[k]);
          const auto [a0, l0] = row[k - 1];
          const auto [a1, l1] = row[k];
          c.expect(a1 >= a0 - 2.0 * std::hypot(se(a0), se(a1)), where + " power_any" + fmt(" %.4f", a1));
          c.expect(l1 >= l0 - 2.0 * std::hypot(se(l0), se(l1)), where + " power_all" + fmt(" %.4f", l1));
        }
        if (name == "S1") {
          const auto& other = grid["S3"][n][xi];
          for (std::size_t k = 0; k < row.size(); ++k) {
            ++pairs;
            c.expect(row[k].second > other[k].second,
                     "n=" + std::to_string(n) + fmt(" xi=%.1f", xi) + fmt(" dmu=%.1f", shifts[k]) +
                         fmt(" S1 all %.4f", row[k].second) + fmt(" S3 all %.4f", other[k].second));
          }
        }
      }
    }
  }
  c.note("48 cells, " + std::to_string(pairs) + " S1/S3 pairs");
  return c.passed();
}

TwoSampleData random_data(std::mt19937_64& gen, std::size_t p, std::size_t n1, std::size_t n2, double shift) {
  DenseMatrix x1 = oracle::random_matrix(n1, p, gen);
  DenseMatrix x2 = oracle::random_matrix(n2, p, gen);
  for (std::size_t r = 0; r < n2; ++r) x2(r, 0) += shift;
  return TwoSampleData(std::move(x1), std::move(x2));
}

bool oracles(Check& c) {
  const TwoSampleData one(DenseMatrix{{0}, {2}}, DenseMatrix{{1}, {3}});
  c.expect(std::abs(lrt_w(one) - 4.0 * std::log(1.25)) < 1e-12, "W single node example");
  c.expect(std::abs(bartlett_delta(1, 10, 10) - 0.8385) < 1e-3, "delta p=1 n=10");
  c.expect(bartlett_mu(1, 10, 10) < 0.0, "mu p=1 n=10 negative");

  bool dof_ok = true;
  for (int p = 2; p <= 30; ++p) {
    for (int l = 1; l <= p - 1; ++l) dof_ok &= dof_increment(l, p) == dof_global(p) - dof_global(p - l);
  }
  c.expect(dof_ok, "h(l,p) = f(p) - f(p-l)");

  const auto h = holm(PValueFamily({"a", "b", "c"}, {0.01, 0.04, 0.03}));
  c.expect(std::abs(h[0] - 0.03) < 1e-15 && std::abs(h[1] - 0.06) < 1e-15 && std::abs(h[2] - 0.06) < 1e-15,
           "Holm step-down example");

  std::mt19937_64 gen(31);
  double recon = 0.0, logdet = 0.0;
  for (std::size_t dim = 1; dim <= 7; ++dim) {
    for (int trial = 0; trial < 20; ++trial) {
      const DenseMatrix a = oracle::random_spd(dim, gen);
      const SpdFactor f = cholesky(a);
      const DenseMatrix back = f.reconstruct();
      double scale = 0.0;
      for (double v : a.entries()) scale = std::max(scale, std::abs(v));
      for (std::size_t i = 0; i < a.entries().size(); ++i) {
        recon = std::max(recon, std::abs(back.entries()[i] - a.entries()[i]) / scale);
      }
      const double ref = std::log(oracle::cofactor_det(oracle::to_nested(a)));
      logdet = std::max(logdet, std::abs(log_det(f) - ref) / std::max(1.0, std::abs(ref)));
    }
  }
  c.expect(recon < 1e-12, fmt("Cholesky reconstruction %.2e", recon));
  c.expect(logdet < 1e-10, fmt("log-det vs cofactor %.2e", logdet));
  bool threw = false;
  try {
    cholesky(DenseMatrix{{1.0, 2.0}, {2.0, 1.0}});
  } catch (const NotPositiveDefinite&) {
    threw = true;
  }
  c.expect(threw, "indefinite matrix rejected");

  double roundtrip = 0.0;
  for (const double k : {1.0, 2.0, 9.0, 17.0, 24.0, 44.0}) {
    for (double u = 0.001; u < 1.0; u += 0.0245) {
      roundtrip = std::max(roundtrip, std::abs(chi2_cdf(chi2_quantile(u, k), k) - u));
    }
    for (double x = 0.05; x < 6.0 * k; x *= 1.3) {
      const double u = chi2_cdf(x, k);
      if (u < 1e-12 || u > 1.0 - 1e-6) continue;
      const double back = chi2_quantile(u, k);
      roundtrip = std::max(roundtrip, std::abs(back - x) / std::max(1.0, x));
    }
  }
  c.expect(roundtrip < 1e-8, fmt("chi-square round trip %.2e", roundtrip));

  std::uniform_real_distribution<double> scale(0.2, 5.0), shift(-10.0, 10.0);
  double affine = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const TwoSampleData d = random_data(gen, 5, 25, 20, 0.8);
    std::vector<double> a(5), b(5);
    for (std::size_t j = 0; j < 5; ++j) {
      a[j] = scale(gen);
      b[j] = shift(gen);
    }
    auto map = [&](DenseMatrix x) {
      for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t j = 0; j < 5; ++j) x(r, j) = a[j] * x(r, j) + b[j];
      return x;
    };
    const TwoSampleData e(map(d.x1()), map(d.x2()));
    affine = std::max({affine, std::abs(adjusted_t(d).w - adjusted_t(e).w), std::abs(adjusted_t(d).t - adjusted_t(e).t)});
    for (const int l : {1, 2, 3}) {
      const auto sd = increment_scan(d, l);
      const auto se = increment_scan(e, l);
      for (std::size_t k = 0; k < sd.size(); ++k) {
        affine = std::max({affine, std::abs(sd[k].delta_w - se[k].delta_w), std::abs(sd[k].delta_t - se[k].delta_t)});
      }
    }
  }
  c.expect(affine < 1e-8, fmt("diagonal affine invariance %.2e", affine));

  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t p = 2 + trial % 4;
    const TwoSampleData d = random_data(gen, p, p + 3 + trial % 5, p + 3 + trial % 7, 0.3 * (trial % 3));
    for (const auto& inc : increment_scan(d, 1)) worst = std::min(worst, inc.delta_w);
  }
  c.expect(worst >= -1e-9, fmt("W increments nonnegative, min %.2e", worst));
  return c.passed();
}

std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), dir).string()] = ss.str();
  }
  return out;
}

bool determinism(Check& c) {
  const fs::path root = fs::temp_directory_path() / "ggmlrt_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path cfg = root / "grid.cfg";
  std::ofstream(cfg) << "scenarios = H0, S2\nn = 50, 100\ndelta_mu = 1.5\nxi = 0.5\nl = 1, 2\n"
                        "replicates = 500\nseed = 7\n";
  auto run = [&](const std::string& threads, const std::string& out) {
    const std::string cmd = "GGMLRT_THREADS=" + threads + " " + GGMLRT_CLI_PATH + " simulate --config " +
                            cfg.string() + " --out " + (root / out).string() + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  c.expect(run("1", "a") == 0, "first run exit status");
  c.expect(run("1", "b") == 0, "second run exit status");
  c.expect(run("4", "c") == 0, "four-thread run exit status");
  const auto a = tree(root / "a");
  c.expect(a.size() > 5, "report files written");
  c.expect(a == tree(root / "b"), "rerun byte-identical");
  c.expect(a == tree(root / "c"), "thread count byte-identical");
  c.note(std::to_string(a.size()) + " files compared");
  fs::remove_all(root);
  return c.passed();
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<bool(Check&)> run;
  };
  const std::vector<Criterion> criteria = {
      {"1 Singleton type I error under H0 (p=8, B=2000)", type_one_error},
      {"2 Increment calibration KS", calibration},
      {"3 FWER control under H0", fwer_control},
      {"4 Noncentral diagnostic for S2", conjecture},
      {"5 Power monotonicity and S1 vs S3", power},
      {"6 Oracle and invariant suite", oracles},
      {"7 Simulate determinism across runs and threads", determinism},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = cr.run(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  %s  [%.1fs]  %s\n", ok ? "PASS" : "FAIL", cr.name, secs, c.detail().c_str());
    std::fflush(stdout);
    if (!ok) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
