#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ggmlrt/error.hpp"
#include "ggmlrt/multiplicity.hpp"

namespace {

using namespace ggmlrt;

PValueFamily family_of(std::vector<double> raw) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < raw.size(); ++i) labels.push_back("n" + std::to_string(i + 1));
  return PValueFamily(std::move(labels), std::move(raw));
}

void expect_near_all(const std::vector<double>& got, const std::vector<double>& want) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-15) << i;
}

TEST(Bonferroni, ScalesAndCaps) {
  expect_near_all(bonferroni(family_of({0.01, 0.5})), {0.02, 1.0});
  expect_near_all(bonferroni(family_of({0.3})), {0.3});
  expect_near_all(bonferroni(family_of(std::vector<double>(8, 0.05 / 8))),
                  std::vector<double>(8, 0.05));
}

TEST(Holm, HandExecutedStepDown) {
  expect_near_all(holm(family_of({0.01, 0.04, 0.03})), {0.03, 0.06, 0.06});
  expect_near_all(holm(family_of({0.3})), {0.3});
}

TEST(Holm, TiesMatchBonferroniOnSmallest) {
  const auto h = holm(family_of(std::vector<double>(4, 0.01)));
  // Smallest (first by index) gets 4 * 0.01; the running max keeps the rest there.
  expect_near_all(h, std::vector<double>(4, 0.04));
  expect_near_all(holm(family_of({0.2, 0.2, 0.2})), {0.6, 0.6, 0.6});
}

TEST(Holm, NeverExceedsBonferroni) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> raw(1 + trial % 56);
    for (auto& v : raw) v = std::pow(u(gen), 3.0);
    const auto f = family_of(raw);
    const auto h = holm(f);
    const auto b = bonferroni(f);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      ASSERT_LE(h[i], b[i]);
      ASSERT_GE(h[i], raw[i]);
    }
  }
}

TEST(Adjustments, AreMonotoneInRawValues) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> raw(2 + trial % 10);
    for (auto& v : raw) v = u(gen) * 0.2;
    auto bumped = raw;
    const std::size_t k = static_cast<std::size_t>(trial) % raw.size();
    bumped[k] = std::min(1.0, bumped[k] + u(gen) * 0.1);
    for (const Adjustment method : {Adjustment::kHolm, Adjustment::kBonferroni}) {
      const auto before = adjust(family_of(raw), method);
      const auto after = adjust(family_of(bumped), method);
      for (std::size_t i = 0; i < raw.size(); ++i) ASSERT_GE(after[i], before[i]);
    }
  }
}

TEST(SelectNodes, NoEvidenceSelectsNothing) {
  const auto r = select_nodes(family_of(std::vector<double>(8, 1.0)), 0.05, Adjustment::kHolm);
  EXPECT_TRUE(r.empty());
  EXPECT_EQ(std::count(r.flags.begin(), r.flags.end(), true), 0);
}

TEST(SelectNodes, OneOverwhelmingSignal) {
  std::vector<double> raw(8, 1.0);
  raw[0] = 1e-9;
  const auto r = select_nodes(family_of(raw), 0.05, Adjustment::kHolm);
  EXPECT_EQ(r.selected, std::vector<std::string>{"n1"});
  EXPECT_TRUE(r.flags[0]);
}

TEST(SelectNodes, PermutingLabelsPermutesSelection) {
  const PValueFamily f({"a", "b", "c", "d"}, {0.001, 0.2, 0.004, 0.03});
  const PValueFamily g({"d", "c", "b", "a"}, {0.03, 0.004, 0.2, 0.001});
  for (const Adjustment method : {Adjustment::kHolm, Adjustment::kBonferroni}) {
    auto sf = select_nodes(f, 0.05, method).selected;
    auto sg = select_nodes(g, 0.05, method).selected;
    std::sort(sf.begin(), sf.end());
    std::sort(sg.begin(), sg.end());
    EXPECT_EQ(sf, sg);
  }
  EXPECT_EQ(select_nodes(f, 0.05, Adjustment::kHolm).selected, (std::vector<std::string>{"a", "c"}));
}

TEST(SelectNodes, RejectsInvalidAlpha) {
  const auto f = family_of({0.1});
  EXPECT_THROW(select_nodes(f, 0.0, Adjustment::kHolm), DomainError);
  EXPECT_THROW(select_nodes(f, 1.0, Adjustment::kHolm), DomainError);
}

TEST(PValueFamily, Validation) {
  EXPECT_THROW(PValueFamily({}, {}), DomainError);
  EXPECT_THROW(PValueFamily({"a"}, {0.1, 0.2}), DomainError);
  EXPECT_THROW(PValueFamily({"a"}, {1.5}), DomainError);
}

TEST(Fwer, CompleteNullIsControlled) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int reps = 20000;
  const double alpha = 0.05;
  for (const std::size_t m : {8u, 28u, 56u}) {
    int holm_hits = 0, bonf_hits = 0;
    for (int r = 0; r < reps; ++r) {
      std::vector<double> raw(m);
      for (auto& v : raw) v = u(gen);
      const auto f = family_of(raw);
      holm_hits += !select_nodes(f, alpha, Adjustment::kHolm).empty();
      bonf_hits += !select_nodes(f, alpha, Adjustment::kBonferroni).empty();
    }
    const double se = std::sqrt(alpha * (1 - alpha) / reps);
    EXPECT_LE(static_cast<double>(holm_hits) / reps, alpha + 3 * se);
    EXPECT_LE(static_cast<double>(bonf_hits) / reps, alpha + 3 * se);
  }
}

}  // namespace
