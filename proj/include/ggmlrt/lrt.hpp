#pragma once

// Two-sample likelihood-ratio test of equal (mean, covariance) on a fully
// connected Gaussian graphical model, its Bartlett-adjusted version, and
// leave-k-out increments for node/subset localization.

#include <cstddef>
#include <string>
#include <vector>

#include "ggmlrt/matrix.hpp"

namespace ggmlrt {

// Subset M of V = {1..p}. Members are one-based and strictly increasing.
class NodeSet {
 public:
  NodeSet(std::vector<int> members, int p);

  // The empty selection; only valid as a result (e.g. no nodes selected).
  static NodeSet none(int p);
  static NodeSet all(int p);

  const std::vector<int>& members() const noexcept { return members_; }
  int p() const noexcept { return p_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  bool contains(int node) const;
  bool intersects(const NodeSet& other) const;

  // Zero-based column indices of V \ M, ascending.
  std::vector<std::size_t> complement_indices() const;

  // "{1,2}"
  std::string to_string() const;

  bool operator==(const NodeSet&) const = default;

 private:
  NodeSet(int p) : p_(p) {}
  std::vector<int> members_;
  int p_ = 0;
};

class TwoSampleData {
 public:
  // Labels default to "1".."p" when omitted.
  TwoSampleData(DenseMatrix x1, DenseMatrix x2, std::vector<std::string> node_labels = {});

  const DenseMatrix& x1() const noexcept { return x1_; }
  const DenseMatrix& x2() const noexcept { return x2_; }
  const std::vector<std::string>& node_labels() const noexcept { return labels_; }
  int p() const noexcept { return static_cast<int>(x1_.cols()); }
  int n1() const noexcept { return static_cast<int>(x1_.rows()); }
  int n2() const noexcept { return static_cast<int>(x2_.rows()); }

 private:
  DenseMatrix x1_;
  DenseMatrix x2_;
  std::vector<std::string> labels_;
};

struct GlobalTestResult {
  double w = 0.0;
  double mu_bartlett = 0.0;
  double delta_bartlett = 0.0;
  double t = 0.0;
  int dof = 0;
  double p_w = 1.0;
  double p_t = 1.0;
};

struct SubsetIncrement {
  NodeSet m;
  int l = 0;
  double delta_w = 0.0;
  double delta_t = 0.0;
  int dof = 0;
  double p_w = 1.0;
  double p_t = 1.0;
};

// f_V = p(p+3)/2
int dof_global(int p);

// h(l, p) = l(2p - l + 3)/2 = dof_global(p) - dof_global(p - l)
int dof_increment(int l, int p);

// MLE covariances of a two-sample dataset: pooled about the grand mean (H0)
// and per group about the group means (H1). Statistics on any induced node
// subset are evaluated from principal submatrices of these.
struct SampleMoments {
  DenseMatrix pooled;
  DenseMatrix group1;
  DenseMatrix group2;
  int n1 = 0;
  int n2 = 0;

  int p() const noexcept { return static_cast<int>(pooled.rows()); }
};

SampleMoments sample_moments(const TwoSampleData& data);

// W on the nodes at zero-based indices `keep`.
double lrt_w(const SampleMoments& moments, const std::vector<std::size_t>& keep);
double lrt_w(const TwoSampleData& data);

double bartlett_mu(int p, int n1, int n2);
double bartlett_delta(int p, int n1, int n2);

GlobalTestResult adjusted_t(const SampleMoments& moments);
GlobalTestResult adjusted_t(const TwoSampleData& data);

// Drops the columns in m from both samples; survivors keep their order.
TwoSampleData restrict(const TwoSampleData& data, const NodeSet& m);

SubsetIncrement increment(const TwoSampleData& data, const NodeSet& m);

// All C(p, l) subsets of size l, lexicographic.
std::vector<NodeSet> enumerate_subsets(int p, int l);

std::vector<SubsetIncrement> increment_scan(const TwoSampleData& data, int l);

// Scan from precomputed moments and the full-graph result. `global` must come
// from adjusted_t(moments).
std::vector<SubsetIncrement> increment_scan(const SampleMoments& moments,
                                            const GlobalTestResult& global, int l);

}  // namespace ggmlrt
