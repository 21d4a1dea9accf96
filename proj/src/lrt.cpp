#include "ggmlrt/lrt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "ggmlrt/error.hpp"
#include "ggmlrt/special.hpp"

namespace ggmlrt {

NodeSet::NodeSet(std::vector<int> members, int p) : members_(std::move(members)), p_(p) {
  if (p < 1) throw DomainError("node set requires p >= 1");
  if (members_.empty()) throw DomainError("node set must be nonempty");
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (members_[i] < 1 || members_[i] > p) {
      throw DomainError("node " + std::to_string(members_[i]) + " outside 1.." + std::to_string(p));
    }
    if (i > 0 && members_[i] <= members_[i - 1]) {
      throw DomainError("node set members must be strictly increasing");
    }
  }
}

NodeSet NodeSet::none(int p) {
  if (p < 1) throw DomainError("node set requires p >= 1");
  return NodeSet(p);
}

NodeSet NodeSet::all(int p) {
  std::vector<int> m(static_cast<std::size_t>(p));
  std::iota(m.begin(), m.end(), 1);
  return NodeSet(std::move(m), p);
}

bool NodeSet::contains(int node) const {
  return std::binary_search(members_.begin(), members_.end(), node);
}

bool NodeSet::intersects(const NodeSet& other) const {
  return std::any_of(members_.begin(), members_.end(),
                     [&](int v) { return other.contains(v); });
}

std::vector<std::size_t> NodeSet::complement_indices() const {
  std::vector<std::size_t> keep;
  keep.reserve(static_cast<std::size_t>(p_) - members_.size());
  for (int v = 1; v <= p_; ++v) {
    if (!contains(v)) keep.push_back(static_cast<std::size_t>(v - 1));
  }
  return keep;
}

std::string NodeSet::to_string() const {
  std::string s = "{";
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(members_[i]);
  }
  return s + "}";
}

TwoSampleData::TwoSampleData(DenseMatrix x1, DenseMatrix x2, std::vector<std::string> node_labels)
    : x1_(std::move(x1)), x2_(std::move(x2)), labels_(std::move(node_labels)) {
  if (x1_.cols() != x2_.cols()) throw DomainError("groups have different node counts");
  if (x1_.cols() < 1) throw DomainError("two-sample data requires p >= 1");
  if (x1_.rows() < 2 || x2_.rows() < 2) throw TooFewRows("each group needs at least 2 rows");
  if (labels_.empty()) {
    for (std::size_t j = 1; j <= x1_.cols(); ++j) labels_.push_back(std::to_string(j));
  }
  if (labels_.size() != x1_.cols()) throw DomainError("label count does not match node count");
  if (std::set<std::string>(labels_.begin(), labels_.end()).size() != labels_.size()) {
    throw DomainError("node labels must be unique");
  }
}

int dof_global(int p) {
  if (p < 1) throw DomainError("dof_global requires p >= 1");
  return p * (p + 3) / 2;
}

int dof_increment(int l, int p) {
  if (l < 1 || l > p - 1) throw DomainError("dof_increment requires 1 <= l <= p-1");
  return l * (2 * p - l + 3) / 2;
}

SampleMoments sample_moments(const TwoSampleData& data) {
  SampleMoments m;
  m.n1 = data.n1();
  m.n2 = data.n2();
  const DenseMatrix all = data.x1().stacked(data.x2());
  m.pooled = covariance_mle(all, mean_vector(all));
  m.group1 = covariance_mle(data.x1(), mean_vector(data.x1()));
  m.group2 = covariance_mle(data.x2(), mean_vector(data.x2()));
  return m;
}

namespace {

double log_det_of(const DenseMatrix& a) {
  return log_det(cholesky(a));
}

std::vector<std::size_t> all_indices(int p) {
  std::vector<std::size_t> keep(static_cast<std::size_t>(p));
  std::iota(keep.begin(), keep.end(), std::size_t{0});
  return keep;
}

SubsetIncrement make_increment(const SampleMoments& moments, const GlobalTestResult& global,
                               const NodeSet& m) {
  const int p = moments.p();
  const int l = static_cast<int>(m.size());
  if (l < 1 || l > p - 1) throw DomainError("increment requires 1 <= |M| <= p-1");
  const double w_rest = lrt_w(moments, m.complement_indices());
  const double t_rest = bartlett_delta(p - l, moments.n1, moments.n2) * w_rest;

  SubsetIncrement inc{m, l};
  inc.delta_w = global.w - w_rest;
  inc.delta_t = global.t - t_rest;
  inc.dof = dof_increment(l, p);
  inc.p_w = chi2_sf(inc.delta_w, inc.dof);
  inc.p_t = chi2_sf(inc.delta_t, inc.dof);
  return inc;
}

}  // namespace

double lrt_w(const SampleMoments& moments, const std::vector<std::size_t>& keep) {
  const double ld_pooled = log_det_of(moments.pooled.principal(keep));
  const double ld1 = log_det_of(moments.group1.principal(keep));
  const double ld2 = log_det_of(moments.group2.principal(keep));
  const double w = moments.n1 * (ld_pooled - ld1) + moments.n2 * (ld_pooled - ld2);
  // The H0 fit never beats the H1 fit; a negative value is rounding.
  return std::max(0.0, w);
}

double lrt_w(const TwoSampleData& data) {
  return lrt_w(sample_moments(data), all_indices(data.p()));
}

double bartlett_mu(int p, int n1, int n2) {
  if (p < 1) throw DomainError("bartlett_mu requires p >= 1");
  if (!(p < n1 - 1 && p < n2 - 1)) {
    throw DomainError("Bartlett adjustment undefined: need p < n_c - 1 (p=" + std::to_string(p) +
                      ", n1=" + std::to_string(n1) + ", n2=" + std::to_string(n2) + ")");
  }
  const double pd = p;
  // r^2_{p,x} = -log(1 - p/x)
  auto r2 = [pd](double x) { return -std::log1p(-pd / x); };
  const double n = static_cast<double>(n1) + n2;
  double bracket = -4.0 * pd - pd / n1 - pd / n2 + n * r2(n) * (2.0 * pd - 2.0 * n + 3.0);
  for (const double nc : {static_cast<double>(n1), static_cast<double>(n2)}) {
    bracket -= nc * r2(nc - 1.0) * (2.0 * pd - 2.0 * nc + 3.0);
  }
  return 0.25 * bracket;
}

double bartlett_delta(int p, int n1, int n2) {
  const double mu = bartlett_mu(p, n1, n2);
  if (!(mu < 0.0)) {
    throw DegenerateCorrection("Bartlett mean term is nonnegative (mu=" + std::to_string(mu) + ")");
  }
  return dof_global(p) / (-2.0 * mu);
}

GlobalTestResult adjusted_t(const SampleMoments& moments) {
  const int p = moments.p();
  GlobalTestResult g;
  g.mu_bartlett = bartlett_mu(p, moments.n1, moments.n2);
  g.delta_bartlett = bartlett_delta(p, moments.n1, moments.n2);
  g.w = lrt_w(moments, all_indices(p));
  g.t = g.delta_bartlett * g.w;
  g.dof = dof_global(p);
  g.p_w = chi2_sf(g.w, g.dof);
  g.p_t = chi2_sf(g.t, g.dof);
  return g;
}

GlobalTestResult adjusted_t(const TwoSampleData& data) {
  return adjusted_t(sample_moments(data));
}

TwoSampleData restrict(const TwoSampleData& data, const NodeSet& m) {
  if (m.p() != data.p()) throw DomainError("node set universe does not match data");
  if (m.empty() || static_cast<int>(m.size()) >= data.p()) {
    throw DomainError("restrict requires 1 <= |M| <= p-1");
  }
  const auto keep = m.complement_indices();
  std::vector<std::string> labels;
  labels.reserve(keep.size());
  for (const std::size_t j : keep) labels.push_back(data.node_labels()[j]);
  return TwoSampleData(data.x1().select_columns(keep), data.x2().select_columns(keep),
                       std::move(labels));
}

SubsetIncrement increment(const TwoSampleData& data, const NodeSet& m) {
  if (m.p() != data.p()) throw DomainError("node set universe does not match data");
  const SampleMoments moments = sample_moments(data);
  return make_increment(moments, adjusted_t(moments), m);
}

std::vector<NodeSet> enumerate_subsets(int p, int l) {
  if (l < 1 || l > p - 1) throw DomainError("enumerate_subsets requires 1 <= l <= p-1");
  std::vector<NodeSet> out;
  std::vector<int> idx(static_cast<std::size_t>(l));
  std::iota(idx.begin(), idx.end(), 1);
  while (true) {
    out.emplace_back(idx, p);
    int i = l - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == p - l + i + 1) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < l; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

std::vector<SubsetIncrement> increment_scan(const SampleMoments& moments,
                                            const GlobalTestResult& global, int l) {
  const auto subsets = enumerate_subsets(moments.p(), l);
  std::vector<SubsetIncrement> out;
  out.reserve(subsets.size());
  for (const NodeSet& m : subsets) out.push_back(make_increment(moments, global, m));
  return out;
}

std::vector<SubsetIncrement> increment_scan(const TwoSampleData& data, int l) {
  const SampleMoments moments = sample_moments(data);
  return increment_scan(moments, adjusted_t(moments), l);
}

}  // namespace ggmlrt
