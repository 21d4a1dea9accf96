#include "ggmlrt/multiplicity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ggmlrt/error.hpp"

namespace ggmlrt {

std::string_view adjustment_name(Adjustment method) {
  return method == Adjustment::kHolm ? "holm" : "bonferroni";
}

Adjustment parse_adjustment(std::string_view name) {
  if (name == "holm") return Adjustment::kHolm;
  if (name == "bonferroni") return Adjustment::kBonferroni;
  throw DomainError("unknown adjustment '" + std::string(name) + "'");
}

PValueFamily::PValueFamily(std::vector<std::string> labels_in, std::vector<double> raw_in)
    : labels(std::move(labels_in)), raw(std::move(raw_in)) {
  if (raw.empty()) throw DomainError("p-value family must be nonempty");
  if (labels.size() != raw.size()) throw DomainError("p-value labels and values differ in length");
  for (const double v : raw) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("p-values must lie in [0, 1]");
  }
}

std::vector<double> bonferroni(const PValueFamily& family) {
  const double m = static_cast<double>(family.size());
  std::vector<double> out(family.size());
  std::transform(family.raw.begin(), family.raw.end(), out.begin(),
                 [m](double v) { return std::min(1.0, m * v); });
  return out;
}

std::vector<double> holm(const PValueFamily& family) {
  const std::size_t m = family.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return family.raw[a] < family.raw[b]; });
  std::vector<double> out(m);
  double running = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double scaled = std::min(1.0, static_cast<double>(m - j) * family.raw[order[j]]);
    running = std::max(running, scaled);
    out[order[j]] = running;
  }
  return out;
}

std::vector<double> adjust(const PValueFamily& family, Adjustment method) {
  return method == Adjustment::kHolm ? holm(family) : bonferroni(family);
}

SelectionResult select_nodes(const PValueFamily& family, double alpha, Adjustment method) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  SelectionResult r;
  r.alpha = alpha;
  r.method = method;
  r.adjusted = adjust(family, method);
  r.flags.resize(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    r.flags[i] = r.adjusted[i] <= alpha;
    if (r.flags[i]) r.selected.push_back(family.labels[i]);
  }
  return r;
}

}  // namespace ggmlrt
