#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ggmlrt {

enum class Adjustment { kBonferroni, kHolm };

std::string_view adjustment_name(Adjustment method);
Adjustment parse_adjustment(std::string_view name);

// One family of marginal p-values (e.g. all subsets of a fixed size l).
struct PValueFamily {
  std::vector<std::string> labels;
  std::vector<double> raw;

  PValueFamily(std::vector<std::string> labels, std::vector<double> raw);
  std::size_t size() const noexcept { return raw.size(); }
};

struct SelectionResult {
  std::vector<double> adjusted;
  std::vector<bool> flags;             // flags[i] == (adjusted[i] <= alpha)
  std::vector<std::string> selected;   // labels with flags set, family order
  double alpha = 0.05;
  Adjustment method = Adjustment::kHolm;

  bool empty() const noexcept { return selected.empty(); }
};

// min(1, m * raw)
std::vector<double> bonferroni(const PValueFamily& family);

// Holm step-down. Ties in the sort are broken by original index.
std::vector<double> holm(const PValueFamily& family);

std::vector<double> adjust(const PValueFamily& family, Adjustment method);

SelectionResult select_nodes(const PValueFamily& family, double alpha, Adjustment method);

}  // namespace ggmlrt
