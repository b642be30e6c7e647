#pragma once

#include <array>
#include <string>
#include <vector>

#include "mdshap/linmodel.hpp"

namespace mdshap::svg {

/// One stacked bar per entry of `bars`; positive segments stack upward from
/// zero and negative segments downward. Each bar is a <g class="bar">.
std::string stacked_bars(const std::vector<std::string>& variables, const std::vector<std::string>& bar_labels,
                         const std::vector<Vector>& bars, const std::string& title);

/// p x p heatmap on a diverging scale symmetric about zero; one
/// <rect class="cell"> per entry.
std::string heatmap(const std::vector<std::string>& variables, const Matrix& values, const std::string& title);

/// Cell map: rows x columns tiles. Flagged tiles are red when the observed
/// value exceeds the imputed one and blue otherwise, with opacity
/// |intensity| / max |intensity| over the whole figure.
std::string tile_map(const std::vector<std::string>& variables, const std::vector<std::string>& row_labels,
                     const Matrix& direction, const Matrix& intensity, const std::vector<std::vector<bool>>& flagged,
                     const std::string& title);

/// Grouped bars of (precision, recall, fscore) per labelled group.
std::string metric_bars(const std::vector<std::string>& groups, const std::vector<std::array<double, 3>>& values,
                        const std::string& title);

}  // namespace mdshap::svg
