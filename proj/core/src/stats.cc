#include "tlm/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "tlm/error.h"

namespace tlm {

PairedSample PairedSample::Create(std::vector<double> x, std::vector<double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kInvalidArgument, "paired sample lengths differ");
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "paired sample needs n >= 2");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw Error(ErrorCode::kInvalidArgument, "paired sample is not finite");
    }
  }
  PairedSample s;
  s.x_ = std::move(x);
  s.y_ = std::move(y);
  return s;
}

double KendallTau(const PairedSample& sample) {
  const auto& x = sample.x();
  const auto& y = sample.y();
  long long concordant = 0, discordant = 0, tied_x_only = 0, tied_y_only = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) continue;
      if (dx == 0.0) {
        ++tied_x_only;
      } else if (dy == 0.0) {
        ++tied_y_only;
      } else if ((dx > 0.0) == (dy > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double untied = static_cast<double>(concordant + discordant);
  const double denom = std::sqrt((untied + tied_x_only) * (untied + tied_y_only));
  if (denom == 0.0) {
    throw Error(ErrorCode::kDegenerate, "degenerate sample: all values tied");
  }
  return static_cast<double>(concordant - discordant) / denom;
}

std::vector<double> AverageRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share rank mean((i+1)..(j+1)).
    const double rank = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double SpearmanRho(const PairedSample& sample) {
  const auto rx = AverageRanks(sample.x());
  const auto ry = AverageRanks(sample.y());
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::kDegenerate, "degenerate sample: all values tied");
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace tlm
