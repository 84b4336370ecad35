#ifndef TLM_STATS_H_
#define TLM_STATS_H_

#include <cstddef>
#include <span>
#include <vector>

namespace tlm {

// Paired observations (metric value, human rating).
class PairedSample {
 public:
  // Throws Error(kInvalidArgument) on length mismatch, n < 2 or non-finite
  // values.
  static PairedSample Create(std::vector<double> x, std::vector<double> y);

  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }
  std::size_t size() const { return x_.size(); }

 private:
  PairedSample() = default;

  std::vector<double> x_;
  std::vector<double> y_;
};

// Kendall tau-b. Throws Error(kDegenerate) when either side is all ties.
double KendallTau(const PairedSample& sample);

// Pearson correlation of average ranks. Throws Error(kDegenerate) when
// either side is all ties.
double SpearmanRho(const PairedSample& sample);

// 1-based ranks; tied values share the mean of their positions.
std::vector<double> AverageRanks(std::span<const double> values);

}  // namespace tlm

#endif  // TLM_STATS_H_
