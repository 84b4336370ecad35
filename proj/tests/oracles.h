// Reference implementations used only by the tests. They are written
// straight from the metric definitions, with no shared code paths, so an
// agreement with the library is meaningful.

#ifndef TLM_TESTS_ORACLES_H_
#define TLM_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

struct Coherence {
  double r_missed, v_missed, r_cut, c_missed, m_missed, score;
};

// p_vis[i][j] is 1 when point j is visible in frame i.
inline Coherence CoherenceScore(const std::vector<std::vector<int>>& p_vis,
                                double T, double eps, bool clamp) {
  const std::size_t frames = p_vis.size();
  const std::size_t N = p_vis[0].size();

  std::vector<double> m(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double missing = 0;
    for (std::size_t j = 0; j < N; ++j) missing += 1 - p_vis[i][j];
    m[i] = missing / N;
  }

  std::vector<double> dm;
  std::vector<std::size_t> frames_to_be_cut;
  double C_missed = 0;
  for (std::size_t i = 0; i + 1 < frames; ++i) {
    dm.push_back(m[i + 1] - m[i]);
    if (dm[i] > T) {
      frames_to_be_cut.push_back(i);
      C_missed += dm[i];
    }
  }

  const double R_cut = static_cast<double>(frames_to_be_cut.size()) / frames;
  double R_missed = 0;
  for (double v : m) R_missed += v;
  R_missed /= frames;

  double V_missed = 0;
  if (dm.size() > 1) {
    double mean = 0;
    for (double d : dm) mean += d;
    mean /= dm.size();
    double ss = 0;
    for (double d : dm) ss += (d - mean) * (d - mean);
    V_missed = std::sqrt(ss / dm.size());
  }

  double M_missed = 0;
  if (!dm.empty()) {
    M_missed = *std::max_element(dm.begin(), dm.end());
    if (clamp) M_missed = std::max(0.0, M_missed);
  }

  const double sum = R_missed + V_missed + R_cut + C_missed + M_missed;
  return {R_missed, V_missed, R_cut, C_missed, M_missed, 1.0 / (sum + eps)};
}

// (concordant - discordant) / n(n-1)/2, valid when neither side has ties.
inline double KendallByPairs(const std::vector<double>& x,
                             const std::vector<double>& y) {
  long concordant = 0, discordant = 0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = (x[i] - x[j]) * (y[i] - y[j]);
      if (s > 0) ++concordant;
      if (s < 0) ++discordant;
    }
  }
  return static_cast<double>(concordant - discordant) / (n * (n - 1) / 2.0);
}

// 1 - 6 sum d^2 / (n (n^2 - 1)), valid when neither side has ties.
inline double SpearmanBySquaredRankDiff(const std::vector<double>& x,
                                        const std::vector<double>& y) {
  const std::size_t n = x.size();
  auto rank = [n](const std::vector<double>& v, std::size_t i) {
    std::size_t below = 0;
    for (std::size_t k = 0; k < n; ++k) below += v[k] < v[i];
    return static_cast<double>(below + 1);
  };
  double d2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = rank(x, i) - rank(y, i);
    d2 += d * d;
  }
  return 1.0 - 6.0 * d2 / (static_cast<double>(n) * (n * n - 1.0));
}

}  // namespace oracle

#endif  // TLM_TESTS_ORACLES_H_
