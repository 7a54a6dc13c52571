#pragma once

// Test-only oracles. Nothing here calls into the code paths it checks.

#include <cmath>
#include <cstddef>
#include <random>
#include <string_view>
#include <vector>

namespace dvca::testing {

// Exploitability scores and normalized scores for all 48 metric combinations,
// enumerated once with Python's decimal module (ROUND_HALF_UP) from the CVSS 3.1
// weight table and frozen here.
struct ExploitabilityRow {
  std::string_view vector;
  double score;
  double normalized;
};

inline constexpr ExploitabilityRow kExploitabilityTable[] = {
    {"AV:N/AC:L/PR:N/UI:N", 3.9, 1.00}, {"AV:N/AC:L/PR:N/UI:R", 2.8, 0.72},
    {"AV:N/AC:L/PR:L/UI:N", 2.8, 0.72}, {"AV:N/AC:L/PR:L/UI:R", 2.1, 0.54},
    {"AV:N/AC:L/PR:H/UI:N", 1.2, 0.31}, {"AV:N/AC:L/PR:H/UI:R", 0.9, 0.23},
    {"AV:N/AC:H/PR:N/UI:N", 2.2, 0.56}, {"AV:N/AC:H/PR:N/UI:R", 1.6, 0.41},
    {"AV:N/AC:H/PR:L/UI:N", 1.6, 0.41}, {"AV:N/AC:H/PR:L/UI:R", 1.2, 0.31},
    {"AV:N/AC:H/PR:H/UI:N", 0.7, 0.18}, {"AV:N/AC:H/PR:H/UI:R", 0.5, 0.13},
    {"AV:A/AC:L/PR:N/UI:N", 2.8, 0.72}, {"AV:A/AC:L/PR:N/UI:R", 2.1, 0.54},
    {"AV:A/AC:L/PR:L/UI:N", 2.1, 0.54}, {"AV:A/AC:L/PR:L/UI:R", 1.5, 0.38},
    {"AV:A/AC:L/PR:H/UI:N", 0.9, 0.23}, {"AV:A/AC:L/PR:H/UI:R", 0.7, 0.18},
    {"AV:A/AC:H/PR:N/UI:N", 1.6, 0.41}, {"AV:A/AC:H/PR:N/UI:R", 1.2, 0.31},
    {"AV:A/AC:H/PR:L/UI:N", 1.2, 0.31}, {"AV:A/AC:H/PR:L/UI:R", 0.9, 0.23},
    {"AV:A/AC:H/PR:H/UI:N", 0.5, 0.13}, {"AV:A/AC:H/PR:H/UI:R", 0.4, 0.10},
    {"AV:L/AC:L/PR:N/UI:N", 2.5, 0.64}, {"AV:L/AC:L/PR:N/UI:R", 1.8, 0.46},
    {"AV:L/AC:L/PR:L/UI:N", 1.8, 0.46}, {"AV:L/AC:L/PR:L/UI:R", 1.3, 0.33},
    {"AV:L/AC:L/PR:H/UI:N", 0.8, 0.21}, {"AV:L/AC:L/PR:H/UI:R", 0.6, 0.15},
    {"AV:L/AC:H/PR:N/UI:N", 1.4, 0.36}, {"AV:L/AC:H/PR:N/UI:R", 1.0, 0.26},
    {"AV:L/AC:H/PR:L/UI:N", 1.0, 0.26}, {"AV:L/AC:H/PR:L/UI:R", 0.8, 0.21},
    {"AV:L/AC:H/PR:H/UI:N", 0.5, 0.13}, {"AV:L/AC:H/PR:H/UI:R", 0.3, 0.08},
    {"AV:P/AC:L/PR:N/UI:N", 0.9, 0.23}, {"AV:P/AC:L/PR:N/UI:R", 0.7, 0.18},
    {"AV:P/AC:L/PR:L/UI:N", 0.7, 0.18}, {"AV:P/AC:L/PR:L/UI:R", 0.5, 0.13},
    {"AV:P/AC:L/PR:H/UI:N", 0.3, 0.08}, {"AV:P/AC:L/PR:H/UI:R", 0.2, 0.05},
    {"AV:P/AC:H/PR:N/UI:N", 0.5, 0.13}, {"AV:P/AC:H/PR:N/UI:R", 0.4, 0.10},
    {"AV:P/AC:H/PR:L/UI:N", 0.4, 0.10}, {"AV:P/AC:H/PR:L/UI:R", 0.3, 0.08},
    {"AV:P/AC:H/PR:H/UI:N", 0.2, 0.05}, {"AV:P/AC:H/PR:H/UI:R", 0.1, 0.03},
};

// Exhaustive outcome table for n independent Bernoulli events: returns
// {P(all succeed), P(at least one succeeds)}.
struct OutcomeProbabilities {
  double all = 0.0;
  double any = 0.0;
};

inline OutcomeProbabilities enumerate_outcomes(const std::vector<double>& p) {
  OutcomeProbabilities out;
  const std::size_t n = p.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double prob = 1.0;
    for (std::size_t i = 0; i < n; ++i) prob *= (mask >> i & 1U) ? p[i] : 1.0 - p[i];
    if (mask == (std::size_t{1} << n) - 1) out.all += prob;
    if (mask != 0) out.any += prob;
  }
  return out;
}

// Dense-matrix fixed-point iteration of x = sigmoid(lambda * W^T x), run to a
// tight tolerance.
inline std::vector<double> dense_fixed_point(const std::vector<std::vector<double>>& w,
                                             double lambda, double initial, double tol = 1e-12,
                                             int max_iter = 100000) {
  const std::size_t n = w.size();
  std::vector<double> x(n, initial);
  for (int it = 0; it < max_iter; ++it) {
    std::vector<double> y(n);
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += w[j][i] * x[j];
      y[i] = 1.0 / (1.0 + std::exp(-lambda * s));
      delta = std::max(delta, std::fabs(y[i] - x[i]));
    }
    x = std::move(y);
    if (delta < tol) break;
  }
  return x;
}

// FCM activations of the reference case study, 8 rows x 8 concepts
// (ATK, VPN, WebS, WS, HDB, HMI, EWS, PLC), four decimals.
inline constexpr double kReferenceTrace[8][8] = {
    {0.5000, 0.5000, 0.5000, 0.5000, 0.5000, 0.5000, 0.5000, 0.5000},
    {0.5000, 0.5695, 0.5695, 0.6434, 0.5412, 0.6225, 0.6225, 0.7892},
    {0.5000, 0.5695, 0.5695, 0.6620, 0.5529, 0.6555, 0.6555, 0.8280},
    {0.5000, 0.5695, 0.5695, 0.6620, 0.5544, 0.6597, 0.6597, 0.8376},
    {0.5000, 0.5695, 0.5695, 0.6620, 0.5544, 0.6597, 0.6597, 0.8387},
    {0.5000, 0.5695, 0.5695, 0.6620, 0.5544, 0.6597, 0.6597, 0.8387},
    {0.5000, 0.5695, 0.5695, 0.6620, 0.5544, 0.6597, 0.6597, 0.8387},
    {0.5000, 0.5695, 0.5695, 0.6620, 0.5544, 0.6597, 0.6597, 0.8387},
};

// Random attack graph: concept 0 is the attacker, a forward chain guarantees
// the last concept (target) is reachable, extra edges never point at 0.
struct RandomGraph {
  std::size_t size = 0;
  std::vector<std::size_t> from;
  std::vector<std::size_t> to;
  std::vector<double> weight;
};

inline RandomGraph random_graph(std::mt19937& rng, bool allow_cycles) {
  std::uniform_int_distribution<std::size_t> size_dist(2, 9);
  std::uniform_real_distribution<double> w(0.0, 1.0);
  RandomGraph g;
  g.size = size_dist(rng);
  for (std::size_t i = 0; i + 1 < g.size; ++i) {
    g.from.push_back(i);
    g.to.push_back(i + 1);
    g.weight.push_back(w(rng));
  }
  std::uniform_int_distribution<std::size_t> node(0, g.size - 1);
  std::uniform_int_distribution<int> extra(0, static_cast<int>(g.size));
  for (int k = extra(rng); k > 0; --k) {
    const auto a = node(rng);
    const auto b = node(rng);
    if (b == 0 || a == b) continue;
    if (!allow_cycles && a > b) continue;
    bool dup = false;
    for (std::size_t e = 0; e < g.from.size(); ++e) dup = dup || (g.from[e] == a && g.to[e] == b);
    if (dup) continue;
    g.from.push_back(a);
    g.to.push_back(b);
    g.weight.push_back(w(rng));
  }
  return g;
}

}  // namespace dvca::testing
