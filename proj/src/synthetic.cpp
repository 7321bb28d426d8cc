#include "fwsvm/synthetic.hpp"

#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fwsvm/rng.hpp"

namespace fwsvm {

SparseDataset make_two_clusters(std::size_t m, std::size_t dim, double separation, std::uint64_t seed) {
  if (m == 0 || dim == 0) throw std::invalid_argument("make_two_clusters: empty shape");
  Rng rng(seed);
  const double shift = 0.5 * separation / std::sqrt(static_cast<double>(dim));
  std::vector<SparseRow> rows(m);
  std::vector<int> labels(m);
  for (std::size_t i = 0; i < m; ++i) {
    const int y = (rng.next() & 1) != 0 ? 1 : -1;
    labels[i] = y;
    rows[i].indices.resize(dim);
    rows[i].values.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      rows[i].indices[d] = static_cast<std::uint32_t>(d);
      rows[i].values[d] = y * shift + rng.normal();
    }
  }
  return SparseDataset(std::move(rows), std::move(labels));
}

namespace {

constexpr std::array<std::size_t, 14> kGroupSizes = {5, 8, 5, 16, 5, 7, 14, 6, 5, 2, 5, 5, 5, 35};
constexpr std::size_t kProfiles = 6;
constexpr double kPositiveRate = 0.24;
// Probability that an attribute follows the row's profile rather than the
// shared background distribution.
constexpr double kProfileWeight = 0.5;
constexpr double kConcentration = 1.6;

using Categorical = std::vector<double>;  // cumulative weights, last == 1

Categorical random_categorical(std::size_t k, double concentration, Rng& rng) {
  Categorical c(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    c[i] = std::exp(concentration * rng.normal());
    total += c[i];
  }
  double run = 0.0;
  for (double& w : c) {
    run += w / total;
    w = run;
  }
  c.back() = 1.0;
  return c;
}

std::size_t draw(const Categorical& c, Rng& rng) {
  const double u = rng.uniform01();
  std::size_t k = 0;
  while (k + 1 < c.size() && u >= c[k]) ++k;
  return k;
}

struct Population {
  std::vector<Categorical> background;                      // per group
  std::array<std::vector<std::vector<Categorical>>, 2> by_class;  // [class][profile][group]
};

Population make_population(std::uint64_t seed) {
  Rng rng(seed);
  Population p;
  for (const std::size_t g : kGroupSizes) p.background.push_back(random_categorical(g, 0.7, rng));
  for (auto& cls : p.by_class) {
    cls.resize(kProfiles);
    for (auto& profile : cls) {
      for (const std::size_t g : kGroupSizes) profile.push_back(random_categorical(g, kConcentration, rng));
    }
  }
  return p;
}

}  // namespace

SparseDataset make_census_like(std::size_t m, std::uint64_t seed, std::uint64_t population_seed) {
  if (m == 0) throw std::invalid_argument("make_census_like: empty sample");
  const Population pop = make_population(population_seed);
  std::array<std::uint32_t, kGroupSizes.size()> offset{};
  std::exclusive_scan(kGroupSizes.begin(), kGroupSizes.end(), offset.begin(), std::uint32_t{0});

  Rng rng(seed);
  std::vector<SparseRow> rows(m);
  std::vector<int> labels(m);
  for (std::size_t i = 0; i < m; ++i) {
    const bool positive = rng.uniform01() < kPositiveRate;
    labels[i] = positive ? 1 : -1;
    const auto& profile = pop.by_class[positive ? 1 : 0][rng.uniform_index(kProfiles)];
    SparseRow& r = rows[i];
    r.indices.reserve(kGroupSizes.size());
    r.values.assign(kGroupSizes.size(), 1.0);
    for (std::size_t g = 0; g < kGroupSizes.size(); ++g) {
      const Categorical& dist = rng.uniform01() < kProfileWeight ? profile[g] : pop.background[g];
      r.indices.push_back(offset[g] + static_cast<std::uint32_t>(draw(dist, rng)));
    }
  }
  return SparseDataset(std::move(rows), std::move(labels));
}

}  // namespace fwsvm
