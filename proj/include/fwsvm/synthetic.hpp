#pragma once

#include <cstddef>
#include <cstdint>

#include "fwsvm/dataset.hpp"

namespace fwsvm {

// Balanced two-class Gaussian clouds in `dim` dense dimensions, unit variance,
// class means at +-separation/2 along every axis scaled by 1/sqrt(dim).
SparseDataset make_two_clusters(std::size_t m, std::size_t dim, double separation, std::uint64_t seed);

// Census-style binary data: 14 categorical attributes one-hot encoded into
// 123 features (exactly one active feature per attribute, value 1), about 24%
// positive labels, classes drawn from a mixture of latent profiles so the
// decision boundary is nonlinear. `population_seed` fixes the distribution;
// `seed` draws the sample, so train and test sets share a population.
SparseDataset make_census_like(std::size_t m, std::uint64_t seed, std::uint64_t population_seed = 2014);

inline constexpr std::size_t kCensusFeatures = 123;

}  // namespace fwsvm
