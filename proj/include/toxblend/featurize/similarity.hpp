#pragma once

#include <span>

#include "toxblend/featurize/bitvector.hpp"

namespace toxblend::featurize {

/// 1 - |a & b| / |a | b|; two empty sets are at distance 0.
double jaccard_distance(const BitVector& a, const BitVector& b);

/// Mean Jaccard distance to the k nearest training vectors. Equal distances
/// are ordered by training index. Throws DataError on an empty training set
/// or k outside [1, |train|].
double jaccard_knn_distance(const BitVector& x, std::span<const BitVector> train, int k);

/// Leave-one-out variant: distance of train[i] to the rest of the set.
double jaccard_knn_distance_excluding(std::span<const BitVector> train, std::size_t i, int k);

/// Number of set bits.
int complexity(const BitVector& x);

}  // namespace toxblend::featurize
