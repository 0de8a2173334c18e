#pragma once

#include <cstdint>

#include "expleval/dataset.hpp"

namespace expleval {

struct SyntheticDatasetSpec {
  std::size_t n_users = 40;
  std::size_t n_movies = 50;
  std::size_t ratings_per_user = 15;
  std::uint64_t seed = 7;
};

/// Contextual movie ratings with latent user taste, movie quality, genre
/// affinity and per-condition effects, over the four study factors. Every
/// movie has a director, two actors and one or two genres.
Dataset synthetic_dataset(const SyntheticDatasetSpec& spec = {});

}  // namespace expleval
