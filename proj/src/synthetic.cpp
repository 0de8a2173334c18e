#include "expleval/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "expleval/errors.hpp"
#include "expleval/random.hpp"

namespace expleval {

namespace {

const std::vector<std::string> kGenres = {"Drama", "Comedy", "Action", "Thriller", "Romance", "Animation", "Horror"};

std::string padded(std::size_t i, int width) {
  std::string s = std::to_string(i);
  return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
}

}  // namespace

Dataset synthetic_dataset(const SyntheticDatasetSpec& spec) {
  if (spec.n_users == 0 || spec.n_movies == 0) throw ValidationError("synthetic dataset needs users and movies");
  if (spec.ratings_per_user > spec.n_movies) throw ValidationError("more ratings per user than movies");
  Rng rng(derive_seed(spec.seed, "synthetic-dataset"));
  Dataset ds;
  ds.factors = default_study_factors();

  std::vector<double> quality(spec.n_movies);
  std::vector<std::size_t> genre_of(spec.n_movies);
  for (std::size_t m = 0; m < spec.n_movies; ++m) {
    Movie movie;
    movie.movie_id = "m" + padded(m + 1, 3);
    movie.title = "Synthetic Movie " + std::to_string(m + 1);
    movie.director = "Director " + std::to_string(1 + rng.uniform_index(12));
    movie.actors = {"Actor " + std::to_string(1 + rng.uniform_index(30)),
                    "Actor " + std::to_string(31 + rng.uniform_index(30))};
    genre_of[m] = rng.uniform_index(kGenres.size());
    movie.genres = {kGenres[genre_of[m]]};
    if (rng.uniform01() < 0.5) {
      const auto second = (genre_of[m] + 1 + rng.uniform_index(kGenres.size() - 1)) % kGenres.size();
      movie.genres.push_back(kGenres[second]);
    }
    movie.year = 1980 + static_cast<int>(rng.uniform_index(40));
    quality[m] = 0.6 * rng.normal();
    ds.movies.emplace(movie.movie_id, std::move(movie));
  }

  // Each condition shifts the scores of one genre family up or down.
  std::map<std::pair<StudyFactor, std::string>, std::vector<double>> effect;
  for (const auto& f : ds.factors) {
    for (const auto& c : f.vocabulary) {
      std::vector<double> e(kGenres.size());
      for (auto& x : e) x = 0.5 * rng.normal();
      effect[{f.factor_id, c}] = std::move(e);
    }
  }

  std::vector<std::size_t> order(spec.n_movies);
  std::int64_t ts = 1'500'000'000;
  for (std::size_t u = 0; u < spec.n_users; ++u) {
    const std::string user = "u" + padded(u + 1, 3);
    const double bias = 0.4 * rng.normal();
    std::vector<double> taste(kGenres.size());
    for (auto& t : taste) t = 0.7 * rng.normal();
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t k = 0; k < spec.ratings_per_user; ++k) {
      std::swap(order[k], order[k + rng.uniform_index(spec.n_movies - k)]);
      const std::size_t m = order[k];
      ContextualRating r;
      r.user_id = user;
      r.movie_id = "m" + padded(m + 1, 3);
      double z = 3.2 + bias + quality[m] + taste[genre_of[m]];
      for (const auto& f : ds.factors) {
        const auto& c = f.vocabulary[rng.uniform_index(f.vocabulary.size())];
        r.situation.assign(f.factor_id, c);
        z += effect[{f.factor_id, c}][genre_of[m]];
      }
      z += 0.5 * rng.normal();
      r.score = static_cast<int>(std::clamp(std::lround(z), 1L, 5L));
      r.timestamp = ts++;
      ds.add_rating(std::move(r));
    }
  }
  return ds;
}

}  // namespace expleval
