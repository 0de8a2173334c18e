#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "expleval/domain.hpp"
#include "expleval/kv_document.hpp"

namespace expleval {

struct Dataset {
  std::vector<ContextualRating> ratings;
  std::map<MovieId, Movie> movies;
  std::set<UserId> users;
  std::vector<ContextualFactor> factors;

  std::size_t n_users() const { return users.size(); }
  std::size_t n_movies() const { return movies.size(); }
  std::size_t n_ratings() const { return ratings.size(); }

  const Movie& movie(const MovieId& id) const;
  const ContextualFactor& factor(StudyFactor f) const;

  /// Appends a rating, registering its user. The movie must be known.
  void add_rating(ContextualRating r);

  /// Checks every invariant: known movies, schema-valid situations, user set
  /// consistent with ratings. Throws ValidationError.
  void validate() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Column names in the delimited input. Header matching is case-insensitive.
struct ColumnMapping {
  std::string user = "userID";
  std::string item = "itemID";
  std::string rating = "rating";
  std::string timestamp = "timestamp";
  std::map<StudyFactor, std::string> factors = {
      {StudyFactor::PhysicalWellness, "physical"},
      {StudyFactor::Mood, "mood"},
      {StudyFactor::Location, "location"},
      {StudyFactor::Weather, "weather"},
  };
  /// Contextual columns kept verbatim but not modelled.
  std::vector<std::string> passthrough = {"time",   "daytype",     "season",   "social",
                                          "endEmo", "dominantEmo", "decision", "interaction"};
  std::string title = "title";
  std::string director = "director";
  std::string year = "movieYear";
  std::vector<std::string> actors = {"actor1", "actor2", "actor3"};
  std::vector<std::string> genres = {"genre1", "genre2", "genre3"};

  /// Reads a `[columns]` section; keys: user, item, rating, timestamp, title,
  /// director, year, actors, genres, passthrough, factor.<StudyFactor>.
  static ColumnMapping from_document(const KvDocument& doc);
};

struct IngestOptions {
  ColumnMapping columns;
  /// Loading fails when more than this fraction of data rows is rejected ...
  double max_reject_fraction = 0.10;
  /// ... provided the file has at least this many data rows.
  std::size_t reject_limit_min_rows = 20;
};

struct RowDiagnostic {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string message;
};

struct LoadResult {
  Dataset dataset;
  std::vector<RowDiagnostic> rejected;
  std::size_t rows_read = 0;
};

/// Value the source uses for "context unknown".
inline constexpr std::string_view kUnknownContext = "-1";

/// Reads the `[factors]` section of a schema document. Factors not listed keep
/// their default vocabulary.
std::vector<ContextualFactor> load_schema(const KvDocument& doc);

LoadResult load_dataset(const std::filesystem::path& ratings_path,
                        const std::optional<std::filesystem::path>& catalog_path = std::nullopt,
                        const std::optional<std::filesystem::path>& schema_path = std::nullopt,
                        const IngestOptions& options = {});

struct DatasetStats {
  std::size_t n_users = 0;
  std::size_t n_movies = 0;
  std::size_t n_ratings = 0;
  double mean_ratings_per_user = 0.0;
  double mean_movies_per_user = 0.0;  // distinct movies
};

DatasetStats dataset_stats(const Dataset& ds);

/// Canonical newline-delimited export (one JSON record per line).
void write_canonical(const Dataset& ds, std::ostream& out);
Dataset read_canonical(std::istream& in);

/// Delimited export in the default column layout, readable by load_dataset.
void write_delimited(const Dataset& ds, std::ostream& out, char delimiter = ',');

}  // namespace expleval
