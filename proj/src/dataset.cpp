#include "expleval/dataset.hpp"

#include <algorithm>
#include <boost/tokenizer.hpp>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "expleval/errors.hpp"
#include "expleval/json_io.hpp"

namespace expleval {

const Movie& Dataset::movie(const MovieId& id) const {
  auto it = movies.find(id);
  if (it == movies.end()) throw NotFoundError("unknown movie '" + id + "'");
  return it->second;
}

const ContextualFactor& Dataset::factor(StudyFactor f) const {
  for (const auto& cf : factors) {
    if (cf.factor_id == f) return cf;
  }
  throw NotFoundError("factor " + std::string(to_string(f)) + " is not in the schema");
}

void Dataset::add_rating(ContextualRating r) {
  if (!movies.contains(r.movie_id)) throw ValidationError("rating references unknown movie '" + r.movie_id + "'");
  require_score(r.score, "rating score");
  users.insert(r.user_id);
  ratings.push_back(std::move(r));
}

void Dataset::validate() const {
  for (const auto& f : factors) f.validate();
  std::set<UserId> seen;
  for (const auto& r : ratings) {
    if (!movies.contains(r.movie_id)) throw ValidationError("rating references unknown movie '" + r.movie_id + "'");
    require_score(r.score, "rating score");
    r.situation.validate_against(factors);
    seen.insert(r.user_id);
  }
  if (seen != users) throw ValidationError("user set does not match the ratings");
  for (const auto& [id, m] : movies) {
    if (id != m.movie_id) throw ValidationError("movie key mismatch for '" + id + "'");
    if (m.title.empty()) throw ValidationError("movie '" + id + "' has an empty title");
  }
}

// ---------------------------------------------------------------------------
// Column mapping and schema documents
// ---------------------------------------------------------------------------

ColumnMapping ColumnMapping::from_document(const KvDocument& doc) {
  ColumnMapping m;
  for (const auto& [key, value] : doc.entries("columns")) {
    if (key == "user") m.user = value;
    else if (key == "item") m.item = value;
    else if (key == "rating") m.rating = value;
    else if (key == "timestamp") m.timestamp = value;
    else if (key == "title") m.title = value;
    else if (key == "director") m.director = value;
    else if (key == "year") m.year = value;
    else if (key == "actors") m.actors = split_list(value);
    else if (key == "genres") m.genres = split_list(value);
    else if (key == "passthrough") m.passthrough = split_list(value);
    else if (key.starts_with("factor.")) m.factors[parse_study_factor(key.substr(7))] = value;
    else throw ValidationError("unknown column mapping key '" + key + "'");
  }
  return m;
}

std::vector<ContextualFactor> load_schema(const KvDocument& doc) {
  auto factors = default_study_factors();
  for (const auto& [key, value] : doc.entries("factors")) {
    StudyFactor f = parse_study_factor(key);
    auto it = std::find_if(factors.begin(), factors.end(),
                           [f](const ContextualFactor& cf) { return cf.factor_id == f; });
    it->vocabulary = split_list(value);
    it->validate();
  }
  return factors;
}

// ---------------------------------------------------------------------------
// Delimited parsing
// ---------------------------------------------------------------------------

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

char detect_delimiter(std::string_view header) {
  const char candidates[] = {',', ';', '\t'};
  char best = ',';
  std::ptrdiff_t best_count = -1;
  for (char c : candidates) {
    auto n = std::count(header.begin(), header.end(), c);
    if (n > best_count) {
      best = c;
      best_count = n;
    }
  }
  return best;
}

std::vector<std::string> split_row(const std::string& line, char delimiter) {
  using Sep = boost::escaped_list_separator<char>;
  boost::tokenizer<Sep> tok(line, Sep(std::string{}, std::string(1, delimiter), std::string("\"")));
  std::vector<std::string> out;
  for (const auto& cell : tok) out.push_back(trim(cell));
  return out;
}

class Header {
 public:
  explicit Header(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) index_.emplace(lower(names[i]), i);
  }
  std::optional<std::size_t> find(std::string_view name) const {
    auto it = index_.find(lower(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t require(std::string_view name, const std::string& file) const {
    auto i = find(name);
    if (!i) throw IoError("malformed header in " + file + ": missing column '" + std::string(name) + "'");
    return *i;
  }

 private:
  std::map<std::string, std::size_t> index_;
};

bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::optional<long long> parse_int(std::string_view s) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string cell(const std::vector<std::string>& row, std::optional<std::size_t> idx) {
  if (!idx || *idx >= row.size()) return {};
  return row[*idx];
}

bool is_unknown(std::string_view v) { return v.empty() || v == kUnknownContext; }

/// Resolves a raw cell to a vocabulary entry: by name (case-insensitive) or
/// by 1-based code. Returns nullopt for the unknown sentinel.
std::optional<ConditionId> resolve_condition(const ContextualFactor& f, const std::string& raw) {
  if (is_unknown(raw)) return std::nullopt;
  auto lowered = lower(raw);
  for (const auto& c : f.vocabulary) {
    if (lower(c) == lowered) return c;
  }
  if (auto code = parse_int(raw); code && *code >= 1 && *code <= static_cast<long long>(f.vocabulary.size())) {
    return f.vocabulary[static_cast<std::size_t>(*code - 1)];
  }
  throw ValidationError("condition '" + raw + "' is not in the vocabulary of " + std::string(to_string(f.factor_id)));
}

struct MovieColumns {
  std::optional<std::size_t> item, title, director, year;
  std::vector<std::size_t> actors, genres;
  std::optional<std::size_t> actors_list, genres_list;  // single '|'-separated columns

  MovieColumns(const Header& h, const ColumnMapping& m) {
    item = h.find(m.item);
    title = h.find(m.title);
    director = h.find(m.director);
    year = h.find(m.year);
    if (!year) year = h.find("year");
    for (const auto& a : m.actors) {
      if (auto i = h.find(a)) actors.push_back(*i);
    }
    for (const auto& g : m.genres) {
      if (auto i = h.find(g)) genres.push_back(*i);
    }
    actors_list = h.find("actors");
    genres_list = h.find("genres");
  }

  Movie extract(const std::vector<std::string>& row) const {
    Movie m;
    m.movie_id = cell(row, item);
    m.title = cell(row, title);
    if (m.title.empty()) m.title = "Movie " + m.movie_id;
    m.director = cell(row, director);
    if (is_unknown(m.director)) m.director.clear();
    auto collect = [&row](const std::vector<std::size_t>& cols, std::optional<std::size_t> list) {
      std::vector<std::string> out;
      for (auto c : cols) {
        auto v = cell(row, c);
        if (!is_unknown(v)) out.push_back(v);
      }
      if (list) {
        for (auto& v : split_list(cell(row, list), '|')) {
          if (!is_unknown(v)) out.push_back(v);
        }
      }
      return out;
    };
    m.actors = collect(actors, actors_list);
    m.genres = collect(genres, genres_list);
    if (auto y = parse_int(cell(row, year)); y && *y > 0) m.year = static_cast<int>(*y);
    return m;
  }
};

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::map<MovieId, Movie> load_catalog(const std::filesystem::path& path, const ColumnMapping& columns) {
  auto in = open_input(path);
  std::string line;
  if (!read_line(in, line)) throw IoError("malformed header in " + path.string() + ": file is empty");
  char delim = detect_delimiter(line);
  Header header(split_row(line, delim));
  header.require(columns.item, path.string());
  MovieColumns mc(header, columns);
  std::map<MovieId, Movie> movies;
  std::size_t line_no = 1;
  while (read_line(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto m = mc.extract(split_row(line, delim));
    if (m.movie_id.empty()) throw IoError(path.string() + ":" + std::to_string(line_no) + ": empty movie id");
    movies.try_emplace(m.movie_id, std::move(m));
  }
  return movies;
}

}  // namespace

LoadResult load_dataset(const std::filesystem::path& ratings_path,
                        const std::optional<std::filesystem::path>& catalog_path,
                        const std::optional<std::filesystem::path>& schema_path,
                        const IngestOptions& options) {
  const auto& cols = options.columns;
  LoadResult result;
  Dataset& ds = result.dataset;
  ds.factors = schema_path ? load_schema(KvDocument::load(*schema_path)) : default_study_factors();
  if (catalog_path) ds.movies = load_catalog(*catalog_path, cols);

  auto in = open_input(ratings_path);
  const std::string file = ratings_path.string();
  std::string line;
  if (!read_line(in, line)) throw IoError("malformed header in " + file + ": file is empty");
  const char delim = detect_delimiter(line);
  Header header(split_row(line, delim));
  const auto user_col = header.require(cols.user, file);
  const auto item_col = header.require(cols.item, file);
  const auto rating_col = header.require(cols.rating, file);
  const auto ts_col = header.find(cols.timestamp);

  std::map<StudyFactor, std::size_t> factor_cols;
  for (const auto& f : ds.factors) {
    auto name_it = cols.factors.find(f.factor_id);
    std::optional<std::size_t> idx;
    if (name_it != cols.factors.end()) idx = header.find(name_it->second);
    if (!idx) idx = header.find(to_string(f.factor_id));
    if (idx) factor_cols.emplace(f.factor_id, *idx);
  }
  std::vector<std::pair<std::string, std::size_t>> passthrough_cols;
  for (const auto& name : cols.passthrough) {
    if (auto i = header.find(name)) passthrough_cols.emplace_back(name, *i);
  }
  const MovieColumns movie_cols(header, cols);

  std::size_t line_no = 1;
  while (read_line(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++result.rows_read;
    auto row = split_row(line, delim);
    auto reject = [&](std::string msg) { result.rejected.push_back({line_no, std::move(msg)}); };
    try {
      ContextualRating r;
      r.user_id = cell(row, user_col);
      r.movie_id = cell(row, item_col);
      if (r.user_id.empty() || r.movie_id.empty()) {
        reject("empty user or item id");
        continue;
      }
      auto raw_score = cell(row, rating_col);
      auto score = parse_int(raw_score);
      if (!score || *score < kMinScore || *score > kMaxScore) {
        reject("score '" + raw_score + "' outside [1,5]");
        continue;
      }
      r.score = static_cast<int>(*score);
      for (const auto& [f, idx] : factor_cols) {
        if (auto c = resolve_condition(ds.factor(f), cell(row, idx))) r.situation.assign(f, *c);
      }
      for (const auto& [name, idx] : passthrough_cols) r.extra_context.emplace(name, cell(row, idx));
      if (ts_col) {
        if (auto ts = parse_int(cell(row, ts_col))) r.timestamp = *ts;
      }
      if (!ds.movies.contains(r.movie_id)) {
        if (catalog_path) {
          reject("unknown movie '" + r.movie_id + "'");
          continue;
        }
        ds.movies.emplace(r.movie_id, movie_cols.extract(row));
      }
      ds.users.insert(r.user_id);
      ds.ratings.push_back(std::move(r));
    } catch (const ValidationError& e) {
      reject(e.what());
    }
  }

  if (result.rows_read >= options.reject_limit_min_rows &&
      static_cast<double>(result.rejected.size()) >
          options.max_reject_fraction * static_cast<double>(result.rows_read)) {
    std::ostringstream msg;
    msg << file << ": " << result.rejected.size() << " of " << result.rows_read
        << " rows rejected; first at line " << result.rejected.front().line << ": "
        << result.rejected.front().message;
    throw IoError(msg.str());
  }
  return result;
}

DatasetStats dataset_stats(const Dataset& ds) {
  DatasetStats s;
  s.n_users = ds.n_users();
  s.n_movies = ds.n_movies();
  s.n_ratings = ds.n_ratings();
  if (s.n_users == 0) return s;
  std::set<std::pair<UserId, MovieId>> pairs;
  for (const auto& r : ds.ratings) pairs.emplace(r.user_id, r.movie_id);
  s.mean_ratings_per_user = static_cast<double>(s.n_ratings) / static_cast<double>(s.n_users);
  s.mean_movies_per_user = static_cast<double>(pairs.size()) / static_cast<double>(s.n_users);
  return s;
}

// ---------------------------------------------------------------------------
// Canonical export
// ---------------------------------------------------------------------------

void write_canonical(const Dataset& ds, std::ostream& out) {
  for (const auto& f : ds.factors) {
    Json j = f;
    j["record"] = "factor";
    out << j.dump() << '\n';
  }
  for (const auto& [id, m] : ds.movies) {
    Json j = m;
    j["record"] = "movie";
    out << j.dump() << '\n';
  }
  for (const auto& r : ds.ratings) {
    Json j = r;
    j["record"] = "rating";
    out << j.dump() << '\n';
  }
}

Dataset read_canonical(std::istream& in) {
  Dataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw IoError("canonical record " + std::to_string(line_no) + ": " + e.what());
    }
    const auto kind = require_field<std::string>(j, "record");
    if (kind == "factor") {
      ds.factors.push_back(j.get<ContextualFactor>());
    } else if (kind == "movie") {
      auto m = j.get<Movie>();
      auto id = m.movie_id;
      ds.movies.emplace(std::move(id), std::move(m));
    } else if (kind == "rating") {
      auto r = j.get<ContextualRating>();
      ds.users.insert(r.user_id);
      ds.ratings.push_back(std::move(r));
    } else {
      throw IoError("canonical record " + std::to_string(line_no) + ": unknown kind '" + kind + "'");
    }
  }
  ds.validate();
  return ds;
}

namespace {

std::string quote_cell(const std::string& v, char delimiter) {
  if (v.find(delimiter) == std::string::npos && v.find('"') == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  return out + "\"";
}

std::string join_pipe(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += '|';
    out += items[i];
  }
  return out;
}

}  // namespace

void write_delimited(const Dataset& ds, std::ostream& out, char delimiter) {
  const ColumnMapping cols;
  std::vector<std::string> header = {cols.user, cols.item, cols.rating, cols.timestamp};
  for (auto f : kStudyFactors) header.push_back(cols.factors.at(f));
  for (const auto& extra : {"title", "director", "actors", "genres", "year"}) header.emplace_back(extra);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? std::string(1, delimiter) : "") << header[i];
  out << '\n';
  for (const auto& r : ds.ratings) {
    const auto& m = ds.movie(r.movie_id);
    std::vector<std::string> row = {r.user_id, r.movie_id, std::to_string(r.score), std::to_string(r.timestamp)};
    for (auto f : kStudyFactors) row.push_back(r.situation.get(f).value_or(std::string(kUnknownContext)));
    row.push_back(m.title);
    row.push_back(m.director);
    row.push_back(join_pipe(m.actors));
    row.push_back(join_pipe(m.genres));
    row.push_back(std::to_string(m.year));
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << delimiter;
      out << quote_cell(row[i], delimiter);
    }
    out << '\n';
  }
}

}  // namespace expleval
