#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace expleval {

/// INI-style key/value document: optional `[section]` headers, `key = value`
/// lines, `;` or `#` comments. Used for schemas, phrase tables, weights and
/// recommender configuration.
class KvDocument {
 public:
  using Entry = std::pair<std::string, std::string>;

  static KvDocument parse(const std::string& text);
  static KvDocument load(const std::filesystem::path& path);

  /// Keys outside any section live under the empty section name.
  std::optional<std::string> get(std::string_view section, std::string_view key) const;
  /// Entries of a section in document order; empty when the section is absent.
  std::vector<Entry> entries(std::string_view section) const;
  std::vector<std::string> sections() const;
  bool has_section(std::string_view section) const;

 private:
  struct Section {
    std::string name;
    std::vector<Entry> entries;
  };
  std::vector<Section> sections_;
};

/// Splits a comma-separated list and trims each element; empty elements are dropped.
std::vector<std::string> split_list(std::string_view text, char sep = ',');
std::string trim(std::string_view s);

}  // namespace expleval
