#include "expleval/kv_document.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <sstream>

#include "expleval/errors.hpp"

namespace expleval {

namespace pt = boost::property_tree;

KvDocument KvDocument::parse(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("malformed key/value document: ") + e.what());
  }
  KvDocument doc;
  Section root{"", {}};
  for (const auto& [key, child] : tree) {
    if (child.empty()) {
      root.entries.emplace_back(key, trim(child.data()));
      continue;
    }
    Section section{key, {}};
    for (const auto& [k, v] : child) section.entries.emplace_back(k, trim(v.data()));
    doc.sections_.push_back(std::move(section));
  }
  if (!root.entries.empty()) doc.sections_.insert(doc.sections_.begin(), std::move(root));
  return doc;
}

KvDocument KvDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<std::string> KvDocument::get(std::string_view section, std::string_view key) const {
  for (const auto& s : sections_) {
    if (s.name != section) continue;
    for (const auto& [k, v] : s.entries) {
      if (k == key) return v;
    }
  }
  return std::nullopt;
}

std::vector<KvDocument::Entry> KvDocument::entries(std::string_view section) const {
  for (const auto& s : sections_) {
    if (s.name == section) return s.entries;
  }
  return {};
}

std::vector<std::string> KvDocument::sections() const {
  std::vector<std::string> out;
  for (const auto& s : sections_) out.push_back(s.name);
  return out;
}

bool KvDocument::has_section(std::string_view section) const {
  for (const auto& s : sections_) {
    if (s.name == section) return true;
  }
  return false;
}

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(sep, start);
    if (end == std::string_view::npos) end = text.size();
    auto item = trim(text.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    start = end + 1;
  }
  return out;
}

}  // namespace expleval
