#include "kbc/vocabulary.hpp"

#include <fstream>

#include "kbc/errors.hpp"

namespace kbc {

std::uint32_t NameMap::add(std::string name) {
  auto it = ids_.find(name);
  if (it != ids_.end()) {
    return it->second;
  }
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.push_back(name);
  ids_.emplace(std::move(name), id);
  return id;
}

std::optional<std::uint32_t> NameMap::find(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) {
    return std::nullopt;
  }
  return it->second;
}

const std::string& NameMap::name(std::uint32_t id) const {
  if (id >= names_.size()) {
    throw DataError("name id " + std::to_string(id) + " out of range (size " +
                    std::to_string(names_.size()) + ")");
  }
  return names_[id];
}

NameMap load_dictionary(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw DataError("cannot open dictionary file: " + file.string());
  }

  std::vector<std::string> names;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw DataError(file.string() + ":" + std::to_string(line_no) +
                      ": expected `name<TAB>id`");
    }
    std::size_t id = 0;
    try {
      id = std::stoull(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw DataError(file.string() + ":" + std::to_string(line_no) +
                      ": id is not an integer");
    }
    if (id >= names.size()) {
      names.resize(id + 1);
    }
    if (!names[id].empty()) {
      throw DataError(file.string() + ":" + std::to_string(line_no) + ": duplicate id " +
                      std::to_string(id));
    }
    names[id] = line.substr(0, tab);
  }

  NameMap map;
  for (std::size_t id = 0; id < names.size(); ++id) {
    if (names[id].empty()) {
      throw DataError(file.string() + ": ids are not dense, " + std::to_string(id) +
                      " is missing");
    }
    map.add(names[id]);
  }
  return map;
}

void save_dictionary(const NameMap& map, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) {
    throw DataError("cannot write dictionary file: " + file.string());
  }
  for (std::uint32_t id = 0; id < map.size(); ++id) {
    out << map.name(id) << '\t' << id << '\n';
  }
}

}  // namespace kbc
