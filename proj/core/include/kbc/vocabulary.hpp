#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kbc {

// Dense name<->id map. Ids are contiguous and assigned in first-seen order
// unless the map was loaded from a dictionary file.
class NameMap {
 public:
  // Returns the id of `name`, inserting it with the next free id if unseen.
  std::uint32_t add(std::string name);

  std::optional<std::uint32_t> find(std::string_view name) const;
  const std::string& name(std::uint32_t id) const;

  std::uint32_t size() const { return static_cast<std::uint32_t>(names_.size()); }
  bool empty() const { return names_.empty(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

struct Vocabulary {
  NameMap entities;
  NameMap relations;
};

// Dictionary files are `name<TAB>id` lines; ids must form a dense 0..n-1 range.
NameMap load_dictionary(const std::filesystem::path& file);
void save_dictionary(const NameMap& map, const std::filesystem::path& file);

}  // namespace kbc
