#pragma once

#include <cstddef>
#include <cstdint>

namespace kbc {

// Dense ids, contiguous in [0, |E|) resp. [0, |R|).
using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

enum class Side : std::uint8_t { Head, Tail };

struct Triple {
  EntityId head{0};
  RelationId rel{0};
  EntityId tail{0};

  friend bool operator==(const Triple&, const Triple&) = default;
};

struct TripleHash {
  static constexpr std::uint64_t mix(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::size_t operator()(const Triple& t) const noexcept {
    return static_cast<std::size_t>(mix(mix(mix(t.head) + t.rel) + t.tail));
  }
};

// Substitute `replacement` into the chosen slot, leaving the other two fields alone.
inline Triple corrupt(const Triple& t, Side side, EntityId replacement) {
  Triple out = t;
  (side == Side::Head ? out.head : out.tail) = replacement;
  return out;
}

inline EntityId replaced_entity(const Triple& t, Side side) {
  return side == Side::Head ? t.head : t.tail;
}

}  // namespace kbc
