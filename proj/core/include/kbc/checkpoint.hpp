#pragma once

#include <filesystem>

#include "kbc/embedding.hpp"
#include "kbc/vocabulary.hpp"

namespace kbc {

// Binary checkpoint layout (all integers and floats little-endian):
//   bytes 0..3   magic "KBCE"
//   u32          version (1)
//   u8           model kind (0 = TransE, 1 = RESCAL)
//   u8           TransE norm (1 = L1, 2 = L2; 0 when RESCAL)
//   u16          reserved (0)
//   u64 x 3      |E|, |R|, d
//   f64 x |E|*d  entity matrix, row-major
//   f64 x ...    relation parameters, row-major (|R|*d or |R|*d*d)
void save_checkpoint(const EmbeddingStore& emb, const std::filesystem::path& file);
EmbeddingStore load_checkpoint(const std::filesystem::path& file);

// Text export, one `name<TAB>v1 v2 ...` line per row. RESCAL relation
// matrices are flattened row-major.
void export_embeddings_text(const EmbeddingStore& emb, const NameMap& entity_names,
                            const std::filesystem::path& file);
void export_relations_text(const EmbeddingStore& emb, const NameMap& relation_names,
                           const std::filesystem::path& file);

}  // namespace kbc
