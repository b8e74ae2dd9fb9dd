#include "kbc/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "kbc/errors.hpp"

namespace kbc {

namespace {

constexpr std::array<char, 4> kMagic = {'K', 'B', 'C', 'E'};
constexpr std::uint32_t kVersion = 1;

void put_bytes(std::ostream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_integral_v<T>);
  std::array<unsigned char, sizeof(T)> bytes;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xff);
  }
  put_bytes(out, bytes.data(), bytes.size());
}

void put_f64_le(std::ostream& out, double value) {
  put_le(out, std::bit_cast<std::uint64_t>(value));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(bytes[i]) << (8 * i);
  }
  return value;
}

double get_f64_le(std::istream& in) {
  return std::bit_cast<double>(get_le<std::uint64_t>(in));
}

}  // namespace

void save_checkpoint(const EmbeddingStore& emb, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) {
    throw DataError("cannot write checkpoint: " + file.string());
  }
  put_bytes(out, kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(emb.kind()));
  put_le<std::uint8_t>(out, emb.kind() == ModelKind::TransE
                                ? static_cast<std::uint8_t>(emb.transe_norm())
                                : 0);
  put_le<std::uint16_t>(out, 0);
  put_le<std::uint64_t>(out, emb.num_entities());
  put_le<std::uint64_t>(out, emb.num_relations());
  put_le<std::uint64_t>(out, emb.dim());
  for (double v : emb.entity_data()) {
    put_f64_le(out, v);
  }
  for (double v : emb.relation_data()) {
    put_f64_le(out, v);
  }
  if (!out) {
    throw DataError("short write on checkpoint: " + file.string());
  }
}

EmbeddingStore load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw DataError("cannot open checkpoint: " + file.string());
  }
  std::array<char, 4> magic;
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) {
    throw DataError("not a checkpoint file: " + file.string());
  }
  const auto version = get_le<std::uint32_t>(in);
  if (version != kVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto kind_byte = get_le<std::uint8_t>(in);
  if (kind_byte > 1) {
    throw DataError("unknown model kind in checkpoint: " + std::to_string(kind_byte));
  }
  const auto kind = static_cast<ModelKind>(kind_byte);
  const auto norm_byte = get_le<std::uint8_t>(in);
  get_le<std::uint16_t>(in);  // reserved
  const auto num_entities = get_le<std::uint64_t>(in);
  const auto num_relations = get_le<std::uint64_t>(in);
  const auto dim = get_le<std::uint64_t>(in);
  if (!in || dim == 0) {
    throw DataError("corrupt checkpoint header: " + file.string());
  }
  const TranseNorm norm = norm_byte == 2 ? TranseNorm::L2 : TranseNorm::L1;

  EmbeddingStore emb(kind, num_entities, num_relations, dim, norm);
  for (double& v : emb.entity_data()) {
    v = get_f64_le(in);
  }
  for (double& v : emb.relation_data()) {
    v = get_f64_le(in);
  }
  if (!in) {
    throw DataError("truncated checkpoint: " + file.string());
  }
  return emb;
}

namespace {

void export_rows(const NameMap& names, const double* data, std::size_t rows,
                 std::size_t cols, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) {
    throw DataError("cannot write export file: " + file.string());
  }
  char buf[40];
  for (std::size_t i = 0; i < rows; ++i) {
    out << names.name(static_cast<std::uint32_t>(i)) << '\t';
    for (std::size_t j = 0; j < cols; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", data[i * cols + j]);
      if (j != 0) {
        out << ' ';
      }
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace

void export_embeddings_text(const EmbeddingStore& emb, const NameMap& entity_names,
                            const std::filesystem::path& file) {
  if (entity_names.size() != emb.num_entities()) {
    throw DataError("entity vocabulary size does not match checkpoint");
  }
  export_rows(entity_names, emb.entity_data().data(), emb.num_entities(), emb.dim(),
              file);
}

void export_relations_text(const EmbeddingStore& emb, const NameMap& relation_names,
                           const std::filesystem::path& file) {
  if (relation_names.size() != emb.num_relations()) {
    throw DataError("relation vocabulary size does not match checkpoint");
  }
  export_rows(relation_names, emb.relation_data().data(), emb.num_relations(),
              emb.relation_param_count(), file);
}

}  // namespace kbc
