#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <utility>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "kbc/checkpoint.hpp"
#include "kbc/embedding.hpp"
#include "kbc/errors.hpp"
#include "support/oracles.hpp"

using namespace kbc;
using testutil::TempDir;

TEST_CASE("init_embeddings is deterministic and seed sensitive") {
  EmbeddingStore a = init_embeddings(ModelKind::TransE, 8, 3, 5, 42);
  EmbeddingStore b = init_embeddings(ModelKind::TransE, 8, 3, 5, 42);
  EmbeddingStore c = init_embeddings(ModelKind::TransE, 8, 3, 5, 43);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("init_embeddings normalizes entity rows and bounds relations") {
  const std::size_t d = 7;
  EmbeddingStore emb = init_embeddings(ModelKind::TransE, 10, 4, d, 7);
  for (EntityId e = 0; e < 10; ++e) {
    CHECK(emb.entity(e).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  const double bound = 6.0 / std::sqrt(static_cast<double>(d));
  for (double x : emb.relation_data()) {
    CHECK(std::abs(x) <= bound);
  }
}

TEST_CASE("normalize_entities rescales rows and reports zero rows") {
  EmbeddingStore emb(ModelKind::TransE, 3, 1, 2);
  emb.entity(0) << 3, 4;
  emb.entity(1) << 0, 0;
  emb.entity(2) << 0, -2;
  emb.relation_vector(0) << 5, 5;
  CHECK(normalize_entities(emb) == 1);
  CHECK(emb.entity(0)(0) == doctest::Approx(0.6));
  CHECK(emb.entity(0)(1) == doctest::Approx(0.8));
  CHECK(emb.entity(1)(0) == 0.0);
  CHECK(emb.entity(2)(1) == doctest::Approx(-1.0));
  CHECK(emb.relation_vector(0)(0) == doctest::Approx(5.0));  // relations untouched
}

TEST_CASE("checkpoint survives a save/load round trip exactly") {
  TempDir tmp;
  Rng rng(99);
  int i = 0;
  // The norm tag only exists for TransE; RESCAL stores always load as L1.
  const std::pair<ModelKind, TranseNorm> combos[] = {
      {ModelKind::TransE, TranseNorm::L1},
      {ModelKind::TransE, TranseNorm::L2},
      {ModelKind::Rescal, TranseNorm::L1},
  };
  for (auto [kind, norm] : combos) {
    EmbeddingStore emb(kind, 5 + i, 2, 3 + i, norm);
    testutil::fill_uniform(emb, rng);
    const auto path = tmp.file("ckpt" + std::to_string(i++) + ".bin");
    save_checkpoint(emb, path);
    EmbeddingStore back = load_checkpoint(path);
    CHECK(back == emb);
  }

  // A RESCAL store carrying the (meaningless) L2 tag round-trips its tensors;
  // only the tag is dropped.
  EmbeddingStore odd(ModelKind::Rescal, 4, 2, 3, TranseNorm::L2);
  testutil::fill_uniform(odd, rng);
  save_checkpoint(odd, tmp.file("odd.bin"));
  EmbeddingStore back = load_checkpoint(tmp.file("odd.bin"));
  CHECK(back.transe_norm() == TranseNorm::L1);
  CHECK(std::equal(back.entity_data().begin(), back.entity_data().end(),
                   odd.entity_data().begin()));
  CHECK(std::equal(back.relation_data().begin(), back.relation_data().end(),
                   odd.relation_data().begin()));
}

TEST_CASE("corrupt checkpoints are data errors") {
  TempDir tmp;
  EmbeddingStore emb = init_embeddings(ModelKind::Rescal, 4, 2, 3, 5);
  const auto path = tmp.file("ckpt.bin");
  save_checkpoint(emb, path);

  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_checkpoint(tmp.file("absent.bin")), DataError);
  }
  SUBCASE("bad magic") {
    std::string bytes = testutil::read_text(path);
    bytes[0] = 'X';
    testutil::write_text(path, bytes);
    CHECK_THROWS_AS(load_checkpoint(path), DataError);
  }
  SUBCASE("unsupported version") {
    std::string bytes = testutil::read_text(path);
    bytes[4] = 9;
    testutil::write_text(path, bytes);
    CHECK_THROWS_AS(load_checkpoint(path), DataError);
  }
  SUBCASE("truncated payload") {
    std::string bytes = testutil::read_text(path);
    testutil::write_text(path, bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_AS(load_checkpoint(path), DataError);
  }
}

TEST_CASE("text export writes one named row per entity") {
  TempDir tmp;
  EmbeddingStore emb = init_embeddings(ModelKind::TransE, 3, 2, 4, 21);
  NameMap entities;
  entities.add("alpha");
  entities.add("beta");
  entities.add("gamma");
  const auto path = tmp.file("entities.tsv");
  export_embeddings_text(emb, entities, path);

  std::ifstream in(path);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    REQUIRE(tab != std::string::npos);
    CHECK(line.substr(0, tab) == entities.name(static_cast<std::uint32_t>(rows)));
    // Values round-trip exactly through the text form.
    std::istringstream vals(line.substr(tab + 1));
    for (std::size_t k = 0; k < 4; ++k) {
      std::string tok;
      REQUIRE(static_cast<bool>(vals >> tok));
      CHECK(std::strtod(tok.c_str(), nullptr) == emb.entity_data()[rows * 4 + k]);
    }
    ++rows;
  }
  CHECK(rows == 3);

  NameMap wrong;
  wrong.add("only");
  CHECK_THROWS_AS(export_embeddings_text(emb, wrong, tmp.file("bad.tsv")), DataError);
}

TEST_CASE("relation export flattens rescal matrices row major") {
  TempDir tmp;
  EmbeddingStore emb(ModelKind::Rescal, 2, 1, 2);
  Rng rng(3);
  testutil::fill_grid(emb, rng);  // entity values irrelevant, layout is the point
  emb.relation_matrix(0) << 1, 2, 3, 4;
  NameMap relations;
  relations.add("r0");
  const auto path = tmp.file("relations.tsv");
  export_relations_text(emb, relations, path);
  std::string body = testutil::read_text(path);
  CHECK(body.substr(0, 3) == "r0\t");
  CHECK(body.find("1 2 3 4") != std::string::npos);
}
