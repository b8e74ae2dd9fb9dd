// kbc: train and evaluate knowledge graph embedding models from the command
// line. Subcommands: train, eval, neighbors, probe-odds, curves, export.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
// Relative dataset paths resolve against $KBC_DATA_ROOT when it is set.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kbc/checkpoint.hpp"
#include "kbc/errors.hpp"
#include "kbc/eval.hpp"
#include "kbc/model.hpp"
#include "kbc/trainer.hpp"
#include "kbc/triple_store.hpp"
#include "kbc/vocabulary.hpp"

namespace fs = std::filesystem;
using namespace kbc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

fs::path resolve_data_path(const std::string& p) {
  fs::path path(p);
  if (path.is_relative()) {
    if (const char* root = std::getenv("KBC_DATA_ROOT"); root != nullptr && *root != '\0') {
      return fs::path(root) / path;
    }
  }
  return path;
}

// Shortest representation that round-trips exactly.
std::string fmt_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc() ? std::string(buf, end) : std::to_string(v);
}

std::string ini_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
    }
    out += c;
  }
  out += '"';
  return out;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) {
    prev[j] = j;
  }
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::vector<std::string> closest_names(const NameMap& names, const std::string& query,
                                       std::size_t k) {
  std::vector<std::pair<std::size_t, std::string>> scored;
  scored.reserve(names.size());
  for (const std::string& name : names.names()) {
    scored.emplace_back(edit_distance(name, query), name);
  }
  const std::size_t keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                    scored.end());
  std::vector<std::string> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    out.push_back(scored[i].second);
  }
  return out;
}

// Reports an unknown name with nearby vocabulary entries and signals a data
// error to the caller.
int unknown_entity(const NameMap& names, const std::string& query) {
  std::cerr << "error: unknown entity '" << query << "'. closest names:\n";
  for (const std::string& name : closest_names(names, query, 5)) {
    std::cerr << "  " << name << '\n';
  }
  return kExitData;
}

// ---------------------------------------------------------------------------
// train

struct TrainOpts {
  std::string train_path;
  std::string valid_path;
  std::string test_path;
  std::string entities_dict;
  std::string relations_dict;

  std::string model_kind = "transe";
  std::size_t dim = 0;  // 0 = model default (transe 100, rescal 200)
  std::string norm = "l1";
  double margin = 0.0;  // 0 = model default (transe 10, rescal 5)

  std::size_t batch_size = 512;
  double lr = 0.001;
  std::size_t max_epochs = 1000;
  std::size_t patience = 20;
  std::size_t eval_every = 1;
  std::uint64_t seed = 42;

  std::string sampler_kind = "rns";
  std::size_t negatives = 5;
  std::string candidates = "exact";
  std::size_t top_k = 200;
  std::size_t cap = 0;
  double exploration = 0.05;
  std::size_t lsh_tables = 40;
  std::size_t lsh_bits = 6;

  std::string out_dir;
  bool ranks = false;
  bool quiet = false;
};

TrainConfig build_train_config(const TrainOpts& o) {
  TrainConfig cfg;
  cfg.model = o.model_kind == "rescal" ? ModelKind::Rescal : ModelKind::TransE;
  cfg.transe_norm = o.norm == "l2" ? TranseNorm::L2 : TranseNorm::L1;
  cfg.dim = o.dim != 0 ? o.dim : (cfg.model == ModelKind::Rescal ? 200 : 100);
  cfg.margin = o.margin != 0.0 ? o.margin : (cfg.model == ModelKind::Rescal ? 5.0 : 10.0);
  cfg.batch_size = o.batch_size;
  cfg.adam.lr = o.lr;
  cfg.max_epochs = o.max_epochs;
  cfg.patience = o.patience;
  cfg.eval_every = o.eval_every;
  cfg.seed = o.seed;
  cfg.sampler.kind =
      o.sampler_kind == "dns" ? SamplerConfig::Kind::Dns : SamplerConfig::Kind::Rns;
  cfg.sampler.rns_negatives = o.negatives;
  cfg.sampler.dns_candidates = o.candidates == "approximate"
                                   ? SamplerConfig::Candidates::Approximate
                                   : SamplerConfig::Candidates::Exact;
  cfg.sampler.dns_top_k = o.top_k;
  cfg.sampler.dns_cap = o.cap;
  cfg.sampler.exploration = o.exploration;
  cfg.sampler.lsh.tables = o.lsh_tables;
  cfg.sampler.lsh.hyperplanes = o.lsh_bits;
  return cfg;
}

// The exact settings of the run, in the format `--config` reads back (dotted
// option names are single-quoted keys). Flags passed on a rerun override
// these values. Paths are written absolute so a rerun works from any
// directory.
void write_resolved_config(const fs::path& file, const TrainOpts& o, const TrainConfig& cfg) {
  std::ofstream out(file, std::ios::binary);
  if (!out) {
    throw DataError("train: cannot write " + file.string());
  }
  const auto abs_path = [](const std::string& p) {
    return ini_quote(fs::absolute(resolve_data_path(p)).lexically_normal().string());
  };
  out << "# resolved kbc train configuration\n";
  out << "[train]\n";
  out << "'data.train'=" << abs_path(o.train_path) << '\n';
  out << "'data.valid'=" << abs_path(o.valid_path) << '\n';
  if (!o.test_path.empty()) {
    out << "'data.test'=" << abs_path(o.test_path) << '\n';
  }
  if (!o.entities_dict.empty()) {
    out << "'data.entities'=" << abs_path(o.entities_dict) << '\n';
  }
  if (!o.relations_dict.empty()) {
    out << "'data.relations'=" << abs_path(o.relations_dict) << '\n';
  }
  out << "'model.kind'=" << ini_quote(o.model_kind) << '\n';
  out << "'model.dim'=" << cfg.dim << '\n';
  out << "'model.norm'=" << ini_quote(o.norm) << '\n';
  out << "'model.margin'=" << fmt_double(cfg.margin) << '\n';
  out << "'train.batch_size'=" << cfg.batch_size << '\n';
  out << "'train.lr'=" << fmt_double(cfg.adam.lr) << '\n';
  out << "'train.max_epochs'=" << cfg.max_epochs << '\n';
  out << "'train.patience'=" << cfg.patience << '\n';
  out << "'train.eval_every'=" << cfg.eval_every << '\n';
  out << "'train.seed'=" << cfg.seed << '\n';
  out << "'sampler.kind'=" << ini_quote(o.sampler_kind) << '\n';
  out << "'sampler.negatives'=" << cfg.sampler.rns_negatives << '\n';
  out << "'sampler.candidates'=" << ini_quote(o.candidates) << '\n';
  out << "'sampler.top_k'=" << cfg.sampler.dns_top_k << '\n';
  out << "'sampler.cap'=" << cfg.sampler.dns_cap << '\n';
  out << "'sampler.exploration'=" << fmt_double(cfg.sampler.exploration) << '\n';
  out << "'sampler.lsh_tables'=" << cfg.sampler.lsh.tables << '\n';
  out << "'sampler.lsh_bits'=" << cfg.sampler.lsh.hyperplanes << '\n';
}

int run_train(const TrainOpts& o) {
  const fs::path out_dir(o.out_dir);
  fs::create_directories(out_dir);

  Vocabulary vocab;
  if (!o.entities_dict.empty()) {
    vocab.entities = load_dictionary(resolve_data_path(o.entities_dict));
  }
  if (!o.relations_dict.empty()) {
    vocab.relations = load_dictionary(resolve_data_path(o.relations_dict));
  }
  const TripleStore train =
      load_split(resolve_data_path(o.train_path), vocab, Split::Train, UnseenPolicy::Extend);
  const TripleStore valid =
      load_split(resolve_data_path(o.valid_path), vocab, Split::Valid, UnseenPolicy::Extend);
  std::optional<TripleStore> test;
  if (!o.test_path.empty()) {
    test = load_split(resolve_data_path(o.test_path), vocab, Split::Test, UnseenPolicy::Extend);
  }

  const TrainConfig cfg = build_train_config(o);
  cfg.validate();
  write_resolved_config(out_dir / "config.resolved.ini", o, cfg);
  save_dictionary(vocab.entities, out_dir / "entities.dict");
  save_dictionary(vocab.relations, out_dir / "relations.dict");

  std::ofstream epochs(out_dir / "epochs.jsonl", std::ios::binary);
  if (!epochs) {
    throw DataError("train: cannot write " + (out_dir / "epochs.jsonl").string());
  }
  const fs::path checkpoint_path = out_dir / "checkpoint.bin";
  bool checkpointed = false;
  const auto on_epoch = [&](const EpochReport& r, const EmbeddingStore& emb, bool improved) {
    epochs << r.to_json() << '\n';
    epochs.flush();
    if (improved) {
      save_checkpoint(emb, checkpoint_path);
      checkpointed = true;
    }
    if (!o.quiet && r.validation_mrr) {
      std::printf("epoch %zu  loss %.6f  mrr %.4f  hits10 %.4f%s\n", r.epoch, r.mean_loss,
                  *r.validation_mrr, *r.validation_hits10, improved ? "  *" : "");
    }
  };

  const FitResult result = fit(train, valid, vocab.entities.size(), vocab.relations.size(),
                               cfg, {}, on_epoch);
  if (!checkpointed) {
    save_checkpoint(result.embeddings, checkpoint_path);
  }
  if (!o.quiet && result.best_mrr) {
    std::printf("best validation mrr %.4f at epoch %zu%s\n", *result.best_mrr,
                result.best_epoch, result.early_stopped ? " (early stop)" : "");
  }

  if (test) {
    const FilterSet filter = make_filter({&train, &valid, &*test});
    const RankingReport report = evaluate(result.embeddings, *test, filter);
    write_metrics((out_dir / "metrics.txt").string(), report);
    if (o.ranks) {
      write_ranks((out_dir / "ranks.tsv").string(), report, vocab);
    }
    std::cout << format_metrics(report);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOpts {
  std::string checkpoint;
  std::string train_path;
  std::string valid_path;
  std::string test_path;
  std::string entities_dict;
  std::string relations_dict;
  std::string out_dir;
  bool ranks = false;
};

int run_eval(const EvalOpts& o) {
  Vocabulary vocab;
  vocab.entities = load_dictionary(resolve_data_path(o.entities_dict));
  vocab.relations = load_dictionary(resolve_data_path(o.relations_dict));
  const EmbeddingStore emb = load_checkpoint(resolve_data_path(o.checkpoint));
  if (emb.num_entities() != vocab.entities.size() ||
      emb.num_relations() != vocab.relations.size()) {
    throw DataError("eval: checkpoint shape does not match the dictionaries");
  }

  const TripleStore train =
      load_split(resolve_data_path(o.train_path), vocab, Split::Train, UnseenPolicy::Skip);
  const TripleStore valid =
      load_split(resolve_data_path(o.valid_path), vocab, Split::Valid, UnseenPolicy::Skip);
  const TripleStore test =
      load_split(resolve_data_path(o.test_path), vocab, Split::Test, UnseenPolicy::Skip);
  const std::size_t skipped =
      train.unseen_skipped() + valid.unseen_skipped() + test.unseen_skipped();
  if (skipped > 0) {
    std::cerr << "note: skipped " << skipped << " triples naming entities or relations"
              << " outside the dictionaries\n";
  }

  const FilterSet filter = make_filter({&train, &valid, &test});
  const RankingReport report = evaluate(emb, test, filter);
  const fs::path out_dir(o.out_dir);
  fs::create_directories(out_dir);
  write_metrics((out_dir / "metrics.txt").string(), report);
  if (o.ranks) {
    write_ranks((out_dir / "ranks.tsv").string(), report, vocab);
  }
  std::cout << format_metrics(report);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// neighbors

struct NeighborsOpts {
  std::string checkpoint;
  std::string entities_dict;
  std::string entity;
  std::size_t k = 10;
};

int run_neighbors(const NeighborsOpts& o) {
  const NameMap entities = load_dictionary(resolve_data_path(o.entities_dict));
  const EmbeddingStore emb = load_checkpoint(resolve_data_path(o.checkpoint));
  if (emb.num_entities() != entities.size()) {
    throw DataError("neighbors: checkpoint shape does not match the dictionary");
  }
  const auto id = entities.find(o.entity);
  if (!id) {
    return unknown_entity(entities, o.entity);
  }
  const Eigen::VectorXd sims = cosine_matrix_row(emb, *id);
  std::vector<EntityId> order;
  order.reserve(emb.num_entities() - 1);
  for (std::size_t e = 0; e < emb.num_entities(); ++e) {
    if (static_cast<EntityId>(e) != *id) {
      order.push_back(static_cast<EntityId>(e));
    }
  }
  const std::size_t keep = std::min(o.k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep),
                    order.end(), [&](EntityId a, EntityId b) {
                      if (sims(a) != sims(b)) {
                        return sims(a) > sims(b);
                      }
                      return a < b;
                    });
  for (std::size_t i = 0; i < keep; ++i) {
    std::printf("%s(%.2f)\n", entities.name(order[i]).c_str(), sims(order[i]));
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// probe-odds

struct ProbeOpts {
  std::string checkpoint;
  std::string entities_dict;
  std::string query;
  std::string candidate;
};

int run_probe_odds(const ProbeOpts& o) {
  if (o.query == o.candidate) {
    std::cerr << "error: query and candidate must be different entities\n";
    return kExitUsage;
  }
  const NameMap entities = load_dictionary(resolve_data_path(o.entities_dict));
  const EmbeddingStore emb = load_checkpoint(resolve_data_path(o.checkpoint));
  if (emb.num_entities() != entities.size()) {
    throw DataError("probe-odds: checkpoint shape does not match the dictionary");
  }
  const auto query_id = entities.find(o.query);
  if (!query_id) {
    return unknown_entity(entities, o.query);
  }
  const auto candidate_id = entities.find(o.candidate);
  if (!candidate_id) {
    return unknown_entity(entities, o.candidate);
  }

  // Softmax over the similarity of the query to every entity, itself
  // included; the uniform baseline is the chance a single random corruption
  // draw picks the candidate.
  const Eigen::VectorXd sims = cosine_matrix_row(emb, *query_id);
  const Eigen::VectorXd weights = (sims.array() - sims.maxCoeff()).exp();
  const double weight = weights(*candidate_id) / weights.sum();
  const double uniform = 1.0 / static_cast<double>(emb.num_entities());
  std::printf("softmax_weight\t%.6g\n", weight);
  std::printf("uniform_rns\t%.6g\n", uniform);
  std::printf("odds_ratio\t%.6g\n", weight / uniform);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// curves

struct CurvesOpts {
  std::vector<std::string> reports;
  std::vector<std::string> labels;
  std::string out;
};

std::string default_label(const fs::path& report) {
  const fs::path parent = fs::absolute(report).parent_path();
  if (!parent.filename().empty()) {
    return parent.filename().string();
  }
  return report.stem().string();
}

int run_curves(const CurvesOpts& o) {
  if (!o.labels.empty() && o.labels.size() != o.reports.size()) {
    std::cerr << "error: --label count must match the number of report files\n";
    return kExitUsage;
  }
  std::ofstream out(o.out, std::ios::binary);
  if (!out) {
    throw DataError("curves: cannot write " + o.out);
  }
  out << "epoch\trun\tmrr\thits10\n";
  char buf[128];
  for (std::size_t i = 0; i < o.reports.size(); ++i) {
    const fs::path path(o.reports[i]);
    std::ifstream in(path);
    if (!in) {
      throw DataError("curves: cannot read " + path.string());
    }
    const std::string label = o.labels.empty() ? default_label(path) : o.labels[i];
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) {
        continue;
      }
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.contains("epoch")) {
        throw DataError("curves: " + path.string() + ":" + std::to_string(line_no) +
                        ": not an epoch report");
      }
      if (!j.contains("validation_mrr")) {
        continue;  // epoch without an evaluation
      }
      if (!j.contains("validation_hits10")) {
        throw DataError("curves: " + path.string() + ":" + std::to_string(line_no) +
                        ": report schema mismatch (missing validation_hits10)");
      }
      std::snprintf(buf, sizeof(buf), "%zu\t%s\t%.10g\t%.10g\n",
                    j["epoch"].get<std::size_t>(), label.c_str(),
                    j["validation_mrr"].get<double>(), j["validation_hits10"].get<double>());
      out << buf;
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// export

struct ExportOpts {
  std::string checkpoint;
  std::string entities_dict;
  std::string relations_dict;
  std::string out_dir;
};

int run_export(const ExportOpts& o) {
  const NameMap entities = load_dictionary(resolve_data_path(o.entities_dict));
  const NameMap relations = load_dictionary(resolve_data_path(o.relations_dict));
  const EmbeddingStore emb = load_checkpoint(resolve_data_path(o.checkpoint));
  const fs::path out_dir(o.out_dir);
  fs::create_directories(out_dir);
  export_embeddings_text(emb, entities, out_dir / "entities.tsv");
  export_relations_text(emb, relations, out_dir / "relations.tsv");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"knowledge graph embedding training, evaluation and probes"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "",
                 "read options from an INI file (train writes config.resolved.ini)");

  TrainOpts train_opts;
  CLI::App* train_cmd = app.add_subcommand("train", "train a model and evaluate it");
  train_cmd->add_option("--data.train", train_opts.train_path, "training triples (TSV)")
      ->required();
  train_cmd->add_option("--data.valid", train_opts.valid_path, "validation triples (TSV)")
      ->required();
  train_cmd->add_option("--data.test", train_opts.test_path, "test triples (TSV)");
  train_cmd->add_option("--data.entities", train_opts.entities_dict,
                        "preload entity ids from a dictionary");
  train_cmd->add_option("--data.relations", train_opts.relations_dict,
                        "preload relation ids from a dictionary");
  train_cmd->add_option("--model.kind", train_opts.model_kind, "transe or rescal")
      ->check(CLI::IsMember({"transe", "rescal"}));
  train_cmd->add_option("--model.dim", train_opts.dim,
                        "embedding dimension (0 = 100 transe / 200 rescal)");
  train_cmd->add_option("--model.norm", train_opts.norm, "transe residual norm")
      ->check(CLI::IsMember({"l1", "l2"}));
  train_cmd->add_option("--model.margin", train_opts.margin,
                        "hinge margin (0 = 10 transe / 5 rescal)");
  train_cmd->add_option("--train.batch_size", train_opts.batch_size, "positives per batch");
  train_cmd->add_option("--train.lr", train_opts.lr, "Adam learning rate");
  train_cmd->add_option("--train.max_epochs", train_opts.max_epochs, "epoch cap");
  train_cmd->add_option("--train.patience", train_opts.patience,
                        "evaluations without improvement before stopping");
  train_cmd->add_option("--train.eval_every", train_opts.eval_every,
                        "epochs between validation evaluations");
  train_cmd->add_option("--train.seed", train_opts.seed, "run seed");
  train_cmd->add_option("--sampler.kind", train_opts.sampler_kind, "rns or dns")
      ->check(CLI::IsMember({"rns", "dns"}));
  train_cmd->add_option("--sampler.negatives", train_opts.negatives,
                        "corruptions per positive (rns)");
  train_cmd->add_option("--sampler.candidates", train_opts.candidates,
                        "dns candidate generation")
      ->check(CLI::IsMember({"exact", "approximate"}));
  train_cmd->add_option("--sampler.top_k", train_opts.top_k,
                        "dns candidates per positive in approximate mode");
  train_cmd->add_option("--sampler.cap", train_opts.cap,
                        "reservoir cap on accepted negatives (0 = unlimited)");
  train_cmd->add_option("--sampler.exploration", train_opts.exploration,
                        "uniform exploration chance in approximate mode");
  train_cmd->add_option("--sampler.lsh_tables", train_opts.lsh_tables, "lsh tables");
  train_cmd->add_option("--sampler.lsh_bits", train_opts.lsh_bits, "hyperplanes per table");
  train_cmd->add_option("--out", train_opts.out_dir, "output directory")
      ->required()
      ->configurable(false);
  train_cmd->add_flag("--ranks", train_opts.ranks, "also write per-query ranks.tsv")
      ->configurable(false);
  train_cmd->add_flag("--quiet", train_opts.quiet, "suppress progress lines")
      ->configurable(false);

  EvalOpts eval_opts;
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a test split");
  eval_cmd->add_option("--checkpoint", eval_opts.checkpoint, "checkpoint file")->required();
  eval_cmd->add_option("--data.train", eval_opts.train_path, "training triples (TSV)")
      ->required();
  eval_cmd->add_option("--data.valid", eval_opts.valid_path, "validation triples (TSV)")
      ->required();
  eval_cmd->add_option("--data.test", eval_opts.test_path, "test triples (TSV)")->required();
  eval_cmd->add_option("--data.entities", eval_opts.entities_dict, "entity dictionary")
      ->required();
  eval_cmd->add_option("--data.relations", eval_opts.relations_dict, "relation dictionary")
      ->required();
  eval_cmd->add_option("--out", eval_opts.out_dir, "output directory")->required();
  eval_cmd->add_flag("--ranks", eval_opts.ranks, "also write per-query ranks.tsv");

  NeighborsOpts neighbors_opts;
  CLI::App* neighbors_cmd =
      app.add_subcommand("neighbors", "nearest entities by cosine similarity");
  neighbors_cmd->add_option("--checkpoint", neighbors_opts.checkpoint, "checkpoint file")
      ->required();
  neighbors_cmd->add_option("--entities", neighbors_opts.entities_dict, "entity dictionary")
      ->required();
  neighbors_cmd->add_option("--entity", neighbors_opts.entity, "query entity name")
      ->required();
  neighbors_cmd->add_option("-k,--k", neighbors_opts.k, "neighbors to print");

  ProbeOpts probe_opts;
  CLI::App* probe_cmd = app.add_subcommand(
      "probe-odds", "selection odds of a candidate entity versus uniform sampling");
  probe_cmd->add_option("--checkpoint", probe_opts.checkpoint, "checkpoint file")->required();
  probe_cmd->add_option("--entities", probe_opts.entities_dict, "entity dictionary")
      ->required();
  probe_cmd->add_option("--query", probe_opts.query, "query entity name")->required();
  probe_cmd->add_option("--candidate", probe_opts.candidate, "candidate entity name")
      ->required();

  CurvesOpts curves_opts;
  CLI::App* curves_cmd =
      app.add_subcommand("curves", "merge epoch reports into a plot-data TSV");
  curves_cmd->add_option("reports", curves_opts.reports, "epoch report files (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  curves_cmd->add_option("--label", curves_opts.labels,
                         "run label per report file (default: run directory name)");
  curves_cmd->add_option("--out", curves_opts.out, "output TSV path")->required();

  ExportOpts export_opts;
  CLI::App* export_cmd =
      app.add_subcommand("export", "write embeddings as name-prefixed text tables");
  export_cmd->add_option("--checkpoint", export_opts.checkpoint, "checkpoint file")
      ->required();
  export_cmd->add_option("--entities", export_opts.entities_dict, "entity dictionary")
      ->required();
  export_cmd->add_option("--relations", export_opts.relations_dict, "relation dictionary")
      ->required();
  export_cmd->add_option("--out", export_opts.out_dir, "output directory")->required();

  int rc = kExitOk;
  train_cmd->callback([&] { rc = run_train(train_opts); });
  eval_cmd->callback([&] { rc = run_eval(eval_opts); });
  neighbors_cmd->callback([&] { rc = run_neighbors(neighbors_opts); });
  probe_cmd->callback([&] { rc = run_probe_odds(probe_opts); });
  curves_cmd->callback([&] { rc = run_curves(curves_opts); });
  export_cmd->callback([&] { rc = run_export(export_opts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return rc;
}
