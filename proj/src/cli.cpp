#include "figstyle/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "figstyle/config.hpp"
#include "figstyle/corpus.hpp"
#include "figstyle/embed.hpp"
#include "figstyle/error.hpp"
#include "figstyle/experiment.hpp"
#include "figstyle/fl_scoring.hpp"
#include "figstyle/flpipe.hpp"
#include "figstyle/io.hpp"
#include "figstyle/metrics.hpp"
#include "figstyle/mlp.hpp"
#include "figstyle/ngrams.hpp"
#include "figstyle/stylometry.hpp"

namespace figstyle::cli {

namespace {

namespace fs = std::filesystem;
using corpus::AuthorDoc;
using corpus::Example;
using io::Json;

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::uint64_t seed = 0;
  bool dry_run = false;

  void progress(const std::string& msg) const { err << "[figstyle] " << msg << '\n'; }
  void emit(const Json& j) const { out << j.dump() << '\n'; }
};

void require_input(const fs::path& p) {
  if (!fs::exists(p)) throw ConfigError("input not found: " + p.string());
}

void require_inputs(const std::vector<fs::path>& ps) {
  for (const auto& p : ps) require_input(p);
}

// ---- TSV adapter ---------------------------------------------------------

struct TsvColumns {
  std::string id = "id";
  std::string text = "text";
  std::string label = "label";
  std::string author = "author";
  std::string split = "split";
};

struct TsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  std::optional<std::size_t> column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  }
};

std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

TsvTable read_tsv(const fs::path& path) {
  const std::string content = io::read_file(path);
  TsvTable t;
  std::size_t line_no = 0;
  for (std::string line : split_on(content, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_on(line, '\t');
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(t.header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(line_no);
  }
  if (t.header.empty()) throw DataError(path.string() + ": missing header row");
  return t;
}

std::size_t require_column(const TsvTable& t, const std::string& name, const fs::path& path) {
  auto c = t.column(name);
  if (!c) throw DataError(path.string() + ": no column named \"" + name + "\"");
  return *c;
}

// Label map: {"raw value": ["canonical", ...]}. Raw values absent from the map
// pass through unchanged, so canonical names need no entry.
std::map<std::string, std::vector<std::string>> load_label_map(const fs::path& path) {
  std::map<std::string, std::vector<std::string>> out;
  if (path.empty()) return out;
  Json j;
  try {
    j = Json::parse(io::read_file(path));
  } catch (const Json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw DataError(path.string() + ": label map must be an object");
  for (const auto& [raw, mapped] : j.items()) {
    if (mapped.is_string()) {
      out[raw] = {mapped.get<std::string>()};
    } else if (mapped.is_array() && std::all_of(mapped.begin(), mapped.end(),
                                                [](const Json& v) { return v.is_string(); })) {
      out[raw] = mapped.get<std::vector<std::string>>();
    } else {
      throw DataError(path.string() + ": label map values must be strings or string lists");
    }
  }
  return out;
}

std::vector<Json> tsv_example_records(const fs::path& path, const TsvColumns& cols,
                                      const std::map<std::string, std::vector<std::string>>& label_map,
                                      const std::string& dataset, const std::string& default_split) {
  const TsvTable t = read_tsv(path);
  const auto id_c = require_column(t, cols.id, path);
  const auto text_c = require_column(t, cols.text, path);
  const auto label_c = require_column(t, cols.label, path);
  const auto split_c = t.column(cols.split);
  std::vector<Json> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    Json labels = Json::array();
    for (const auto& raw : split_on(row[label_c], ',')) {
      if (raw.empty()) continue;
      auto it = label_map.find(raw);
      if (it == label_map.end()) {
        labels.push_back(raw);
      } else {
        for (const auto& l : it->second) labels.push_back(l);
      }
    }
    out.push_back(Json{{"id", row[id_c]},
                       {"dataset", dataset.empty() ? path.stem().string() : dataset},
                       {"split", split_c ? row[*split_c] : default_split},
                       {"text", row[text_c]},
                       {"labels", labels}});
  }
  return out;
}

std::vector<Json> tsv_doc_records(const fs::path& path, const TsvColumns& cols,
                                  const std::string& default_split) {
  const TsvTable t = read_tsv(path);
  const auto id_c = require_column(t, cols.id, path);
  const auto text_c = require_column(t, cols.text, path);
  const auto author_c = require_column(t, cols.author, path);
  const auto split_c = t.column(cols.split);
  std::vector<Json> out;
  for (const auto& row : t.rows) {
    out.push_back(Json{{"doc_id", row[id_c]},
                       {"author", row[author_c]},
                       {"split", split_c ? row[*split_c] : default_split},
                       {"text", row[text_c]}});
  }
  return out;
}

// ---- shared loaders ------------------------------------------------------

std::vector<Example> load_examples(const std::vector<fs::path>& paths) {
  return corpus::load_fl_collection(paths).examples;
}

std::vector<AuthorDoc> load_docs(const fs::path& path) { return corpus::load_aa_corpus(path).docs; }

std::vector<AuthorDoc> docs_in_split(const std::vector<AuthorDoc>& docs, corpus::Split split) {
  std::vector<AuthorDoc> out;
  for (const auto& d : docs) {
    if (d.split == split) out.push_back(d);
  }
  return out;
}

std::vector<std::string> doc_ids(const std::vector<AuthorDoc>& docs) {
  std::vector<std::string> ids;
  for (const auto& d : docs) ids.push_back(d.doc_id);
  return ids;
}

std::map<std::string, flpipe::Assignment> load_assignments(const fs::path& path) {
  std::map<std::string, flpipe::Assignment> out;
  io::read_jsonl(path, [&](const Json& rec, std::size_t) {
    const std::string id = io::require_string(rec, "id");
    const Json& labels = io::require(rec, "labels");
    if (!labels.is_array()) throw DataError("\"labels\" must be an array");
    flpipe::Assignment a;
    for (const Json& l : labels) {
      if (!l.is_string()) throw DataError("label entries must be strings");
      a.set(corpus::feature_from_name(l.get<std::string>()), true);
    }
    if (!out.emplace(id, a).second) throw DataError("duplicate id \"" + id + "\"");
  });
  return out;
}

Json histogram_json(const std::map<std::string, std::pair<std::size_t, std::size_t>>& h) {
  Json j = Json::object();
  for (const auto& [author, counts] : h) j[author] = {{"train", counts.first}, {"test", counts.second}};
  return j;
}

std::vector<corpus::Feature> parse_features(const std::vector<std::string>& names) {
  std::vector<corpus::Feature> out;
  if (names.empty()) return {corpus::kFeatures.begin(), corpus::kFeatures.end()};
  for (const auto& n : names) {
    const auto f = corpus::feature_from_name(n);
    if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
  }
  return out;
}

// ---- training options ----------------------------------------------------

struct TrainOptions {
  mlp::TrainConfig config;
  bool no_early_stopping = false;

  void attach(CLI::App* sub) {
    sub->add_option("--learning-rate", config.adam.learning_rate, "Adam learning rate")->capture_default_str();
    sub->add_option("--max-epochs", config.max_epochs, "Maximum training epochs")->capture_default_str();
    sub->add_option("--hidden-units", config.hidden_units, "Hidden layer width")->capture_default_str();
    sub->add_option("--batch-size", config.batch_size, "Mini-batch size")->capture_default_str();
    sub->add_option("--patience", config.patience, "Early-stopping patience in epochs")->capture_default_str();
    sub->add_option("--tolerance", config.tolerance, "Minimum validation improvement")->capture_default_str();
    sub->add_option("--validation-fraction", config.validation_fraction,
                    "Held-out share of training data for early stopping")
        ->capture_default_str();
    sub->add_flag("--no-early-stopping", no_early_stopping, "Train for all epochs");
  }

  mlp::TrainConfig resolve(std::uint64_t seed) const {
    mlp::TrainConfig c = config;
    c.early_stopping = !no_early_stopping;
    c.seed = seed;
    c.validate();
    return c;
  }
};

// Vectors for ids, assembled from one vectors file.
embed::FeatureMatrix matrix_for(const fs::path& vectors, const std::vector<std::string>& ids) {
  const auto vf = embed::load_vectors(vectors);
  return vf.assemble(ids, vectors.stem().string());
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stylometry and figurative-language feature toolkit", "figstyle"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "figstyle 0.1.0");

  Context ctx{out, err};
  std::vector<std::pair<CLI::App*, std::function<void()>>> handlers;

  auto add = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--seed", ctx.seed, "Random seed")->capture_default_str();
    sub->add_flag("--dry-run", ctx.dry_run, "Validate arguments and inputs, write nothing");
    return sub;
  };

  // ingest
  std::vector<fs::path> ingest_inputs;
  fs::path ingest_out;
  fs::path ingest_label_map;
  std::string ingest_kind;
  std::string ingest_format = "jsonl";
  std::string ingest_dataset;
  std::string ingest_split = "train";
  TsvColumns ingest_cols;
  {
    CLI::App* sub = add("ingest", "Validate and normalize examples.jsonl or docs.jsonl input");
    sub->add_option("--kind", ingest_kind, "fl (examples) or aa (author documents)")
        ->required()
        ->check(CLI::IsMember({"fl", "aa"}));
    sub->add_option("--input", ingest_inputs, "Input files")->required();
    sub->add_option("--out", ingest_out, "Output JSONL")->required();
    sub->add_option("--format", ingest_format, "Input format")
        ->check(CLI::IsMember({"jsonl", "tsv"}))
        ->capture_default_str();
    sub->add_option("--label-map", ingest_label_map, "TSV: JSON object mapping raw labels to label names");
    sub->add_option("--dataset", ingest_dataset, "TSV: dataset name (default: file stem)");
    sub->add_option("--split", ingest_split, "TSV: split when there is no split column")
        ->check(CLI::IsMember({"train", "test"}))
        ->capture_default_str();
    sub->add_option("--id-col", ingest_cols.id, "TSV: id column")->capture_default_str();
    sub->add_option("--text-col", ingest_cols.text, "TSV: text column")->capture_default_str();
    sub->add_option("--label-col", ingest_cols.label, "TSV: comma-separated labels column")->capture_default_str();
    sub->add_option("--author-col", ingest_cols.author, "TSV: author column")->capture_default_str();
    sub->add_option("--split-col", ingest_cols.split, "TSV: optional split column")->capture_default_str();
    handlers.emplace_back(sub, [&] {
      require_inputs(ingest_inputs);
      if (!ingest_label_map.empty()) require_input(ingest_label_map);
      if (ctx.dry_run) return;
      if (ingest_kind == "fl") {
        std::vector<Example> examples;
        std::map<std::string, std::size_t> dropped_by_name;
        std::size_t dropped = 0;
        if (ingest_format == "jsonl") {
          auto res = corpus::load_fl_collection(ingest_inputs);
          examples = std::move(res.examples);
          dropped = res.dropped_labels;
          dropped_by_name = std::move(res.dropped_by_name);
        } else {
          const auto label_map = load_label_map(ingest_label_map);
          std::set<std::string> seen;
          for (const auto& path : ingest_inputs) {
            for (const Json& rec : tsv_example_records(path, ingest_cols, label_map, ingest_dataset, ingest_split)) {
              std::vector<std::string> dropped_names;
              Example ex = corpus::parse_example(rec, dropped_names);
              if (!seen.insert(ex.id).second) throw DataError("duplicate id \"" + ex.id + "\"");
              for (const auto& n : dropped_names) ++dropped_by_name[n];
              dropped += dropped_names.size();
              examples.push_back(std::move(ex));
            }
          }
        }
        if (dropped > 0) ctx.progress("dropped " + std::to_string(dropped) + " out-of-scope labels");
        corpus::write_examples(ingest_out, examples);
        ctx.emit({{"examples", examples.size()}, {"dropped_labels", dropped}, {"dropped", dropped_by_name}});
      } else {
        std::vector<AuthorDoc> docs;
        std::set<std::string> seen;
        for (const auto& path : ingest_inputs) {
          std::vector<AuthorDoc> part;
          if (ingest_format == "jsonl") {
            part = load_docs(path);
          } else {
            for (const Json& rec : tsv_doc_records(path, ingest_cols, ingest_split)) part.push_back(corpus::parse_doc(rec));
          }
          for (auto& d : part) {
            if (!seen.insert(d.doc_id).second) throw DataError("duplicate doc_id \"" + d.doc_id + "\"");
            docs.push_back(std::move(d));
          }
        }
        corpus::check_closed_set(docs);
        std::map<std::string, std::pair<std::size_t, std::size_t>> hist;
        for (const auto& d : docs) {
          auto& h = hist[d.author];
          ++(d.split == corpus::Split::train ? h.first : h.second);
        }
        corpus::write_docs(ingest_out, docs);
        ctx.emit({{"docs", docs.size()}, {"authors", histogram_json(hist)}});
      }
    });
  }

  // split
  std::string split_kind;
  std::vector<fs::path> split_inputs;
  fs::path split_dev;
  fs::path split_out;
  double split_fraction = 0.1;
  {
    CLI::App* sub = add("split", "Stratified train/test split");
    sub->add_option("--kind", split_kind, "fl (strata: label signatures) or aa (strata: authors)")
        ->required()
        ->check(CLI::IsMember({"fl", "aa"}));
    sub->add_option("--input", split_inputs, "Input files")->required();
    sub->add_option("--dev", split_dev, "fl: development set merged into the input first");
    sub->add_option("--test-fraction", split_fraction, "Test share per stratum")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    sub->add_option("--out", split_out, "Output JSONL (train records, then test records)")->required();
    handlers.emplace_back(sub, [&] {
      require_inputs(split_inputs);
      if (!split_dev.empty()) require_input(split_dev);
      if (split_fraction <= 0.0 || split_fraction >= 1.0) throw ConfigError("--test-fraction must lie in (0, 1)");
      if (ctx.dry_run) return;
      std::vector<std::string> warnings;
      std::size_t n_train = 0;
      std::size_t n_test = 0;
      if (split_kind == "fl") {
        std::vector<Example> examples = load_examples(split_inputs);
        if (!split_dev.empty()) {
          const std::vector<fs::path> dev_paths{split_dev};
          examples = corpus::merge_predefined_splits(examples, load_examples(dev_paths));
        }
        if (examples.empty()) throw DataError("nothing to split");
        auto res = corpus::stratified_split(examples, split_fraction, ctx.seed);
        std::vector<Example> all = std::move(res.train);
        n_train = all.size();
        n_test = res.test.size();
        all.insert(all.end(), res.test.begin(), res.test.end());
        corpus::write_examples(split_out, all);
        warnings = std::move(res.warnings);
      } else {
        if (split_inputs.size() != 1) throw ConfigError("aa split takes exactly one --input");
        if (!split_dev.empty()) throw ConfigError("--dev applies to fl splits only");
        std::vector<AuthorDoc> docs;
        io::read_jsonl(split_inputs.front(), [&](const Json& rec, std::size_t) { docs.push_back(corpus::parse_doc(rec)); });
        if (docs.empty()) throw DataError("nothing to split");
        auto res = corpus::stratified_split(docs, split_fraction, ctx.seed);
        std::vector<AuthorDoc> all = std::move(res.train);
        n_train = all.size();
        n_test = res.test.size();
        all.insert(all.end(), res.test.begin(), res.test.end());
        corpus::write_docs(split_out, all);
        warnings = std::move(res.warnings);
      }
      for (const auto& w : warnings) ctx.progress("warning: " + w);
      ctx.emit({{"train", n_train}, {"test", n_test}, {"warnings", warnings.size()}});
    });
  }

  // build-binary-sets
  std::vector<fs::path> bin_inputs;
  fs::path bin_out_dir;
  std::vector<std::string> bin_features;
  {
    CLI::App* sub = add("build-binary-sets", "Balanced per-feature binary training sets from the train split");
    sub->add_option("--input", bin_inputs, "examples.jsonl files")->required();
    sub->add_option("--feature", bin_features, "Features to build (default: all six)");
    sub->add_option("--out-dir", bin_out_dir, "Writes <feature>.jsonl and plans.json")->required();
    handlers.emplace_back(sub, [&] {
      require_inputs(bin_inputs);
      const auto features = parse_features(bin_features);
      if (ctx.dry_run) return;
      std::vector<Example> train;
      for (auto& ex : load_examples(bin_inputs)) {
        if (ex.split == corpus::Split::train) train.push_back(std::move(ex));
      }
      Json plans = Json::array();
      for (const auto f : features) {
        const auto pools = flpipe::select_pools(train, f);
        const auto set = flpipe::build_binary_training_set(f, pools.task, pools.literal, ctx.seed);
        corpus::write_examples(bin_out_dir / (std::string(corpus::name(f)) + ".jsonl"), set.examples);
        plans.push_back(flpipe::to_json(set.plan));
        ctx.progress(std::string(corpus::name(f)) + ": " + std::to_string(set.examples.size()) + " examples");
      }
      io::write_file(bin_out_dir / "plans.json", plans.dump(2) + "\n");
      ctx.emit({{"plans", plans}});
    });
  }

  // build-multilabel
  std::vector<fs::path> ml_inputs;
  fs::path ml_predictions;
  fs::path ml_out;
  {
    CLI::App* sub = add("build-multilabel", "Keep examples whose predicted labels agree with the human labels");
    sub->add_option("--input", ml_inputs, "examples.jsonl files")->required();
    sub->add_option("--predictions", ml_predictions, "predictions.jsonl (binary-model probabilities)")->required();
    sub->add_option("--out", ml_out, "Output examples.jsonl")->required();
    handlers.emplace_back(sub, [&] {
      require_inputs(ml_inputs);
      require_input(ml_predictions);
      if (ctx.dry_run) return;
      const auto examples = load_examples(ml_inputs);
      const auto preds = flpipe::load_predictions(ml_predictions);
      const auto res = flpipe::build_multilabel_corpus(examples, preds);
      corpus::write_examples(ml_out, res.accepted);
      ctx.emit({{"kept", res.kept}, {"discarded", res.discarded}});
    });
  }

  // calibrate
  fs::path cal_dev;
  std::vector<fs::path> cal_ref;
  std::string cal_source;
  fs::path cal_out;
  fs::path cal_curves;
  {
    CLI::App* sub = add("calibrate", "Per-feature probability thresholds maximizing dev weighted F1");
    sub->add_option("--dev", cal_dev, "Dev predictions.jsonl")->required();
    sub->add_option("--ref", cal_ref, "Reference examples.jsonl")->required();
    sub->add_option("--source", cal_source, "Reference labels: human or binary")
        ->required()
        ->check(CLI::IsMember({"human", "binary"}));
    sub->add_option("--out", cal_out, "Output thresholds.json")->required();
    sub->add_option("--curves", cal_curves, "Optional JSON with the F1 curve per feature");
    handlers.emplace_back(sub, [&] {
      require_input(cal_dev);
      require_inputs(cal_ref);
      if (ctx.dry_run) return;
      const auto dev = flpipe::load_predictions(cal_dev);
      std::map<std::string, corpus::LabelAssertions> ref;
      for (const auto& ex : load_examples(cal_ref)) ref.emplace(ex.id, ex.labels);
      const auto res = flpipe::calibrate_thresholds(dev, ref, flpipe::calibration_source_from_name(cal_source));
      const Json thresholds = flpipe::to_json(res.thresholds);
      io::write_file(cal_out, thresholds.dump(2) + "\n");
      if (!cal_curves.empty()) {
        Json curves = Json::object();
        for (const auto f : corpus::kFeatures) {
          const auto& fc = res.per_feature[corpus::index(f)];
          curves[std::string(corpus::name(f))] = {
              {"threshold", fc.threshold}, {"f1", fc.f1}, {"labelled", fc.labelled}, {"curve", fc.curve}};
        }
        io::write_file(cal_curves, curves.dump(2) + "\n");
      }
      ctx.emit(thresholds);
    });
  }

  // apply-thresholds
  fs::path at_predictions;
  fs::path at_thresholds;
  fs::path at_out;
  {
    CLI::App* sub = add("apply-thresholds", "Turn probabilities into six-feature label assignments");
    sub->add_option("--predictions", at_predictions, "predictions.jsonl")->required();
    sub->add_option("--thresholds", at_thresholds, "thresholds.json")->required();
    sub->add_option("--out", at_out, "Output assignments.jsonl ({\"id\", \"labels\"})")->required();
    handlers.emplace_back(sub, [&] {
      require_input(at_predictions);
      require_input(at_thresholds);
      if (ctx.dry_run) return;
      Json tj;
      try {
        tj = Json::parse(io::read_file(at_thresholds));
      } catch (const Json::parse_error& e) {
        throw DataError(at_thresholds.string() + ": " + e.what());
      }
      const auto thresholds = flpipe::thresholds_from_json(tj);
      io::JsonlWriter w;
      std::size_t n = 0;
      for (const auto& rec : flpipe::load_predictions(at_predictions)) {
        w.add(Json{{"id", rec.id}, {"labels", flpipe::apply_thresholds(rec, thresholds).positive_names()}});
        ++n;
      }
      w.save(at_out);
      ctx.emit({{"records", n}});
    });
  }

  // score-fl
  std::vector<fs::path> sf_test;
  fs::path sf_assignments;
  std::string sf_mode = "multilabel";
  std::string sf_split = "test";
  fs::path sf_out;
  {
    CLI::App* sub = add("score-fl", "Per-feature weighted F1 of label assignments against gold examples");
    sub->add_option("--test", sf_test, "Gold examples.jsonl")->required();
    sub->add_option("--assignments", sf_assignments, "assignments.jsonl")->required();
    sub->add_option("--mode", sf_mode, "multilabel or per-task")
        ->check(CLI::IsMember({"multilabel", "per-task"}))
        ->capture_default_str();
    sub->add_option("--split", sf_split, "Gold records to score: train, test or all")
        ->check(CLI::IsMember({"train", "test", "all"}))
        ->capture_default_str();
    sub->add_option("--out", sf_out, "Optional score JSON file");
    handlers.emplace_back(sub, [&] {
      require_inputs(sf_test);
      require_input(sf_assignments);
      if (ctx.dry_run) return;
      std::vector<Example> gold;
      for (auto& ex : load_examples(sf_test)) {
        if (sf_split == "all" || corpus::name(ex.split) == sf_split) gold.push_back(std::move(ex));
      }
      const auto report = harness::score_fl_predictions(gold, load_assignments(sf_assignments),
                                                        harness::fl_scoring_mode_from_name(sf_mode));
      const Json j = harness::to_json(report);
      if (!sf_out.empty()) io::write_file(sf_out, j.dump(2) + "\n");
      ctx.emit(j);
    });
  }

  // stylo
  fs::path st_input;
  fs::path st_out;
  bool st_list = false;
  {
    CLI::App* sub = add("stylo", "52 stylometric features per document");
    sub->add_option("--input", st_input, "docs.jsonl; word frequencies come from its train split");
    sub->add_option("--out", st_out, "Output stylo.jsonl ({\"doc_id\", \"vector\"})");
    sub->add_flag("--list-features", st_list, "Print the feature names in slot order");
    handlers.emplace_back(sub, [&] {
      if (st_list) {
        for (const auto n : stylometry::metric_names()) out << n << '\n';
        return;
      }
      if (st_input.empty() || st_out.empty()) throw ConfigError("stylo needs --input and --out");
      require_input(st_input);
      if (ctx.dry_run) return;
      const auto docs = load_docs(st_input);
      stylometry::WordFrequencyTable freq;
      for (const auto& d : docs) {
        if (d.split == corpus::Split::train) freq.add(stylometry::tokenize(d.text).tokens);
      }
      if (freq.empty()) throw DataError("no training documents for the word-frequency table");
      io::JsonlWriter w;
      std::size_t guarded = 0;
      for (const auto& d : docs) {
        const auto v = stylometry::compute_stylo_vector(d.text, freq);
        guarded += v.guarded.empty() ? 0 : 1;
        w.add(Json{{"doc_id", d.doc_id}, {"vector", v.values}});
      }
      w.save(st_out);
      ctx.emit({{"docs", docs.size()}, {"docs_with_guarded_metrics", guarded}});
    });
  }

  // fit-ngrams
  fs::path fn_input;
  fs::path fn_out;
  std::string fn_analyzer = "word";
  std::string fn_stopwords = "both";
  ngrams::NgramConfig fn_config;
  {
    CLI::App* sub = add("fit-ngrams", "Fit a TF-IDF n-gram vectorizer on the train split");
    sub->add_option("--input", fn_input, "docs.jsonl")->required();
    sub->add_option("--out", fn_out, "Output vectorizer.json")->required();
    sub->add_option("--analyzer", fn_analyzer, "word or char")
        ->check(CLI::IsMember({"word", "char"}))
        ->capture_default_str();
    sub->add_option("--n-min", fn_config.n_min, "Smallest n")->capture_default_str();
    sub->add_option("--n-max", fn_config.n_max, "Largest n")->capture_default_str();
    sub->add_option("--vocab-size", fn_config.vocab_size, "Vocabulary size")->capture_default_str();
    sub->add_option("--stopwords", fn_stopwords, "Stopword removal: both, word_only or none")
        ->check(CLI::IsMember({"both", "word_only", "none"}))
        ->capture_default_str();
    handlers.emplace_back(sub, [&] {
      require_input(fn_input);
      ngrams::NgramConfig cfg = fn_config;
      cfg.analyzer = ngrams::analyzer_from_name(fn_analyzer);
      cfg.stopwords = ngrams::stopword_policy_from_name(fn_stopwords);
      cfg.validate();
      if (ctx.dry_run) return;
      std::vector<std::string> texts;
      for (const auto& d : docs_in_split(load_docs(fn_input), corpus::Split::train)) texts.push_back(d.text);
      if (texts.empty()) throw DataError("no training documents to fit on");
      const auto vec = ngrams::FittedVectorizer::fit(texts, cfg);
      io::write_file(fn_out, vec.to_json().dump() + "\n");
      ctx.emit({{"vocabulary", vec.dimension()}, {"doc_count", vec.doc_count()}});
    });
  }

  // vectorize
  fs::path vz_vectorizer;
  fs::path vz_input;
  fs::path vz_out;
  bool vz_binary = false;
  {
    CLI::App* sub = add("vectorize", "Transform documents with a fitted vectorizer");
    sub->add_option("--vectorizer", vz_vectorizer, "vectorizer.json")->required();
    sub->add_option("--input", vz_input, "docs.jsonl")->required();
    sub->add_option("--out", vz_out, "Output vectors")->required();
    sub->add_flag("--binary", vz_binary, "Write the FSVB binary container instead of JSONL");
    handlers.emplace_back(sub, [&] {
      require_input(vz_vectorizer);
      require_input(vz_input);
      if (ctx.dry_run) return;
      Json vj;
      try {
        vj = Json::parse(io::read_file(vz_vectorizer));
      } catch (const Json::parse_error& e) {
        throw DataError(vz_vectorizer.string() + ": " + e.what());
      }
      const auto vec = ngrams::FittedVectorizer::from_json(vj);
      const auto docs = load_docs(vz_input);
      std::vector<std::vector<double>> rows;
      for (const auto& d : docs) rows.push_back(vec.transform_dense(d.text));
      const auto m = embed::make_matrix(doc_ids(docs), rows,
                                        embed::component_spec(std::string(ngrams::name(vec.config().analyzer)) + "_tfidf",
                                                              static_cast<Eigen::Index>(vec.dimension())));
      vz_binary ? embed::write_vectors_binary(vz_out, m) : embed::write_vectors_jsonl(vz_out, m);
      ctx.emit({{"docs", docs.size()}, {"dim", vec.dimension()}});
    });
  }

  // pool
  fs::path pl_input;
  fs::path pl_out;
  bool pl_binary = false;
  std::size_t pl_dim = 0;
  {
    CLI::App* sub = add("pool", "Mean-pool per-sentence vectors into document vectors");
    sub->add_option("--input", pl_input, "vectors.jsonl or FSVB file")->required();
    sub->add_option("--out", pl_out, "Output document vectors")->required();
    sub->add_option("--dim", pl_dim, "Expected vector width (0: any)")->capture_default_str();
    sub->add_flag("--binary", pl_binary, "Write the FSVB binary container instead of JSONL");
    handlers.emplace_back(sub, [&] {
      require_input(pl_input);
      if (ctx.dry_run) return;
      const auto vf = embed::load_vectors(pl_input, pl_dim == 0 ? std::nullopt : std::optional<std::size_t>(pl_dim));
      const auto m = vf.assemble(vf.order, pl_input.stem().string());
      pl_binary ? embed::write_vectors_binary(pl_out, m) : embed::write_vectors_jsonl(pl_out, m);
      ctx.emit({{"docs", m.doc_ids.size()}, {"dim", m.width()}});
    });
  }

  // concat
  std::vector<fs::path> cc_inputs;
  fs::path cc_out;
  bool cc_binary = false;
  {
    CLI::App* sub = add("concat", "Concatenate document vectors column-wise (ids follow the first input)");
    sub->add_option("--input", cc_inputs, "Vector files, in column order")->required();
    sub->add_option("--out", cc_out, "Output document vectors")->required();
    sub->add_flag("--binary", cc_binary, "Write the FSVB binary container instead of JSONL");
    handlers.emplace_back(sub, [&] {
      require_inputs(cc_inputs);
      if (ctx.dry_run) return;
      std::vector<embed::FeatureMatrix> parts;
      std::vector<std::string> ids;
      for (const auto& p : cc_inputs) {
        const auto vf = embed::load_vectors(p);
        if (ids.empty()) ids = vf.order;
        parts.push_back(vf.assemble(ids, p.stem().string()));
      }
      const auto m = embed::concat_features(parts);
      cc_binary ? embed::write_vectors_binary(cc_out, m) : embed::write_vectors_jsonl(cc_out, m);
      ctx.emit({{"docs", m.doc_ids.size()}, {"dim", m.width()}, {"feature_spec", m.feature_spec}});
    });
  }

  // train-mlp
  std::vector<fs::path> tm_vectors;
  fs::path tm_docs;
  fs::path tm_out;
  TrainOptions tm_train;
  {
    CLI::App* sub = add("train-mlp", "Train the author classifier on the train split");
    sub->add_option("--vectors", tm_vectors, "Document vector files, concatenated in order")->required();
    sub->add_option("--docs", tm_docs, "docs.jsonl with author labels")->required();
    sub->add_option("--out", tm_out, "Output model.json")->required();
    tm_train.attach(sub);
    handlers.emplace_back(sub, [&] {
      require_inputs(tm_vectors);
      require_input(tm_docs);
      const auto cfg = tm_train.resolve(ctx.seed);
      if (ctx.dry_run) return;
      const auto train = docs_in_split(load_docs(tm_docs), corpus::Split::train);
      const auto ids = doc_ids(train);
      std::vector<embed::FeatureMatrix> parts;
      for (const auto& p : tm_vectors) parts.push_back(matrix_for(p, ids));
      const auto X = embed::concat_features(parts);
      std::vector<std::string> y;
      for (const auto& d : train) y.push_back(d.author);
      const auto res = mlp::train(X.rows, y, cfg, X.feature_spec);
      for (const auto& w : res.report.warnings) ctx.progress("warning: " + w);
      ctx.progress("trained " + std::to_string(res.report.epochs_run) + " epochs");
      io::write_file(tm_out, mlp::to_json(res.model).dump() + "\n");
      ctx.emit({{"epochs_run", res.report.epochs_run},
                {"best_epoch", res.report.best_epoch},
                {"best_validation_score", res.report.best_validation_score}});
    });
  }

  // evaluate
  fs::path ev_model;
  std::vector<fs::path> ev_vectors;
  fs::path ev_docs;
  fs::path ev_out;
  {
    CLI::App* sub = add("evaluate", "Weighted F1 of a trained model on the test split");
    sub->add_option("--model", ev_model, "model.json")->required();
    sub->add_option("--vectors", ev_vectors, "Document vector files, same order as training")->required();
    sub->add_option("--docs", ev_docs, "docs.jsonl with author labels")->required();
    sub->add_option("--out", ev_out, "Optional report.json");
    handlers.emplace_back(sub, [&] {
      require_input(ev_model);
      require_inputs(ev_vectors);
      require_input(ev_docs);
      if (ctx.dry_run) return;
      Json mj;
      try {
        mj = Json::parse(io::read_file(ev_model));
      } catch (const Json::parse_error& e) {
        throw DataError(ev_model.string() + ": " + e.what());
      }
      const auto model = mlp::model_from_json(mj);
      const auto test = docs_in_split(load_docs(ev_docs), corpus::Split::test);
      if (test.empty()) throw DataError("no test documents");
      const auto ids = doc_ids(test);
      std::vector<embed::FeatureMatrix> parts;
      for (const auto& p : ev_vectors) parts.push_back(matrix_for(p, ids));
      const auto X = embed::concat_features(parts);
      std::vector<std::string> gold;
      for (const auto& d : test) gold.push_back(d.author);
      const auto pred = mlp::predict(model, X.rows);
      auto report = harness::evaluate(gold, pred.labels);
      report.config = {{"model_feature_spec", model.feature_spec}, {"feature_spec", X.feature_spec}};
      const Json j = harness::to_json(report);
      if (!ev_out.empty()) io::write_file(ev_out, j.dump(2) + "\n");
      ctx.emit(j);
    });
  }

  // run-experiment
  fs::path rx_config;
  std::vector<std::string> rx_set;
  std::size_t rx_seeds = 0;
  fs::path rx_output;
  {
    CLI::App* sub = add("run-experiment", "Run an authorship-attribution experiment from a config file");
    sub->add_option("--config", rx_config, "Experiment config file")->required();
    sub->add_option("--set", rx_set, "Override a config key (key=value); repeatable");
    sub->add_option("--seeds", rx_seeds, "Number of consecutive seeds to run (overrides config)");
    sub->add_option("--output-dir", rx_output, "Output directory (overrides config)");
    handlers.emplace_back(sub, [&, sub] {
      auto cfg = config::Config::load(rx_config);
      cfg.apply_env(harness::experiment_keys(), config::process_env());
      for (const auto& a : rx_set) cfg.set_assignment(a);
      if (sub->count("--seed") > 0) cfg.set("seed", config::Value::parse(std::to_string(ctx.seed), false));
      if (rx_seeds > 0) cfg.set("seeds", config::Value::parse(std::to_string(rx_seeds), false));
      auto spec = harness::spec_from_config(cfg);
      if (!rx_output.empty()) spec.output_dir = rx_output;
      if (spec.output_dir.empty()) throw ConfigError("no output directory: set output_dir or --output-dir");
      if (ctx.dry_run) {
        ctx.emit({{"dry_run", true}, {"experiment", spec.to_json()}});
        return;
      }
      const auto results = harness::run_experiments(spec, true, [&](const std::string& m) { ctx.progress(m); });
      Json runs = Json::array();
      for (std::size_t k = 0; k < results.size(); ++k) {
        runs.push_back({{"seed", spec.seed + k}, {"weighted_f1", results[k].report.weighted_f1}});
      }
      ctx.emit({{"name", spec.name}, {"output_dir", spec.output_dir.string()}, {"runs", runs}});
    });
  }

  // report
  std::vector<fs::path> rp_inputs;
  fs::path rp_out;
  {
    CLI::App* sub = add("report", "Aggregate report.json files into a dataset x feature-set table");
    sub->add_option("inputs", rp_inputs, "report.json files or directories searched recursively")->required();
    sub->add_option("--out", rp_out, "Output summary.md (default: standard output)");
    handlers.emplace_back(sub, [&] {
      require_inputs(rp_inputs);
      std::vector<fs::path> files;
      for (const auto& p : rp_inputs) {
        if (fs::is_directory(p)) {
          for (const auto& e : fs::recursive_directory_iterator(p)) {
            if (e.is_regular_file() && e.path().filename() == "report.json") files.push_back(e.path());
          }
        } else {
          files.push_back(p);
        }
      }
      std::sort(files.begin(), files.end());
      if (files.empty()) throw DataError("no report.json files found");
      if (ctx.dry_run) return;
      std::vector<Json> reports;
      for (const auto& f : files) {
        try {
          reports.push_back(Json::parse(io::read_file(f)));
        } catch (const Json::parse_error& e) {
          throw DataError(f.string() + ": " + e.what());
        }
      }
      const std::string md = harness::summary_markdown(reports);
      if (rp_out.empty()) {
        out << md;
      } else {
        io::write_file(rp_out, md);
        ctx.emit({{"reports", reports.size()}, {"out", rp_out.string()}});
      }
    });
  }

  // list-features
  {
    CLI::App* sub = add("list-features", "Print stylometric feature names in slot order");
    handlers.emplace_back(sub, [&] {
      for (const auto n : stylometry::metric_names()) out << n << '\n';
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    for (auto& [sub, fn] : handlers) {
      if (sub->parsed()) fn();
    }
  } catch (const ConfigError& e) {
    err << "figstyle: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    err << "figstyle: data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "figstyle: error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}

}  // namespace figstyle::cli
