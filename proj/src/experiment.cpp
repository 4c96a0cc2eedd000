#include "figstyle/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "figstyle/error.hpp"
#include "figstyle/io.hpp"
#include "figstyle/stylometry.hpp"
#include "figstyle/util.hpp"

namespace figstyle::harness {

using io::Json;

namespace {

std::string fixed(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::vector<std::string> ids_of(std::span<const corpus::AuthorDoc> docs) {
  std::vector<std::string> ids;
  ids.reserve(docs.size());
  for (const auto& d : docs) ids.push_back(d.doc_id);
  return ids;
}

std::vector<std::string> texts_of(std::span<const corpus::AuthorDoc> docs) {
  std::vector<std::string> texts;
  texts.reserve(docs.size());
  for (const auto& d : docs) texts.push_back(d.text);
  return texts;
}

embed::FeatureMatrix stylo_matrix(std::span<const corpus::AuthorDoc> docs,
                                  const stylometry::WordFrequencyTable& freq) {
  std::vector<std::vector<double>> rows;
  rows.reserve(docs.size());
  for (const auto& d : docs) {
    const auto v = stylometry::compute_stylo_vector(d.text, freq);
    rows.emplace_back(v.values.begin(), v.values.end());
  }
  return embed::make_matrix(ids_of(docs), rows,
                            embed::component_spec("stylo", stylometry::kMetricCount));
}

embed::FeatureMatrix tfidf_matrix(std::span<const corpus::AuthorDoc> docs,
                                  const ngrams::FittedVectorizer& vec, std::string_view label) {
  std::vector<std::vector<double>> rows;
  rows.reserve(docs.size());
  for (const auto& d : docs) rows.push_back(vec.transform_dense(d.text));
  return embed::make_matrix(ids_of(docs), rows,
                            embed::component_spec(label, static_cast<Eigen::Index>(vec.dimension())));
}

}  // namespace

std::string FeatureComponent::label() const {
  switch (kind) {
    case ComponentKind::stylo: return "stylo";
    case ComponentKind::word_tfidf: return "word_tfidf";
    case ComponentKind::char_tfidf: return "char_tfidf";
    case ComponentKind::embedding: return "embedding:" + embedding;
  }
  return {};
}

std::vector<FeatureComponent> parse_feature_set(std::string_view spec) {
  std::vector<FeatureComponent> out;
  std::size_t start = 0;
  while (start <= spec.size()) {
    std::size_t end = spec.find('+', start);
    if (end == std::string_view::npos) end = spec.size();
    std::string_view part = spec.substr(start, end - start);
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    FeatureComponent c;
    if (part == "stylo") {
      c.kind = ComponentKind::stylo;
    } else if (part == "word_tfidf") {
      c.kind = ComponentKind::word_tfidf;
    } else if (part == "char_tfidf") {
      c.kind = ComponentKind::char_tfidf;
    } else if (part.starts_with("embedding:") && part.size() > 10) {
      c.kind = ComponentKind::embedding;
      c.embedding = std::string(part.substr(10));
    } else {
      throw ConfigError("unknown feature component \"" + std::string(part) + "\"");
    }
    if (std::find(out.begin(), out.end(), c) != out.end()) {
      throw ConfigError("feature component \"" + c.label() + "\" listed twice");
    }
    out.push_back(std::move(c));
    start = end + 1;
  }
  return out;
}

std::string feature_set_label(std::span<const FeatureComponent> components) {
  std::string out;
  for (const auto& c : components) {
    if (!out.empty()) out += '+';
    out += c.label();
  }
  return out;
}

void ExperimentSpec::validate() const {
  if (features.empty()) throw ConfigError("experiment needs at least one feature component");
  if (corpus.empty()) throw ConfigError("experiment needs a corpus path");
  if (!std::filesystem::exists(corpus)) throw ConfigError("corpus not found: " + corpus.string());
  if (seeds == 0) throw ConfigError("seeds must be at least 1");
  ngrams.validate();
  for (const auto& c : features) {
    if (c.kind != ComponentKind::embedding) continue;
    auto it = embeddings.find(c.embedding);
    if (it == embeddings.end()) {
      throw ConfigError("no vector file configured for embedding \"" + c.embedding + "\"");
    }
    if (!std::filesystem::exists(it->second)) {
      throw ConfigError("vector file not found: " + it->second.string());
    }
  }
  train.validate();
}

Json ExperimentSpec::to_json() const {
  Json emb = Json::object();
  for (const auto& [k, p] : embeddings) emb[k] = p.filename().string();
  return Json{{"name", name},
              {"dataset", dataset},
              {"corpus", corpus.filename().string()},
              {"features", feature_set_label(features)},
              {"embeddings", emb},
              {"ngrams",
               {{"n_min", ngrams.n_min},
                {"n_max", ngrams.n_max},
                {"vocab_size", ngrams.vocab_size},
                {"stopwords", ngrams::name(ngrams.stopwords)}}},
              {"train", train.to_json()},
              {"seed", seed},
              {"standardize", standardize}};
}

const std::set<std::string>& experiment_keys() {
  static const std::set<std::string> keys = {
      "name", "dataset", "corpus", "features", "seed", "seeds", "standardize", "output_dir",
      "ngrams.n_min", "ngrams.n_max", "ngrams.vocab_size", "ngrams.stopwords",
      "train.learning_rate", "train.beta1", "train.beta2", "train.epsilon", "train.max_epochs",
      "train.early_stopping", "train.validation_fraction", "train.patience", "train.tolerance",
      "train.batch_size", "train.hidden_units"};
  return keys;
}

ExperimentSpec spec_from_config(const config::Config& cfg) {
  static const std::vector<std::string> prefixes = {"embeddings."};
  cfg.check_keys(experiment_keys(), prefixes);

  ExperimentSpec spec;
  spec.corpus = cfg.get_path("corpus");
  spec.name = cfg.get_string("name", spec.corpus.stem().string());
  spec.dataset = cfg.get_string("dataset", spec.corpus.stem().string());
  std::string features;
  for (const auto& part : cfg.get_list("features")) {
    if (!features.empty()) features += '+';
    features += part;
  }
  if (features.empty()) throw ConfigError("missing config key \"features\"");
  spec.features = parse_feature_set(features);
  for (const auto& [name, raw] : cfg.strings_with_prefix("embeddings.")) {
    std::filesystem::path p = raw;
    if (p.is_relative() && !cfg.base_dir().empty()) p = cfg.base_dir() / p;
    spec.embeddings[name] = p;
  }

  spec.ngrams.n_min = static_cast<int>(cfg.get_int("ngrams.n_min", spec.ngrams.n_min));
  spec.ngrams.n_max = static_cast<int>(cfg.get_int("ngrams.n_max", spec.ngrams.n_max));
  const long long vocab = cfg.get_int("ngrams.vocab_size", static_cast<long long>(spec.ngrams.vocab_size));
  if (vocab <= 0) throw ConfigError("ngrams.vocab_size must be positive");
  spec.ngrams.vocab_size = static_cast<std::size_t>(vocab);
  if (cfg.has("ngrams.stopwords")) {
    spec.ngrams.stopwords = ngrams::stopword_policy_from_name(cfg.get_string("ngrams.stopwords", ""));
  }

  mlp::TrainConfig& t = spec.train;
  t.adam.learning_rate = cfg.get_double("train.learning_rate", t.adam.learning_rate);
  t.adam.beta1 = cfg.get_double("train.beta1", t.adam.beta1);
  t.adam.beta2 = cfg.get_double("train.beta2", t.adam.beta2);
  t.adam.epsilon = cfg.get_double("train.epsilon", t.adam.epsilon);
  t.max_epochs = static_cast<int>(cfg.get_int("train.max_epochs", t.max_epochs));
  t.early_stopping = cfg.get_bool("train.early_stopping", t.early_stopping);
  t.validation_fraction = cfg.get_double("train.validation_fraction", t.validation_fraction);
  t.patience = static_cast<int>(cfg.get_int("train.patience", t.patience));
  t.tolerance = cfg.get_double("train.tolerance", t.tolerance);
  const long long batch = cfg.get_int("train.batch_size", static_cast<long long>(t.batch_size));
  const long long hidden = cfg.get_int("train.hidden_units", static_cast<long long>(t.hidden_units));
  if (batch <= 0 || hidden <= 0) throw ConfigError("train.batch_size and train.hidden_units must be positive");
  t.batch_size = static_cast<std::size_t>(batch);
  t.hidden_units = static_cast<std::size_t>(hidden);

  spec.seed = cfg.get_uint("seed", 0);
  t.seed = spec.seed;
  const long long seeds = cfg.get_int("seeds", 1);
  if (seeds <= 0) throw ConfigError("seeds must be at least 1");
  spec.seeds = static_cast<std::size_t>(seeds);
  spec.standardize = cfg.get_bool("standardize", false);
  if (cfg.has("output_dir")) spec.output_dir = cfg.get_path("output_dir");
  spec.validate();
  return spec;
}

Json FitFingerprint::to_json() const {
  return Json{{"component", component}, {"n_docs", n_docs}, {"digest", digest}};
}

FitFingerprint fingerprint(std::string component, std::span<const std::string> ids) {
  std::vector<std::string> sorted(ids.begin(), ids.end());
  std::sort(sorted.begin(), sorted.end());
  Fnv1a h;
  for (const auto& id : sorted) {
    h.update(id);
    h.update(std::string_view("\n", 1));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h.digest()));
  return FitFingerprint{std::move(component), sorted.size(), buf};
}

FeatureSplit build_features(const ExperimentSpec& spec, std::span<const corpus::AuthorDoc> train,
                            std::span<const corpus::AuthorDoc> test) {
  const auto train_ids = ids_of(train);
  const auto test_ids = ids_of(test);
  std::vector<embed::FeatureMatrix> train_parts;
  std::vector<embed::FeatureMatrix> test_parts;
  FeatureSplit out;

  for (const auto& c : spec.features) {
    switch (c.kind) {
      case ComponentKind::stylo: {
        stylometry::WordFrequencyTable freq;
        for (const auto& d : train) freq.add(stylometry::tokenize(d.text).tokens);
        out.fits.push_back(fingerprint(c.label(), train_ids));
        train_parts.push_back(stylo_matrix(train, freq));
        test_parts.push_back(stylo_matrix(test, freq));
        break;
      }
      case ComponentKind::word_tfidf:
      case ComponentKind::char_tfidf: {
        ngrams::NgramConfig cfg = spec.ngrams;
        cfg.analyzer = c.kind == ComponentKind::word_tfidf ? ngrams::Analyzer::word
                                                           : ngrams::Analyzer::character;
        const auto vec = ngrams::FittedVectorizer::fit(texts_of(train), cfg);
        out.fits.push_back(fingerprint(c.label(), train_ids));
        train_parts.push_back(tfidf_matrix(train, vec, c.label()));
        test_parts.push_back(tfidf_matrix(test, vec, c.label()));
        break;
      }
      case ComponentKind::embedding: {
        const auto vf = embed::load_vectors(spec.embeddings.at(c.embedding));
        train_parts.push_back(vf.assemble(train_ids, c.embedding));
        test_parts.push_back(vf.assemble(test_ids, c.embedding));
        break;
      }
    }
  }
  out.train = embed::concat_features(train_parts);
  out.test = embed::concat_features(test_parts);
  return out;
}

void standardize_columns(Eigen::MatrixXd& train, Eigen::MatrixXd& test) {
  const auto n = static_cast<double>(train.rows());
  for (Eigen::Index j = 0; j < train.cols(); ++j) {
    const double mean = train.col(j).sum() / n;
    const double var = (train.col(j).array() - mean).square().sum() / n;
    const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
    train.col(j) = (train.col(j).array() - mean) / sd;
    test.col(j) = (test.col(j).array() - mean) / sd;
  }
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const ProgressFn& progress) {
  const auto start = std::chrono::steady_clock::now();
  auto say = [&](const std::string& msg) {
    if (progress) progress(spec.name + ": " + msg);
  };
  spec.validate();

  const auto loaded = corpus::load_aa_corpus(spec.corpus);
  std::vector<corpus::AuthorDoc> train;
  std::vector<corpus::AuthorDoc> test;
  for (const auto& d : loaded.docs) (d.split == corpus::Split::train ? train : test).push_back(d);
  if (train.empty()) throw DataError("corpus has no training documents");
  if (test.empty()) throw DataError("corpus has no test documents");
  say("loaded " + std::to_string(train.size()) + " train / " + std::to_string(test.size()) +
      " test documents from " + std::to_string(loaded.histogram.size()) + " authors");

  FeatureSplit feats = build_features(spec, train, test);
  say("features " + feats.train.feature_spec);
  if (spec.standardize) standardize_columns(feats.train.rows, feats.test.rows);

  std::vector<std::string> y_train;
  std::vector<std::string> y_test;
  for (const auto& d : train) y_train.push_back(d.author);
  for (const auto& d : test) y_test.push_back(d.author);

  mlp::TrainConfig tc = spec.train;
  tc.seed = spec.seed;
  auto trained = mlp::train(feats.train.rows, y_train, tc, feats.train.feature_spec);
  say("trained " + std::to_string(trained.report.epochs_run) + " epochs (best " +
      std::to_string(trained.report.best_epoch) + ")");

  const auto pred = mlp::predict(trained.model, feats.test.rows);
  ExperimentResult result;
  result.report = evaluate(y_test, pred.labels);
  result.report.config = spec.to_json();
  result.model = std::move(trained.model);
  result.fits = std::move(feats.fits);
  result.n_train = train.size();
  result.n_test = test.size();
  result.report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  say("weighted F1 " + fixed(result.report.weighted_f1) + " in " +
      fixed(result.report.runtime_seconds, 2) + " s");
  return result;
}

Json report_json(const ExperimentSpec& spec, const ExperimentResult& result) {
  Json j = to_json(result.report);
  Json fits = Json::array();
  for (const auto& f : result.fits) fits.push_back(f.to_json());
  const auto& tr = result.model.train_report;
  j["dataset"] = spec.dataset;
  j["name"] = spec.name;
  j["feature_set"] = feature_set_label(spec.features);
  j["feature_spec"] = result.model.feature_spec;
  j["seed"] = spec.seed;
  j["n_train"] = result.n_train;
  j["n_test"] = result.n_test;
  j["fits"] = fits;
  j["training"] = Json{{"epochs_run", tr.epochs_run},
                       {"best_epoch", tr.best_epoch},
                       {"best_validation_score", tr.best_validation_score},
                       {"stopped_early", tr.stopped_early},
                       {"warnings", tr.warnings}};
  return j;
}

std::string report_text(const ExperimentSpec& spec, const ExperimentResult& result) {
  const EvalReport& r = result.report;
  std::string out;
  out += "experiment   " + spec.name + "\n";
  out += "dataset      " + spec.dataset + "\n";
  out += "features     " + result.model.feature_spec + "\n";
  out += "seed         " + std::to_string(spec.seed) + "\n";
  out += "train/test   " + std::to_string(result.n_train) + "/" + std::to_string(result.n_test) + "\n";
  out += "weighted F1  " + fixed(r.weighted_f1) + "\n\n";
  std::size_t width = 5;
  for (const auto& c : r.per_class) width = std::max(width, c.label.size());
  auto pad = [](std::string s, std::size_t w) {
    s.resize(std::max(s.size(), w), ' ');
    return s;
  };
  out += pad("class", width) + "  precision  recall  f1      support\n";
  for (const auto& c : r.per_class) {
    out += pad(c.label, width) + "  " + pad(fixed(c.precision), 9) + "  " + pad(fixed(c.recall), 6) +
           "  " + pad(fixed(c.f1), 6) + "  " + std::to_string(c.support) + "\n";
  }
  return out;
}

void write_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec,
                   const ExperimentResult& result) {
  io::write_file(dir / "report.json", report_json(spec, result).dump(2) + "\n");
  io::write_file(dir / "report.txt", report_text(spec, result));
  io::write_file(dir / "model.json", mlp::to_json(result.model).dump() + "\n");
  io::write_file(dir / "timing.json",
                 Json{{"runtime_seconds", result.report.runtime_seconds}}.dump(2) + "\n");
}

std::vector<ExperimentResult> run_experiments(const ExperimentSpec& spec, bool write,
                                              const ProgressFn& progress) {
  std::vector<ExperimentResult> results;
  Json runs = Json::array();
  for (std::size_t k = 0; k < spec.seeds; ++k) {
    ExperimentSpec run = spec;
    run.seed = spec.seed + k;
    run.train.seed = run.seed;
    results.push_back(run_experiment(run, progress));
    if (write) {
      const auto dir = spec.seeds == 1 ? spec.output_dir
                                       : spec.output_dir / ("seed-" + std::to_string(run.seed));
      write_outputs(dir, run, results.back());
    }
    runs.push_back(Json{{"seed", run.seed}, {"weighted_f1", results.back().report.weighted_f1}});
  }
  if (write && spec.seeds > 1) {
    double mean = 0.0;
    for (const auto& r : results) mean += r.report.weighted_f1;
    mean /= static_cast<double>(results.size());
    double var = 0.0;
    for (const auto& r : results) var += std::pow(r.report.weighted_f1 - mean, 2);
    var /= static_cast<double>(results.size());
    io::write_file(spec.output_dir / "seeds.json",
                   Json{{"name", spec.name}, {"runs", runs}, {"mean", mean}, {"std", std::sqrt(var)}}
                           .dump(2) +
                       "\n");
  }
  return results;
}

std::string summary_markdown(std::span<const Json> reports) {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::map<std::pair<std::string, std::string>, double> cells;
  for (const auto& r : reports) {
    const std::string row = io::require_string(r, "dataset");
    const std::string col = io::require_string(r, "feature_set");
    const Json& f1 = io::require(r, "weighted_f1");
    if (!f1.is_number()) throw DataError("report field \"weighted_f1\" is not a number");
    if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(row);
    if (std::find(cols.begin(), cols.end(), col) == cols.end()) cols.push_back(col);
    if (!cells.emplace(std::make_pair(row, col), f1.get<double>()).second) {
      throw DataError("two reports for dataset \"" + row + "\" and features \"" + col + "\"");
    }
  }
  std::sort(rows.begin(), rows.end());
  std::sort(cols.begin(), cols.end());
  std::string out = "| Dataset |";
  for (const auto& c : cols) out += " " + c + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < cols.size(); ++i) out += "---|";
  out += "\n";
  for (const auto& row : rows) {
    out += "| " + row + " |";
    for (const auto& col : cols) {
      auto it = cells.find({row, col});
      out += it == cells.end() ? " - |" : " " + fixed(it->second, 2) + " |";
    }
    out += "\n";
  }
  return out;
}

}  // namespace figstyle::harness
