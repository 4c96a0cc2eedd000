#include "figstyle/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "figstyle/corpus.hpp"
#include "figstyle/error.hpp"
#include "figstyle/io.hpp"
#include "figstyle/util.hpp"

namespace figstyle::mlp {

using io::Json;

namespace {

constexpr std::uint64_t kShuffleStream = 0x9e3779b97f4a7c15ULL;

void softmax_rows(MatrixXd& z) {
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double mx = z.row(i).maxCoeff();
    z.row(i) = (z.row(i).array() - mx).exp().matrix();
    z.row(i) /= z.row(i).sum();
  }
}

std::size_t argmax_row(const MatrixXd& probs, Eigen::Index i) {
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < probs.cols(); ++j) {
    if (probs(i, j) > probs(i, best)) best = j;
  }
  return static_cast<std::size_t>(best);
}

double accuracy_params(const Params& p, const MatrixXd& X, std::span<const std::size_t> y) {
  const ForwardPass fp = forward(p, X);
  std::size_t hits = 0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    if (argmax_row(fp.probs, i) == y[static_cast<std::size_t>(i)]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(X.rows());
}

Json flatten(const MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  }
  return out;
}

MatrixXd unflatten(const Json& j, Eigen::Index rows, Eigen::Index cols, const char* name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows * cols) {
    throw DataError(std::string("model field ") + name + " has the wrong size");
  }
  MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = j[k++].get<double>();
  }
  return m;
}

}  // namespace

Params Params::zeros_like(const Params& p) {
  return Params{MatrixXd::Zero(p.w1.rows(), p.w1.cols()), VectorXd::Zero(p.b1.size()),
                MatrixXd::Zero(p.w2.rows(), p.w2.cols()), VectorXd::Zero(p.b2.size())};
}

bool Params::all_finite() const {
  return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite();
}

void TrainConfig::validate() const {
  if (!(adam.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (max_epochs < 1) throw ConfigError("max_epochs must be at least 1");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("validation fraction must lie in (0, 1)");
  }
  if (patience < 1) throw ConfigError("patience must be at least 1");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  if (hidden_units < 1) throw ConfigError("hidden units must be at least 1");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(adam.epsilon > 0.0)) throw ConfigError("Adam epsilon must be positive");
}

Json TrainConfig::to_json() const {
  return Json{{"learning_rate", adam.learning_rate},
              {"beta1", adam.beta1},
              {"beta2", adam.beta2},
              {"epsilon", adam.epsilon},
              {"max_epochs", max_epochs},
              {"early_stopping", early_stopping},
              {"validation_fraction", validation_fraction},
              {"patience", patience},
              {"tolerance", tolerance},
              {"batch_size", batch_size},
              {"hidden_units", hidden_units},
              {"seed", seed}};
}

Json TrainReport::to_json() const {
  return Json{{"epochs_run", epochs_run},
              {"best_epoch", best_epoch},
              {"best_validation_score", best_validation_score},
              {"stopped_early", stopped_early},
              {"n_train", n_train},
              {"n_validation", n_validation},
              {"loss_curve", loss_curve},
              {"validation_curve", validation_curve},
              {"warnings", warnings}};
}

TrainReport TrainReport::from_json(const Json& j) {
  TrainReport r;
  r.epochs_run = j.value("epochs_run", 0);
  r.best_epoch = j.value("best_epoch", 0);
  r.best_validation_score = j.value("best_validation_score", 0.0);
  r.stopped_early = j.value("stopped_early", false);
  r.n_train = j.value("n_train", std::size_t{0});
  r.n_validation = j.value("n_validation", std::size_t{0});
  r.loss_curve = j.value("loss_curve", std::vector<double>{});
  r.validation_curve = j.value("validation_curve", std::vector<double>{});
  r.warnings = j.value("warnings", std::vector<std::string>{});
  return r;
}

Params init_params(Eigen::Index input_dim, Eigen::Index hidden, Eigen::Index classes,
                   std::uint64_t seed) {
  Rng rng(seed);
  auto fill = [&](Eigen::Index rows, Eigen::Index cols, double bound) {
    MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-bound, bound);
    }
    return m;
  };
  const double bound1 = std::sqrt(6.0 / static_cast<double>(input_dim + hidden));
  const double bound2 = std::sqrt(6.0 / static_cast<double>(hidden + classes));
  Params p;
  p.w1 = fill(input_dim, hidden, bound1);
  p.b1 = fill(hidden, 1, bound1);
  p.w2 = fill(hidden, classes, bound2);
  p.b2 = fill(classes, 1, bound2);
  return p;
}

ForwardPass forward(const Params& p, const MatrixXd& X) {
  if (X.cols() != p.w1.rows()) {
    throw DataError("input width " + std::to_string(X.cols()) + " does not match model width " +
                    std::to_string(p.w1.rows()));
  }
  ForwardPass out;
  out.hidden = ((X * p.w1).rowwise() + p.b1.transpose()).cwiseMax(0.0);
  out.probs = (out.hidden * p.w2).rowwise() + p.b2.transpose();
  softmax_rows(out.probs);
  return out;
}

LossAndGrads loss_and_grads(const Params& p, const MatrixXd& X, const MatrixXd& y_onehot) {
  if (y_onehot.rows() != X.rows() || y_onehot.cols() != p.w2.cols()) {
    throw DataError("label matrix shape does not match inputs");
  }
  const MatrixXd pre = (X * p.w1).rowwise() + p.b1.transpose();
  const MatrixXd hidden = pre.cwiseMax(0.0);
  MatrixXd logits = (hidden * p.w2).rowwise() + p.b2.transpose();

  const auto n = static_cast<double>(X.rows());
  LossAndGrads out;
  double loss = 0.0;
  MatrixXd probs = logits;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double mx = logits.row(i).maxCoeff();
    const double lse = mx + std::log((logits.row(i).array() - mx).exp().sum());
    loss -= (y_onehot.row(i).array() * (logits.row(i).array() - lse)).sum();
    probs.row(i) = (logits.row(i).array() - lse).exp().matrix();
  }
  out.loss = loss / n;

  const MatrixXd d_logits = (probs - y_onehot) / n;
  out.grads.w2 = hidden.transpose() * d_logits;
  out.grads.b2 = d_logits.colwise().sum().transpose();
  const MatrixXd d_hidden = (d_logits * p.w2.transpose()).cwiseProduct(
      (pre.array() > 0.0).cast<double>().matrix());
  out.grads.w1 = X.transpose() * d_hidden;
  out.grads.b1 = d_hidden.colwise().sum().transpose();
  return out;
}

AdamState AdamState::zeros_like(const Params& p) {
  return AdamState{Params::zeros_like(p), Params::zeros_like(p)};
}

void adam_step(Params& params, const Params& grads, AdamState& state, long t,
               const AdamConfig& cfg) {
  if (t < 1) throw Error("Adam step index must be at least 1");
  adam_update(params.w1, grads.w1, state.m.w1, state.v.w1, t, cfg);
  adam_update(params.b1, grads.b1, state.m.b1, state.v.b1, t, cfg);
  adam_update(params.w2, grads.w2, state.m.w2, state.v.w2, t, cfg);
  adam_update(params.b2, grads.b2, state.m.b2, state.v.b2, t, cfg);
}

TrainResult train(const MatrixXd& X, std::span<const std::string> y, const TrainConfig& config,
                  std::string feature_spec) {
  config.validate();
  if (static_cast<std::size_t>(X.rows()) != y.size()) {
    throw DataError("feature rows and labels differ in count");
  }
  if (!X.allFinite()) throw DataError("training features contain non-finite values");

  TrainResult result;
  MlpModel& model = result.model;
  TrainReport& report = result.report;
  model.feature_spec = std::move(feature_spec);

  std::map<std::string, std::size_t> class_pos;
  for (const auto& label : y) class_pos.emplace(label, 0);
  if (class_pos.size() < 2) throw DataError("training needs at least two classes");
  for (auto& [label, idx] : class_pos) {
    idx = model.class_index.size();
    model.class_index.push_back(label);
  }
  std::vector<std::size_t> targets(y.size());
  std::map<std::string, std::size_t> class_counts;
  for (std::size_t i = 0; i < y.size(); ++i) {
    targets[i] = class_pos[y[i]];
    ++class_counts[y[i]];
  }

  std::vector<Eigen::Index> train_idx;
  std::vector<Eigen::Index> val_idx;
  if (config.early_stopping) {
    std::vector<bool> is_val(y.size(), false);
    const bool stratifiable = std::all_of(class_counts.begin(), class_counts.end(),
                                          [](const auto& kv) { return kv.second >= 2; });
    if (stratifiable) {
      is_val = corpus::stratified_assign(std::vector<std::string>(y.begin(), y.end()),
                                         config.validation_fraction, config.seed)
                   .is_test;
    } else {
      report.warnings.push_back(
          "a class has fewer than 2 samples; validation holdout is not stratified");
      if (y.size() < 2) throw DataError("need at least two samples for a validation holdout");
      std::vector<std::size_t> order(y.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      Rng rng(config.seed);
      std::size_t k = round_half_up(static_cast<double>(y.size()) * config.validation_fraction);
      k = std::clamp<std::size_t>(k, 1, y.size() - 1);
      rng.partial_shuffle(order, k);
      for (std::size_t j = 0; j < k; ++j) is_val[order[j]] = true;
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
      (is_val[i] ? val_idx : train_idx).push_back(static_cast<Eigen::Index>(i));
    }
  } else {
    for (std::size_t i = 0; i < y.size(); ++i) train_idx.push_back(static_cast<Eigen::Index>(i));
  }
  report.n_train = train_idx.size();
  report.n_validation = val_idx.size();

  const auto n_classes = static_cast<Eigen::Index>(model.class_index.size());
  Params params = init_params(X.cols(), static_cast<Eigen::Index>(config.hidden_units), n_classes,
                              config.seed);
  AdamState state = AdamState::zeros_like(params);

  MatrixXd onehot = MatrixXd::Zero(X.rows(), n_classes);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    onehot(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(targets[i])) = 1.0;
  }
  MatrixXd X_val;
  std::vector<std::size_t> y_val;
  if (!val_idx.empty()) {
    X_val = X(val_idx, Eigen::all);
    for (auto i : val_idx) y_val.push_back(targets[static_cast<std::size_t>(i)]);
  }

  const std::size_t batch = std::min(config.batch_size, train_idx.size());
  Rng rng(config.seed ^ kShuffleStream);
  Params best_params = params;
  double best_score = -std::numeric_limits<double>::infinity();
  int no_improvement = 0;
  long step = 0;
  std::vector<Eigen::Index> order = train_idx;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0, b = 0; start < order.size(); start += batch, ++b) {
      const std::size_t end = std::min(start + batch, order.size());
      const std::vector<Eigen::Index> rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                                           order.begin() + static_cast<std::ptrdiff_t>(end));
      const MatrixXd Xb = X(rows, Eigen::all);
      const MatrixXd Yb = onehot(rows, Eigen::all);
      LossAndGrads lg = loss_and_grads(params, Xb, Yb);
      if (!std::isfinite(lg.loss)) {
        throw Error("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                    std::to_string(b));
      }
      loss_sum += lg.loss * static_cast<double>(end - start);
      adam_step(params, lg.grads, state, ++step, config.adam);
    }
    report.loss_curve.push_back(loss_sum / static_cast<double>(order.size()));
    report.epochs_run = epoch;

    if (!config.early_stopping) {
      report.best_epoch = epoch;
      continue;
    }
    const double score = accuracy_params(params, X_val, y_val);
    report.validation_curve.push_back(score);
    if (score < best_score + config.tolerance) {
      ++no_improvement;
    } else {
      no_improvement = 0;
    }
    if (score > best_score) {
      best_score = score;
      best_params = params;
      report.best_epoch = epoch;
    }
    if (no_improvement >= config.patience) {
      report.stopped_early = true;
      break;
    }
  }

  if (config.early_stopping) {
    params = std::move(best_params);
    report.best_validation_score = best_score;
  }
  if (!params.all_finite()) throw Error("training produced non-finite parameters");
  model.params = std::move(params);
  model.train_report = report;
  return result;
}

Prediction predict(const MlpModel& model, const MatrixXd& X) {
  Prediction out;
  out.probs = forward(model.params, X).probs;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const std::size_t k = argmax_row(out.probs, i);
    out.indices.push_back(k);
    out.labels.push_back(model.class_index[k]);
  }
  return out;
}

double accuracy(const MlpModel& model, const MatrixXd& X, std::span<const std::size_t> y) {
  return accuracy_params(model.params, X, y);
}

Json to_json(const MlpModel& model) {
  return Json{{"format", "figstyle-mlp-1"},
              {"class_index", model.class_index},
              {"feature_spec", model.feature_spec},
              {"dims",
               {{"input", model.input_dim()}, {"hidden", model.hidden()}, {"classes", model.classes()}}},
              {"W1", flatten(model.params.w1)},
              {"b1", flatten(model.params.b1)},
              {"W2", flatten(model.params.w2)},
              {"b2", flatten(model.params.b2)},
              {"train_report", model.train_report.to_json()}};
}

MlpModel model_from_json(const Json& j) {
  MlpModel m;
  try {
    m.class_index = io::require(j, "class_index").get<std::vector<std::string>>();
    m.feature_spec = io::require_string(j, "feature_spec");
    const Json& dims = io::require(j, "dims");
    const auto in = io::require(dims, "input").get<Eigen::Index>();
    const auto hid = io::require(dims, "hidden").get<Eigen::Index>();
    const auto cls = io::require(dims, "classes").get<Eigen::Index>();
    if (in < 1 || hid < 1 || cls < 2) throw DataError("invalid model dimensions");
    if (static_cast<Eigen::Index>(m.class_index.size()) != cls) {
      throw DataError("class_index size does not match dims.classes");
    }
    m.params.w1 = unflatten(io::require(j, "W1"), in, hid, "W1");
    m.params.b1 = unflatten(io::require(j, "b1"), hid, 1, "b1");
    m.params.w2 = unflatten(io::require(j, "W2"), hid, cls, "W2");
    m.params.b2 = unflatten(io::require(j, "b2"), cls, 1, "b2");
    if (j.contains("train_report")) m.train_report = TrainReport::from_json(j["train_report"]);
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed model: ") + e.what());
  }
  if (!m.params.all_finite()) throw DataError("model contains non-finite parameters");
  return m;
}

}  // namespace figstyle::mlp
