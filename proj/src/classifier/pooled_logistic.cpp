#include "ccts/classifier/pooled_logistic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ccts/classifier/metrics.hpp"
#include "ccts/core/error.hpp"
#include "ccts/core/stats.hpp"

namespace ccts::classifier {
namespace {

void append_summary(std::span<const double> v, std::vector<double>& out) {
  out.push_back(mean(v));
  out.push_back(population_std(v));
  out.push_back(*std::min_element(v.begin(), v.end()));
  out.push_back(*std::max_element(v.begin(), v.end()));
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t fnv(std::string_view s, std::uint64_t h = 0xCBF29CE484222325ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

std::vector<double> standardize(const std::vector<double>& f,
                                const PooledLogisticModel& m) {
  std::vector<double> z(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    z[i] = (f[i] - m.feature_mean[i]) / m.feature_scale[i];
  }
  return z;
}

double score(const PooledLogisticModel& m, std::span<const double> z) {
  double s = m.bias;
  for (std::size_t i = 0; i < z.size(); ++i) s += m.weights[i] * z[i];
  return s;
}

}  // namespace

std::vector<double> pooled_features(const MultivariateSeries& x) {
  std::vector<double> out;
  out.reserve(4 * x.n_channels() + 4);
  for (std::size_t c = 0; c < x.n_channels(); ++c) append_summary(x.channel(c), out);
  append_summary(x.values(), out);
  return out;
}

std::vector<std::string> pooled_feature_names(
    const std::vector<std::string>& channel_names) {
  std::vector<std::string> names;
  for (const auto& ch : channel_names) {
    for (const char* stat : {"mean", "std", "min", "max"}) names.push_back(ch + ":" + stat);
  }
  for (const char* stat : {"mean", "std", "min", "max"}) {
    names.push_back(std::string("global:") + stat);
  }
  return names;
}

double logistic_loss(std::span<const double> weights, double bias,
                     const std::vector<std::vector<double>>& rows,
                     std::span<const int> labels, double l2) {
  double loss = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double s = bias;
    for (std::size_t k = 0; k < weights.size(); ++k) s += weights[k] * rows[i][k];
    // log(1 + e^s) - y s, evaluated stably.
    const double softplus = s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
    loss += softplus - labels[i] * s;
  }
  loss /= static_cast<double>(rows.size());
  double reg = 0.0;
  for (double w : weights) reg += w * w;
  return loss + 0.5 * l2 * reg;
}

std::vector<double> logistic_gradient(std::span<const double> weights, double bias,
                                      const std::vector<std::vector<double>>& rows,
                                      std::span<const int> labels, double l2) {
  std::vector<double> g(weights.size() + 1, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double s = bias;
    for (std::size_t k = 0; k < weights.size(); ++k) s += weights[k] * rows[i][k];
    const double r = sigmoid(s) - labels[i];
    for (std::size_t k = 0; k < weights.size(); ++k) g[k] += r * rows[i][k];
    g.back() += r;
  }
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  for (auto& v : g) v *= inv_n;
  for (std::size_t k = 0; k < weights.size(); ++k) g[k] += l2 * weights[k];
  return g;
}

PooledLogisticModel train_pooled_logistic(const Dataset& d, const TrainOptions& opts) {
  const auto train = d.indices(Split::kTrain);
  if (train.empty()) throw DataError("train_pooled_logistic: empty train split");
  std::vector<int> y;
  bool has0 = false, has1 = false;
  for (auto i : train) {
    y.push_back(to_int(d[i].label));
    (y.back() == 1 ? has1 : has0) = true;
  }
  if (!(has0 && has1)) {
    throw DataError("train_pooled_logistic: train split has a single class");
  }

  PooledLogisticModel m;
  m.n_channels = d.n_channels();
  m.n_timesteps = d.n_timesteps();
  m.feature_names = pooled_feature_names(d.channel_names());
  m.l2 = opts.l2;
  const std::size_t nf = m.feature_names.size();

  std::vector<std::vector<double>> raw;
  for (auto i : train) raw.push_back(pooled_features(d[i].series));
  m.feature_mean.assign(nf, 0.0);
  m.feature_scale.assign(nf, 1.0);
  for (std::size_t k = 0; k < nf; ++k) {
    std::vector<double> col;
    for (const auto& r : raw) col.push_back(r[k]);
    m.feature_mean[k] = mean(col);
    const double s = population_std(col);
    m.feature_scale[k] = s > 1e-12 ? s : 1.0;
  }
  std::vector<std::vector<double>> rows;
  for (const auto& r : raw) rows.push_back(standardize(r, m));
  m.weights.assign(nf, 0.0);

  // Validation rows for model selection.
  std::vector<std::vector<double>> val_rows;
  std::vector<int> val_y;
  bool v0 = false, v1 = false;
  for (auto i : d.indices(Split::kValidation)) {
    val_rows.push_back(standardize(pooled_features(d[i].series), m));
    val_y.push_back(to_int(d[i].label));
    (val_y.back() == 1 ? v1 : v0) = true;
  }
  const bool use_val = v0 && v1;

  std::vector<double> best_w = m.weights;
  double best_b = 0.0;
  double best_auc = -1.0;
  std::size_t best_epoch = 0;
  for (std::size_t e = 1; e <= opts.epochs; ++e) {
    const auto g = logistic_gradient(m.weights, m.bias, rows, y, opts.l2);
    for (std::size_t k = 0; k < nf; ++k) m.weights[k] -= opts.lr * g[k];
    m.bias -= opts.lr * g.back();
    if (use_val) {
      std::vector<double> s;
      for (const auto& r : val_rows) s.push_back(score(m, r));
      const double auc = auroc(s, val_y);
      if (auc > best_auc) {
        best_auc = auc;
        best_w = m.weights;
        best_b = m.bias;
        best_epoch = e;
      }
    }
  }
  if (use_val && opts.epochs > 0) {
    m.weights = best_w;
    m.bias = best_b;
    m.selected_epoch = best_epoch;
  } else {
    m.selected_epoch = opts.epochs;
  }
  for (double w : m.weights) {
    if (!std::isfinite(w)) throw DataError("train_pooled_logistic: weights diverged");
  }

  std::uint64_t h = fnv("pooled-logistic");
  for (auto i : train) h = fnv(d[i].sample_id, h);
  h = fnv(std::to_string(opts.epochs) + "/" + std::to_string(opts.lr) + "/" +
              std::to_string(opts.l2) + "/" + std::to_string(opts.seed),
          h);
  m.fingerprint = hex64(h);
  return m;
}

PooledLogisticClassifier::PooledLogisticClassifier(PooledLogisticModel model)
    : model_(std::move(model)) {
  const std::size_t nf = 4 * model_.n_channels + 4;
  if (model_.weights.size() != nf || model_.feature_mean.size() != nf ||
      model_.feature_scale.size() != nf) {
    throw ShapeError("pooled logistic model has inconsistent feature sizes");
  }
}

double PooledLogisticClassifier::classify(const MultivariateSeries& x) const {
  if (x.n_channels() != model_.n_channels || x.n_timesteps() != model_.n_timesteps) {
    throw ShapeError("classifier expects " + std::to_string(model_.n_channels) + "x" +
                     std::to_string(model_.n_timesteps) + " input, got " +
                     std::to_string(x.n_channels()) + "x" +
                     std::to_string(x.n_timesteps()));
  }
  const auto z = standardize(pooled_features(x), model_);
  return clamp_probability(sigmoid(score(model_, z)), model_.clamp_eps);
}

nlohmann::json to_json(const PooledLogisticModel& m) {
  nlohmann::json j;
  j["kind"] = "pooled-logistic";
  j["n_channels"] = m.n_channels;
  j["n_timesteps"] = m.n_timesteps;
  j["feature_names"] = m.feature_names;
  j["feature_mean"] = m.feature_mean;
  j["feature_scale"] = m.feature_scale;
  j["weights"] = m.weights;
  j["bias"] = m.bias;
  j["l2"] = m.l2;
  j["clamp_eps"] = m.clamp_eps;
  j["fingerprint"] = m.fingerprint;
  j["selected_epoch"] = m.selected_epoch;
  return j;
}

PooledLogisticModel pooled_logistic_from_json(const nlohmann::json& j) {
  try {
    PooledLogisticModel m;
    if (j.at("kind").get<std::string>() != "pooled-logistic") {
      throw ConfigError("checkpoint is not a pooled-logistic model");
    }
    m.n_channels = j.at("n_channels").get<std::size_t>();
    m.n_timesteps = j.at("n_timesteps").get<std::size_t>();
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.feature_mean = j.at("feature_mean").get<std::vector<double>>();
    m.feature_scale = j.at("feature_scale").get<std::vector<double>>();
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.l2 = j.at("l2").get<double>();
    m.clamp_eps = j.at("clamp_eps").get<double>();
    m.fingerprint = j.at("fingerprint").get<std::string>();
    m.selected_epoch = j.value("selected_epoch", std::size_t{0});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad pooled-logistic checkpoint: ") + e.what());
  }
}

}  // namespace ccts::classifier
