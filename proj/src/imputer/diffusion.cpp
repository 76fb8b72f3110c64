#include "ccts/imputer/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ccts/core/error.hpp"

namespace ccts::imputer {
namespace {

// One corrupted training/validation example in standardized coordinates.
struct Corrupted {
  std::vector<double> state;
  std::vector<std::uint8_t> masked;
  std::vector<std::size_t> flat;     // flat index of each masked position
  std::vector<double> eps;           // aligned to `flat`
  std::vector<std::size_t> columns;  // distinct masked timesteps, ascending
  std::size_t step = 1;
};

std::vector<double> standardized(const DenoiserModel& m, const MultivariateSeries& x) {
  const std::size_t nt = x.n_timesteps();
  std::vector<double> s(x.values().begin(), x.values().end());
  for (std::size_t ch = 0; ch < m.n_channels; ++ch) {
    for (std::size_t t = 0; t < nt; ++t) {
      s[ch * nt + t] = (s[ch * nt + t] - m.channel_mean[ch]) / m.channel_scale[ch];
    }
  }
  return s;
}

void check_shape(const DenoiserModel& m, const LabeledSample& s) {
  if (s.series.n_channels() != m.n_channels || s.series.n_timesteps() != m.n_timesteps) {
    throw ShapeError("sample '" + s.sample_id + "' is " +
                     std::to_string(s.series.n_channels()) + "x" +
                     std::to_string(s.series.n_timesteps()) + ", denoiser expects " +
                     std::to_string(m.n_channels) + "x" +
                     std::to_string(m.n_timesteps));
  }
}

void set_mask(Corrupted& c, const SegmentIndex& idx, std::size_t nt) {
  c.masked.assign(c.state.size(), 0);
  c.flat.clear();
  c.columns.clear();
  for (const auto& p : idx) {
    if (p.timestep >= nt || p.channel * nt + p.timestep >= c.state.size()) {
      throw ShapeError("segment position out of bounds");
    }
    const std::size_t k = p.channel * nt + p.timestep;
    c.masked[k] = 1;
    c.flat.push_back(k);
    c.columns.push_back(p.timestep);
  }
  std::sort(c.columns.begin(), c.columns.end());
  c.columns.erase(std::unique(c.columns.begin(), c.columns.end()), c.columns.end());
}

Corrupted corrupt(const DenoiserModel& m, const DiffusionSchedule& sch,
                  const LabeledSample& s, const SegmentIndex& idx, std::size_t step,
                  RandomStream& rng) {
  Corrupted c;
  c.state = standardized(m, s.series);
  set_mask(c, idx, s.series.n_timesteps());
  c.step = step;
  c.eps.resize(c.flat.size());
  for (std::size_t i = 0; i < c.flat.size(); ++i) {
    c.eps[i] = rng.normal();
    c.state[c.flat[i]] = sch.forward(c.state[c.flat[i]], step, c.eps[i]);
  }
  return c;
}

Corrupted training_example(const DenoiserModel& m, const DiffusionSchedule& sch,
                           const LabeledSample& s, RandomStream& rng) {
  const SegmentIndex idx = sample_training_mask(s, m.mask_mode, rng);
  const std::size_t step = 1 + rng.uniform_index(sch.T());
  return corrupt(m, sch, s, idx, step, rng);
}

// Sum of squared errors over masked positions; accumulates the gradient of
// that sum into `grad` when given.
double example_loss(const DenoiserModel& m, const DiffusionSchedule& sch,
                    const Corrupted& c, DenoiserWorkspace& ws, double* grad) {
  const std::size_t nt = c.state.size() / m.n_channels;
  std::vector<double> target(m.n_channels), dout(m.n_channels);
  std::vector<int> has(m.n_channels);
  // eps lookup by flat index
  std::vector<double> eps_at(c.state.size(), 0.0);
  for (std::size_t i = 0; i < c.flat.size(); ++i) eps_at[c.flat[i]] = c.eps[i];
  const double abar = sch.alpha_bar(c.step);
  double loss = 0;
  for (std::size_t col : c.columns) {
    denoiser_features(m, c.state, c.masked, col, c.step, abar, ws);
    denoiser_forward(m, ws);
    for (std::size_t ch = 0; ch < m.n_channels; ++ch) {
      const std::size_t k = ch * nt + col;
      if (c.masked[k]) {
        const double e = ws.out[ch] - eps_at[k];
        loss += e * e;
        dout[ch] = 2.0 * e;
      } else {
        dout[ch] = 0.0;
      }
    }
    if (grad) denoiser_backward(m, ws, dout, {grad, m.params.size()});
  }
  return loss;
}

double mean_loss(const DenoiserModel& m, const DiffusionSchedule& sch,
                 const std::vector<Corrupted>& cases) {
  DenoiserWorkspace ws;
  ws.resize(m);
  double sum = 0;
  std::size_t n = 0;
  for (const auto& c : cases) {
    sum += example_loss(m, sch, c, ws, nullptr);
    n += c.flat.size();
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

struct Adam {
  std::vector<double> m, v;
  std::size_t t = 0;
  void step(std::vector<double>& params, const std::vector<double>& g, double lr) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    if (m.empty()) {
      m.assign(params.size(), 0.0);
      v.assign(params.size(), 0.0);
    }
    ++t;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = b1 * m[i] + (1 - b1) * g[i];
      v[i] = b2 * v[i] + (1 - b2) * g[i] * g[i];
      params[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
    }
  }
};

}  // namespace

DiffusionSchedule DiffusionSchedule::linear(std::size_t T, double beta0, double beta1) {
  if (T < 1) throw ConfigError("diffusion schedule needs T >= 1");
  if (!(beta0 > 0 && beta0 <= beta1 && beta1 < 1)) {
    throw ConfigError("diffusion schedule needs 0 < beta0 <= beta1 < 1");
  }
  DiffusionSchedule s;
  s.beta0_ = beta0;
  s.beta1_ = beta1;
  s.betas_.resize(T);
  s.alpha_bars_.resize(T);
  double prod = 1.0;
  for (std::size_t i = 0; i < T; ++i) {
    const double frac = T == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(T - 1);
    s.betas_[i] = beta0 + (beta1 - beta0) * frac;
    prod *= 1.0 - s.betas_[i];
    s.alpha_bars_[i] = prod;
  }
  return s;
}

double DiffusionSchedule::posterior_variance(std::size_t t) const {
  if (t <= 1) return 0.0;
  return beta(t) * (1.0 - alpha_bar(t - 1)) / (1.0 - alpha_bar(t));
}

double DiffusionSchedule::forward(double x0, std::size_t t, double eps) const {
  const double ab = alpha_bar(t);
  return std::sqrt(ab) * x0 + std::sqrt(1.0 - ab) * eps;
}

double DiffusionSchedule::reverse(double x_t, double eps_hat, std::size_t t, double z,
                                  double eta) const {
  const double mean =
      (x_t - beta(t) / std::sqrt(1.0 - alpha_bar(t)) * eps_hat) / std::sqrt(alpha(t));
  return mean + eta * std::sqrt(posterior_variance(t)) * z;
}

bool DiffusionSchedule::compatible(const DenoiserModel& m) const {
  return m.schedule_T == T() && m.beta0 == beta0_ && m.beta1 == beta1_;
}

DdpmTrainResult ddpm_train(const Dataset& d, const DiffusionSchedule& schedule,
                           std::optional<ClassLabel> label_filter, MaskMode mode,
                           const DdpmTrainOptions& opts) {
  const auto train_idx = d.indices(Split::kTrain, label_filter);
  if (train_idx.empty()) {
    throw DataError(label_filter ? "no train samples with label " +
                                       std::to_string(to_int(*label_filter))
                                 : "train split is empty");
  }
  if (opts.batch == 0 || opts.checkpoint_every == 0) {
    throw ConfigError("batch and checkpoint interval must be positive");
  }
  const std::size_t nc = d.n_channels();
  const std::size_t nt = d.n_timesteps();

  auto init_rng = rng_stream(opts.seed, "ddpm/init");
  DdpmTrainResult res;
  DenoiserModel& m = res.model;
  m = init_denoiser(nc, nt, opts.radius, opts.hidden, schedule.T(), schedule.beta0(),
                    schedule.beta1(), init_rng);
  m.mask_mode = mode;
  m.label = label_filter;

  for (std::size_t ch = 0; ch < nc; ++ch) {
    double sum = 0, sq = 0;
    for (auto i : train_idx) {
      for (double v : d[i].series.channel(ch)) {
        sum += v;
        sq += v * v;
      }
    }
    const double n = static_cast<double>(train_idx.size() * nt);
    const double mu = sum / n;
    const double sd = std::sqrt(std::max(0.0, sq / n - mu * mu));
    m.channel_mean[ch] = mu;
    m.channel_scale[ch] = sd > 1e-8 ? sd : 1.0;
  }

  auto val_idx = d.indices(Split::kValidation, label_filter);
  if (val_idx.empty()) val_idx = train_idx;
  if (val_idx.size() > opts.validation_samples) val_idx.resize(opts.validation_samples);
  std::vector<Corrupted> val_cases;
  auto val_rng = rng_stream(opts.seed, "ddpm/validation");
  for (auto i : val_idx) val_cases.push_back(training_example(m, schedule, d[i], val_rng));

  auto rng = rng_stream(opts.seed, "ddpm/train");
  DenoiserWorkspace ws;
  ws.resize(m);
  std::vector<double> grad(m.params.size());
  Adam adam;
  std::vector<double> best = m.params;
  double best_loss = std::numeric_limits<double>::infinity();
  res.loss_history.reserve(opts.iters);

  for (std::size_t it = 1; it <= opts.iters; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0;
    std::size_t count = 0;
    for (std::size_t b = 0; b < opts.batch; ++b) {
      const auto& s = d[train_idx[rng.uniform_index(train_idx.size())]];
      const Corrupted c = training_example(m, schedule, s, rng);
      loss += example_loss(m, schedule, c, ws, grad.data());
      count += c.flat.size();
    }
    if (count == 0) continue;
    const double inv = 1.0 / static_cast<double>(count);
    for (auto& g : grad) g *= inv;
    adam.step(m.params, grad, opts.lr);
    res.loss_history.push_back(loss * inv);

    if (it % opts.checkpoint_every == 0 || it == opts.iters) {
      const double v = mean_loss(m, schedule, val_cases);
      res.validation_history.emplace_back(it, v);
      if (v < best_loss) {
        best_loss = v;
        best = m.params;
        m.selected_iter = it;
      }
    }
  }
  if (opts.iters == 0) {
    best_loss = mean_loss(m, schedule, val_cases);
    res.validation_history.emplace_back(0, best_loss);
  }
  m.params = std::move(best);
  m.iterations = opts.iters;
  m.validation_loss = best_loss;
  return res;
}

double denoising_loss(const DenoiserModel& m, const DiffusionSchedule& schedule,
                      const std::vector<LabeledSample>& samples, RandomStream& rng) {
  std::vector<Corrupted> cases;
  for (const auto& s : samples) {
    check_shape(m, s);
    cases.push_back(training_example(m, schedule, s, rng));
  }
  return mean_loss(m, schedule, cases);
}

std::vector<double> ddpm_impute(const DenoiserModel& m,
                                const DiffusionSchedule& schedule,
                                const LabeledSample& sample, const SegmentIndex& idx,
                                RandomStream& rng, double eta,
                                std::size_t terminal_refinements) {
  check_shape(m, sample);
  if (!schedule.compatible(m)) {
    throw ConfigError("diffusion schedule does not match the denoiser's");
  }
  if (idx.empty()) return {};
  const std::size_t nt = m.n_timesteps;
  Corrupted c;
  c.state = standardized(m, sample.series);
  set_mask(c, idx, nt);
  for (std::size_t k : c.flat) c.state[k] = rng.normal();

  DenoiserWorkspace ws;
  ws.resize(m);
  std::vector<double> eps_hat(c.state.size(), 0.0);
  const auto predict = [&](std::size_t t) {
    const double abar = schedule.alpha_bar(t);
    for (std::size_t col : c.columns) {
      denoiser_features(m, c.state, c.masked, col, t, abar, ws);
      denoiser_forward(m, ws);
      for (std::size_t ch = 0; ch < m.n_channels; ++ch) {
        eps_hat[ch * nt + col] = ws.out[ch];
      }
    }
  };
  const std::size_t T = schedule.T();
  const double s_T = std::sqrt(1.0 - schedule.alpha_bar(T));
  for (std::size_t r = 0; r < terminal_refinements; ++r) {
    predict(T);
    // sqrt(abar) * x0_hat = x_T - s_T * eps_hat
    for (std::size_t k : c.flat) c.state[k] += s_T * (rng.normal() - eps_hat[k]);
  }
  for (std::size_t t = T; t >= 1; --t) {
    predict(t);
    for (std::size_t k : c.flat) {
      const double z = t > 1 && eta != 0.0 ? rng.normal() : 0.0;
      c.state[k] = schedule.reverse(c.state[k], eps_hat[k], t, z, eta);
    }
  }
  std::vector<double> out(c.flat.size());
  for (std::size_t i = 0; i < c.flat.size(); ++i) {
    const std::size_t ch = c.flat[i] / nt;
    out[i] = c.state[c.flat[i]] * m.channel_scale[ch] + m.channel_mean[ch];
    if (!std::isfinite(out[i])) throw DataError("diffusion produced a non-finite value");
  }
  return out;
}

std::vector<double> forward_corrupt(const DenoiserModel& m,
                                    const DiffusionSchedule& schedule,
                                    const LabeledSample& sample,
                                    const SegmentIndex& idx, std::size_t t,
                                    RandomStream& rng) {
  check_shape(m, sample);
  const Corrupted c = corrupt(m, schedule, sample, idx, t, rng);
  std::vector<double> out(c.flat.size());
  for (std::size_t i = 0; i < c.flat.size(); ++i) out[i] = c.state[c.flat[i]];
  return out;
}

DiffusionImputer::DiffusionImputer(std::shared_ptr<const DenoiserModel> model,
                                   DiffusionSchedule schedule, double eta)
    : model_(std::move(model)), schedule_(std::move(schedule)), eta_(eta) {
  if (!model_) throw ConfigError("diffusion imputer needs a model");
  if (!schedule_.compatible(*model_)) {
    throw ConfigError("diffusion schedule does not match the denoiser's");
  }
}

}  // namespace ccts::imputer
