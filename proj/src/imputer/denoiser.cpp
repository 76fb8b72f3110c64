#include "ccts/imputer/denoiser.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "ccts/core/error.hpp"

namespace ccts::imputer {
namespace {

constexpr std::array<char, 8> kMagic = {'C', 'C', 'T', 'S', 'D', 'D', 'P', 'M'};
constexpr std::uint32_t kVersion = 1;

inline double silu(double a) { return a / (1.0 + std::exp(-a)); }
inline double silu_grad(double a) {
  const double s = 1.0 / (1.0 + std::exp(-a));
  return s * (1.0 + a * (1.0 - s));
}

// Offsets of each block inside the flat parameter vector.
struct Layout {
  std::size_t d, h, c;
  std::size_t w1, b1, w2, b2, w3, b3;
  explicit Layout(const DenoiserModel& m)
      : d(m.input_dim()), h(m.hidden), c(m.n_channels) {
    w1 = 0;
    b1 = w1 + h * d;
    w2 = b1 + h;
    b2 = w2 + h * h;
    w3 = b2 + h;
    b3 = w3 + c * h;
  }
};

// y = W x + b for a row-major W of shape [rows x cols].
void affine(const double* w, const double* b, const double* x, std::size_t rows,
            std::size_t cols, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* wr = w + r * cols;
    double s = b[r];
    for (std::size_t k = 0; k < cols; ++k) s += wr[k] * x[k];
    y[r] = s;
  }
}

// Accumulates dW += dy x^T, db += dy and, when dx is given, dx = W^T dy.
void affine_backward(const double* w, const double* x, const double* dy,
                     std::size_t rows, std::size_t cols, double* dw, double* db,
                     double* dx) {
  if (dx) std::fill(dx, dx + cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const double g = dy[r];
    db[r] += g;
    if (g == 0.0) continue;
    double* dwr = dw + r * cols;
    const double* wr = w + r * cols;
    for (std::size_t k = 0; k < cols; ++k) dwr[k] += g * x[k];
    if (dx) {
      for (std::size_t k = 0; k < cols; ++k) dx[k] += g * wr[k];
    }
  }
}

template <class T>
void put(std::ostream& os, T v) {
  std::uint64_t bits = 0;
  if constexpr (std::is_same_v<T, double>) {
    bits = std::bit_cast<std::uint64_t>(v);
  } else {
    bits = static_cast<std::uint64_t>(v);
  }
  std::array<char, sizeof(T)> buf{};
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  }
  os.write(buf.data(), sizeof(T));
}

template <class T>
T get(std::istream& is, const char* what) {
  std::array<unsigned char, sizeof(T)> buf{};
  if (!is.read(reinterpret_cast<char*>(buf.data()), sizeof(T))) {
    throw ParseError(std::string("truncated checkpoint while reading ") + what, 0);
  }
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  }
  if constexpr (std::is_same_v<T, double>) {
    return std::bit_cast<double>(bits);
  } else {
    return static_cast<T>(bits);
  }
}

}  // namespace

DenoiserModel init_denoiser(std::size_t n_channels, std::size_t n_timesteps,
                            std::size_t radius, std::size_t hidden,
                            std::size_t schedule_T, double beta0, double beta1,
                            RandomStream& rng) {
  if (n_channels == 0 || n_timesteps == 0 || hidden == 0) {
    throw ConfigError("denoiser needs positive channels, timesteps and width");
  }
  DenoiserModel m;
  m.n_channels = n_channels;
  m.n_timesteps = n_timesteps;
  m.radius = radius;
  m.hidden = hidden;
  m.schedule_T = schedule_T;
  m.beta0 = beta0;
  m.beta1 = beta1;
  m.channel_mean.assign(n_channels, 0.0);
  m.channel_scale.assign(n_channels, 1.0);
  m.params.assign(m.param_count(), 0.0);
  const Layout L(m);
  const auto fill = [&](std::size_t off, std::size_t n, double sd) {
    for (std::size_t i = 0; i < n; ++i) m.params[off + i] = rng.normal(0.0, sd);
  };
  fill(L.w1, L.h * L.d, 1.0 / std::sqrt(static_cast<double>(L.d)));
  fill(L.w2, L.h * L.h, 1.0 / std::sqrt(static_cast<double>(L.h)));
  fill(L.w3, L.c * L.h, 0.1 / std::sqrt(static_cast<double>(L.h)));
  return m;
}

void DenoiserWorkspace::resize(const DenoiserModel& m) {
  in.assign(m.input_dim(), 0.0);
  for (auto* v : {&a1, &h1, &a2, &h2, &dh1, &dh2, &da1, &da2}) v->assign(m.hidden, 0.0);
  out.assign(m.n_channels, 0.0);
}

void denoiser_features(const DenoiserModel& m, std::span<const double> state,
                       std::span<const std::uint8_t> masked, std::size_t t_col,
                       std::size_t step, double abar, DenoiserWorkspace& ws) {
  const std::size_t nc = m.n_channels;
  const std::size_t nt = state.size() / nc;
  const double inv_noise = 1.0 / std::sqrt(1.0 - abar);
  // observed values on the scale at which they enter x_t / sqrt(1 - abar)
  const double obs_gain = std::sqrt(abar) * inv_noise;
  const auto r = static_cast<std::ptrdiff_t>(m.radius);
  double* f = ws.in.data();
  for (std::ptrdiff_t off = -r; off <= r; ++off) {
    const std::ptrdiff_t u = static_cast<std::ptrdiff_t>(t_col) + off;
    const bool inside = u >= 0 && u < static_cast<std::ptrdiff_t>(nt);
    for (std::size_t ch = 0; ch < nc; ++ch, f += kFeaturesPerPosition) {
      if (!inside) {
        std::fill(f, f + kFeaturesPerPosition, 0.0);
        continue;
      }
      const std::size_t k = ch * nt + static_cast<std::size_t>(u);
      const double v = state[k];
      const bool mk = masked[k] != 0;
      f[0] = mk ? 0.0 : v;
      f[1] = mk ? v : 0.0;
      f[2] = mk ? v * inv_noise : 0.0;
      f[3] = mk ? 1.0 : 0.0;
      f[4] = 1.0;
      f[5] = mk ? 0.0 : v * obs_gain;
    }
  }
  const double s = static_cast<double>(step);
  for (std::size_t i = 0; i < kStepEmbedding / 2; ++i) {
    const double freq =
        std::pow(10000.0, -static_cast<double>(i) / (kStepEmbedding / 2.0));
    f[2 * i] = std::sin(s * freq);
    f[2 * i + 1] = std::cos(s * freq);
  }
  f += kStepEmbedding;
  f[0] = std::sqrt(abar);
  f[1] = std::sqrt(1.0 - abar);
}

void denoiser_forward(const DenoiserModel& m, DenoiserWorkspace& ws) {
  const Layout L(m);
  const double* p = m.params.data();
  affine(p + L.w1, p + L.b1, ws.in.data(), L.h, L.d, ws.a1.data());
  for (std::size_t i = 0; i < L.h; ++i) ws.h1[i] = silu(ws.a1[i]);
  affine(p + L.w2, p + L.b2, ws.h1.data(), L.h, L.h, ws.a2.data());
  for (std::size_t i = 0; i < L.h; ++i) ws.h2[i] = ws.h1[i] + silu(ws.a2[i]);
  affine(p + L.w3, p + L.b3, ws.h2.data(), L.c, L.h, ws.out.data());
}

void denoiser_backward(const DenoiserModel& m, DenoiserWorkspace& ws,
                       std::span<const double> dout, std::span<double> grad) {
  const Layout L(m);
  const double* p = m.params.data();
  double* g = grad.data();
  affine_backward(p + L.w3, ws.h2.data(), dout.data(), L.c, L.h, g + L.w3, g + L.b3,
                  ws.dh2.data());
  for (std::size_t i = 0; i < L.h; ++i) ws.da2[i] = ws.dh2[i] * silu_grad(ws.a2[i]);
  affine_backward(p + L.w2, ws.h1.data(), ws.da2.data(), L.h, L.h, g + L.w2,
                  g + L.b2, ws.dh1.data());
  for (std::size_t i = 0; i < L.h; ++i) {
    ws.da1[i] = (ws.dh1[i] + ws.dh2[i]) * silu_grad(ws.a1[i]);
  }
  affine_backward(p + L.w1, ws.in.data(), ws.da1.data(), L.h, L.d, g + L.w1,
                  g + L.b1, nullptr);
}

void write_denoiser(const DenoiserModel& m, std::ostream& os) {
  os.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(os, kVersion);
  put<std::uint64_t>(os, m.n_channels);
  put<std::uint64_t>(os, m.n_timesteps);
  put<std::uint64_t>(os, m.radius);
  put<std::uint64_t>(os, m.hidden);
  put<std::uint64_t>(os, kStepEmbedding);
  put<std::uint64_t>(os, kFeaturesPerPosition);
  put<std::uint64_t>(os, m.schedule_T);
  put<double>(os, m.beta0);
  put<double>(os, m.beta1);
  put<std::uint32_t>(os, m.mask_mode == MaskMode::kBlackout ? 1u : 0u);
  put<std::int32_t>(os, m.label ? to_int(*m.label) : -1);
  put<std::uint64_t>(os, m.iterations);
  put<std::uint64_t>(os, m.selected_iter);
  put<double>(os, m.validation_loss);
  for (double v : m.channel_mean) put<double>(os, v);
  for (double v : m.channel_scale) put<double>(os, v);
  put<std::uint64_t>(os, m.params.size());
  for (double v : m.params) put<double>(os, v);
  if (!os) throw IoError("failed writing denoiser checkpoint");
}

DenoiserModel read_denoiser(std::istream& is) {
  std::array<char, 8> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic) {
    throw ParseError("not a denoiser checkpoint (bad magic)", 0);
  }
  const auto version = get<std::uint32_t>(is, "version");
  if (version != kVersion) {
    throw ParseError("unsupported checkpoint version " + std::to_string(version), 0);
  }
  DenoiserModel m;
  m.n_channels = get<std::uint64_t>(is, "n_channels");
  m.n_timesteps = get<std::uint64_t>(is, "n_timesteps");
  m.radius = get<std::uint64_t>(is, "radius");
  m.hidden = get<std::uint64_t>(is, "hidden");
  if (get<std::uint64_t>(is, "embedding") != kStepEmbedding ||
      get<std::uint64_t>(is, "features") != kFeaturesPerPosition) {
    throw ParseError("checkpoint feature layout differs from this build", 0);
  }
  m.schedule_T = get<std::uint64_t>(is, "T");
  m.beta0 = get<double>(is, "beta0");
  m.beta1 = get<double>(is, "beta1");
  const auto mode = get<std::uint32_t>(is, "mask_mode");
  if (mode > 1) throw ParseError("bad mask mode in checkpoint", 0);
  m.mask_mode = mode == 1 ? MaskMode::kBlackout : MaskMode::kConceptRegions;
  const auto label = get<std::int32_t>(is, "label");
  if (label >= 0) m.label = label_from_int(label);
  m.iterations = get<std::uint64_t>(is, "iterations");
  m.selected_iter = get<std::uint64_t>(is, "selected_iter");
  m.validation_loss = get<double>(is, "validation_loss");
  if (m.n_channels == 0 || m.n_channels > 100000 || m.hidden == 0 ||
      m.hidden > 100000 || m.radius > 100000) {
    throw ParseError("implausible checkpoint shape header", 0);
  }
  m.channel_mean.resize(m.n_channels);
  m.channel_scale.resize(m.n_channels);
  for (auto& v : m.channel_mean) v = get<double>(is, "channel_mean");
  for (auto& v : m.channel_scale) v = get<double>(is, "channel_scale");
  const auto n = get<std::uint64_t>(is, "param count");
  if (n != m.param_count()) {
    throw ParseError("checkpoint has " + std::to_string(n) +
                         " parameters, shape header implies " +
                         std::to_string(m.param_count()),
                     0);
  }
  m.params.resize(n);
  for (auto& v : m.params) {
    v = get<double>(is, "parameters");
    if (!std::isfinite(v)) throw ParseError("non-finite checkpoint parameter", 0);
  }
  return m;
}

void save_denoiser(const DenoiserModel& m, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_denoiser(m, os);
}

DenoiserModel load_denoiser(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  return read_denoiser(is);
}

}  // namespace ccts::imputer
