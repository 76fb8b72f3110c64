#include "ccts/scm/config.hpp"

#include <cmath>
#include <fstream>

#include "ccts/core/error.hpp"

namespace ccts::scm {
namespace {

using nlohmann::json;

std::vector<double> per_channel(const json& j, const char* key, std::size_t nc,
                                double dflt, int concept_id) {
  if (!j.contains(key)) return std::vector<double>(nc, dflt);
  const auto& v = j.at(key);
  if (v.is_number()) return std::vector<double>(nc, v.get<double>());
  auto out = v.get<std::vector<double>>();
  if (out.size() != nc) {
    throw ConfigError("concept " + std::to_string(concept_id) + ": '" + key +
                      "' needs " + std::to_string(nc) + " entries");
  }
  return out;
}

void check_finite(double v, const std::string& what) {
  if (!std::isfinite(v)) throw ConfigError(what + " must be finite");
}

void check_table(const std::vector<double>& p, std::size_t n, const std::string& what) {
  if (p.size() != n) {
    throw ConfigError(what + " needs one probability per level");
  }
  double s = 0;
  for (double v : p) {
    if (!(v >= 0)) throw ConfigError(what + " has a negative probability");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-12) throw ConfigError(what + " does not sum to 1");
}

}  // namespace

void SCMConfig::validate() const {
  if (n_channels == 0 || n_timesteps == 0) {
    throw ConfigError("n_channels and n_timesteps must be positive");
  }
  if (n_concepts < 1) throw ConfigError("n_concepts must be >= 1");
  if (!channel_names.empty() && channel_names.size() != n_channels) {
    throw ConfigError("channel_names needs n_channels entries");
  }
  if (n_segments() < static_cast<std::size_t>(n_concepts)) {
    throw ConfigError("n_segments must be >= n_concepts");
  }
  if (n_segments() > n_timesteps) throw ConfigError("more segments than timesteps");
  for (double v : {disease.bias, disease.weight}) check_finite(v, "disease parameter");
  for (double s : {disease.sigma_d, disease.sigma_s, mask.jitter, sigma_x}) {
    if (!(s >= 0 && std::isfinite(s))) throw ConfigError("noise scales must be >= 0");
  }
  const auto nc = static_cast<std::size_t>(n_concepts);
  if (family == Family::kLinearGaussian) {
    if (!discrete.empty()) throw ConfigError("config mixes families");
    if (linear.size() != nc) throw ConfigError("one mechanism per concept required");
    for (const auto& c : linear) {
      if (c.a.size() != n_channels || c.b.size() != n_channels ||
          c.sigma.size() != n_channels) {
        throw ConfigError("linear mechanism needs one entry per channel");
      }
      for (std::size_t k = 0; k < n_channels; ++k) {
        check_finite(c.a[k], "a");
        check_finite(c.b[k], "b");
        if (!(c.sigma[k] >= 0 && std::isfinite(c.sigma[k]))) {
          throw ConfigError("sigma must be >= 0");
        }
      }
    }
  } else {
    if (!linear.empty()) throw ConfigError("config mixes families");
    if (discrete.size() != nc) throw ConfigError("one mechanism per concept required");
    if (sigma_x != 0.0) throw ConfigError("sigma_x must be 0 for the discrete family");
    for (std::size_t c = 0; c < nc; ++c) {
      const auto& m = discrete[c];
      const std::string what = "concept " + std::to_string(c + 1);
      if (m.levels.empty()) throw ConfigError(what + ": no levels");
      for (const auto& lv : m.levels) {
        if (lv.size() != n_channels) {
          throw ConfigError(what + ": each level needs one value per channel");
        }
        for (double v : lv) check_finite(v, what + " level value");
      }
      check_table(m.p_d0, m.levels.size(), what + " p_d0");
      check_table(m.p_d1, m.levels.size(), what + " p_d1");
    }
  }
}

SCMConfig config_from_json(const json& j) {
  SCMConfig cfg;
  try {
    cfg.n_channels = j.value("n_channels", cfg.n_channels);
    cfg.n_timesteps = j.value("n_timesteps", cfg.n_timesteps);
    cfg.n_concepts = j.value("n_concepts", cfg.n_concepts);
    if (j.contains("channel_names")) {
      cfg.channel_names = j.at("channel_names").get<std::vector<std::string>>();
    }
    if (j.contains("disease")) {
      const auto& d = j.at("disease");
      cfg.disease.bias = d.value("bias", cfg.disease.bias);
      cfg.disease.weight = d.value("weight", cfg.disease.weight);
      cfg.disease.sigma_d = d.value("sigma_d", cfg.disease.sigma_d);
      cfg.disease.sigma_s = d.value("sigma_s", cfg.disease.sigma_s);
    }
    if (j.contains("mask")) {
      const auto& m = j.at("mask");
      cfg.mask.n_segments = m.value("n_segments", cfg.mask.n_segments);
      cfg.mask.jitter = m.value("jitter", cfg.mask.jitter);
    }
    const std::string fam = j.value("family", std::string("linear-gaussian"));
    if (fam == "linear-gaussian") {
      cfg.family = Family::kLinearGaussian;
    } else if (fam == "discrete") {
      cfg.family = Family::kDiscrete;
    } else {
      throw ConfigError("unknown family '" + fam + "'");
    }
    cfg.sigma_x = j.value("sigma_x", 0.0);
    if (!j.contains("concepts") || !j.at("concepts").is_array()) {
      throw ConfigError("'concepts' array is required");
    }
    int id = 0;
    for (const auto& c : j.at("concepts")) {
      ++id;
      if (cfg.family == Family::kLinearGaussian) {
        if (c.contains("levels")) throw ConfigError("config mixes families");
        LinearConcept lc;
        lc.a = per_channel(c, "a", cfg.n_channels, 0.0, id);
        lc.b = per_channel(c, "b", cfg.n_channels, 0.0, id);
        lc.sigma = per_channel(c, "sigma", cfg.n_channels, 1.0, id);
        cfg.linear.push_back(std::move(lc));
      } else {
        if (c.contains("a") || c.contains("b")) {
          throw ConfigError("config mixes families");
        }
        DiscreteConcept dc;
        for (const auto& lv : c.at("levels")) {
          if (lv.is_number()) {
            dc.levels.emplace_back(cfg.n_channels, lv.get<double>());
          } else {
            dc.levels.push_back(lv.get<std::vector<double>>());
          }
        }
        dc.p_d0 = c.at("p_d0").get<std::vector<double>>();
        dc.p_d1 = c.at("p_d1").get<std::vector<double>>();
        cfg.discrete.push_back(std::move(dc));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid SCM config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

json to_json(const SCMConfig& cfg) {
  json j;
  j["n_channels"] = cfg.n_channels;
  j["n_timesteps"] = cfg.n_timesteps;
  j["n_concepts"] = cfg.n_concepts;
  if (!cfg.channel_names.empty()) j["channel_names"] = cfg.channel_names;
  j["disease"] = {{"bias", cfg.disease.bias},
                  {"weight", cfg.disease.weight},
                  {"sigma_d", cfg.disease.sigma_d},
                  {"sigma_s", cfg.disease.sigma_s}};
  j["mask"] = {{"n_segments", cfg.n_segments()}, {"jitter", cfg.mask.jitter}};
  j["sigma_x"] = cfg.sigma_x;
  json concepts = json::array();
  if (cfg.family == Family::kLinearGaussian) {
    j["family"] = "linear-gaussian";
    for (const auto& c : cfg.linear) {
      concepts.push_back({{"a", c.a}, {"b", c.b}, {"sigma", c.sigma}});
    }
  } else {
    j["family"] = "discrete";
    for (const auto& c : cfg.discrete) {
      concepts.push_back({{"levels", c.levels}, {"p_d0", c.p_d0}, {"p_d1", c.p_d1}});
    }
  }
  j["concepts"] = concepts;
  return j;
}

SCMConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open SCM config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

ConceptMask canonical_mask(const SCMConfig& cfg) {
  const std::size_t nt = cfg.n_timesteps;
  const std::size_t ns = cfg.n_segments();
  std::vector<int> labels(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const std::size_t seg = t * ns / nt;
    labels[t] = static_cast<int>(seg % static_cast<std::size_t>(cfg.n_concepts)) + 1;
  }
  return ConceptMask::per_timestep(std::move(labels), cfg.n_channels, cfg.n_concepts);
}

}  // namespace ccts::scm
