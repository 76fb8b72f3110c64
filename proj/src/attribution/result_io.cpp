#include "ccts/attribution/result_io.hpp"

#include <fstream>

#include "ccts/core/dataset_io.hpp"
#include "ccts/core/error.hpp"

namespace ccts::attribution {

using nlohmann::json;

json to_json(const AttributionResult& r) {
  json j;
  j["kind"] = to_string(r.kind);
  j["target"] = to_int(r.target);
  j["channel_names"] = r.channel_names;
  j["concepts"] = r.concepts;
  j["channel_columns"] = r.has_channel_columns;
  j["config"] = {{"n_imputations", r.config.n_imputations},
                 {"bootstrap_B", r.config.bootstrap_B},
                 {"level", r.config.level},
                 {"prob_clamp", r.config.prob_clamp},
                 {"seed", r.config.seed},
                 {"stderr_resamples", r.config.stderr_resamples}};
  json cells = json::array();
  for (const auto& c : r.cells) {
    json jc;
    jc["concept"] = c.concept_id;
    jc["channel"] = c.channel ? json(*c.channel) : json(nullptr);
    jc["missing"] = c.missing;
    if (c.missing) {
      jc["error"] = c.error;
    } else {
      jc["ate"] = c.ate;
      jc["low"] = c.low;
      jc["high"] = c.high;
      jc["significant"] = c.significant;
    }
    jc["n_used"] = c.n_used;
    jc["n_skipped"] = c.n_skipped;
    json ps = json::array();
    for (const auto& s : c.per_sample) {
      const auto& e = s.estimate;
      ps.push_back({{"sample_id", s.sample_id},
                    {"value", e.value},
                    {"std_error", e.std_error},
                    {"n_imputations", e.n_imputations},
                    {"mean_prob_target", e.mean_prob_target},
                    {"mean_prob_baseline", e.mean_prob_baseline},
                    {"first_term_mode", to_string(e.first_term_mode)}});
    }
    jc["per_sample"] = ps;
    cells.push_back(jc);
  }
  j["cells"] = cells;
  return j;
}

AttributionResult result_from_json(const json& j) {
  try {
    AttributionResult r;
    r.kind = effect_kind_from_string(j.at("kind").get<std::string>());
    r.target = label_from_int(j.at("target").get<int>());
    r.channel_names = j.at("channel_names").get<std::vector<std::string>>();
    r.concepts = j.at("concepts").get<std::vector<int>>();
    r.has_channel_columns = j.at("channel_columns").get<bool>();
    const auto& jc = j.at("config");
    r.config.n_imputations = jc.at("n_imputations").get<std::size_t>();
    r.config.bootstrap_B = jc.at("bootstrap_B").get<std::size_t>();
    r.config.level = jc.at("level").get<double>();
    r.config.prob_clamp = jc.at("prob_clamp").get<double>();
    r.config.seed = jc.at("seed").get<std::uint64_t>();
    r.config.stderr_resamples = jc.at("stderr_resamples").get<std::size_t>();
    for (const auto& c : j.at("cells")) {
      AttributionCell cell;
      cell.concept_id = c.at("concept").get<int>();
      if (!c.at("channel").is_null()) cell.channel = c.at("channel").get<std::size_t>();
      cell.kind = r.kind;
      cell.missing = c.at("missing").get<bool>();
      if (cell.missing) {
        cell.error = c.value("error", std::string());
      } else {
        cell.ate = c.at("ate").get<double>();
        cell.low = c.at("low").get<double>();
        cell.high = c.at("high").get<double>();
        cell.significant = c.at("significant").get<bool>();
      }
      cell.n_used = c.at("n_used").get<std::size_t>();
      cell.n_skipped = c.at("n_skipped").get<std::size_t>();
      for (const auto& s : c.at("per_sample")) {
        SampleEffect se;
        se.sample_id = s.at("sample_id").get<std::string>();
        se.estimate.value = s.at("value").get<double>();
        se.estimate.std_error = s.at("std_error").get<double>();
        se.estimate.n_imputations = s.at("n_imputations").get<std::size_t>();
        se.estimate.mean_prob_target = s.at("mean_prob_target").get<double>();
        se.estimate.mean_prob_baseline = s.at("mean_prob_baseline").get<double>();
        se.estimate.first_term_mode = s.at("first_term_mode").get<std::string>() == "observed"
                                          ? FirstTermMode::kObserved
                                          : FirstTermMode::kImputed;
        cell.per_sample.push_back(std::move(se));
      }
      r.cells.push_back(std::move(cell));
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed attribution result: ") + e.what(), 0);
  }
}

void write_csv(std::ostream& os, const AttributionResult& r) {
  os << "concept,channel,kind,ate,low,high,significant,n_used,n_skipped\n";
  for (const auto& c : r.cells) {
    os << c.concept_id << ',';
    if (c.channel) {
      os << (*c.channel < r.channel_names.size() ? r.channel_names[*c.channel]
                                                 : std::to_string(*c.channel));
    } else {
      os << "global";
    }
    os << ',' << to_string(r.kind) << ',';
    if (c.missing) {
      os << ",,,";
    } else {
      os << format_double(c.ate) << ',' << format_double(c.low) << ','
         << format_double(c.high) << ',' << (c.significant ? "true" : "false");
    }
    os << ',' << c.n_used << ',' << c.n_skipped << '\n';
  }
}

void save_result(const AttributionResult& r, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << to_json(r).dump(2) << '\n';
  if (!os) throw IoError("failed writing '" + path + "'");
}

AttributionResult load_result(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "'");
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ParseError("'" + path + "' is not valid JSON: " + std::string(e.what()), 0);
  }
  return result_from_json(j);
}

}  // namespace ccts::attribution
