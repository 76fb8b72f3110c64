#include "ccts/core/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "ccts/core/error.hpp"
#include "json.hpp"

namespace ccts {
namespace {

using nlohmann::json;

constexpr std::string_view kCsvHeader =
    "sample_id,label,split,channel,timestep,value,concept";
constexpr std::string_view kCsvHeaderNoConcept =
    "sample_id,label,split,channel,timestep,value";

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

long long parse_int(std::string_view s, std::size_t line, const char* what) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError(std::string("invalid ") + what + " '" + std::string(s) + "'",
                     line);
  }
  return v;
}

double parse_real(std::string_view s, std::size_t line) {
  const std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size()) {
    throw ParseError("invalid value '" + tmp + "'", line);
  }
  return v;
}

struct CsvSample {
  std::string id;
  int label = 0;
  Split split = Split::kTrain;
  std::vector<std::string> channels;
  std::unordered_map<std::string, std::size_t> channel_index;
  // (channel, timestep) -> (value, concept)
  std::map<std::pair<std::size_t, long long>, std::pair<double, int>> cells;
  std::size_t first_line = 0;
};

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty file", 1);
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  bool has_concept = false;
  if (line == kCsvHeader) {
    has_concept = true;
  } else if (line != kCsvHeaderNoConcept) {
    throw ParseError("unexpected header '" + line + "'", line_no);
  }
  const std::size_t n_fields = has_concept ? 7 : 6;

  std::vector<CsvSample> samples;
  std::unordered_map<std::string, std::size_t> by_id;
  int max_concept = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != n_fields) {
      throw ParseError("expected " + std::to_string(n_fields) + " fields, got " +
                           std::to_string(f.size()),
                       line_no);
    }
    const std::string id(f[0]);
    if (id.empty()) throw ParseError("empty sample_id", line_no);
    auto [it, inserted] = by_id.try_emplace(id, samples.size());
    if (inserted) {
      CsvSample s;
      s.id = id;
      s.label = static_cast<int>(parse_int(f[1], line_no, "label"));
      try {
        s.split = split_from_string(f[2]);
      } catch (const DataError& e) {
        throw ParseError(e.what(), line_no);
      }
      s.first_line = line_no;
      samples.push_back(std::move(s));
    }
    CsvSample& s = samples[it->second];
    if (parse_int(f[1], line_no, "label") != s.label || f[2] != to_string(s.split)) {
      throw ParseError("label/split changes within sample '" + id + "'", line_no);
    }
    const std::string ch(f[3]);
    auto [cit, cnew] = s.channel_index.try_emplace(ch, s.channels.size());
    if (cnew) s.channels.push_back(ch);
    const long long t = parse_int(f[4], line_no, "timestep");
    if (t < 0) throw ParseError("negative timestep", line_no);
    const double v = parse_real(f[5], line_no);
    int concept_id = 1;
    if (has_concept) {
      concept_id = static_cast<int>(parse_int(f[6], line_no, "concept"));
      if (concept_id < 1) throw ParseError("concept must be >= 1", line_no);
      max_concept = std::max(max_concept, concept_id);
    }
    if (!s.cells.emplace(std::make_pair(cit->second, t), std::make_pair(v, concept_id))
             .second) {
      throw ParseError("duplicate (channel, timestep) in sample '" + id + "'",
                       line_no);
    }
  }

  std::vector<LabeledSample> out;
  std::vector<Split> splits;
  for (auto& s : samples) {
    const std::size_t nc = s.channels.size();
    if (s.cells.size() % nc != 0) {
      throw ShapeError("sample '" + s.id + "': ragged channel lengths");
    }
    const std::size_t nt = s.cells.size() / nc;
    std::vector<double> values(nc * nt);
    std::vector<int> labels(nc * nt);
    for (const auto& [key, cell] : s.cells) {
      const auto [c, t] = key;
      if (static_cast<std::size_t>(t) >= nt) {
        throw ShapeError("sample '" + s.id + "': timesteps are not 0.." +
                         std::to_string(nt - 1) + " on every channel");
      }
      values[c * nt + static_cast<std::size_t>(t)] = cell.first;
      labels[c * nt + static_cast<std::size_t>(t)] = cell.second;
    }
    bool agnostic = true;
    for (std::size_t c = 1; c < nc && agnostic; ++c) {
      for (std::size_t t = 0; t < nt; ++t) {
        if (labels[c * nt + t] != labels[t]) {
          agnostic = false;
          break;
        }
      }
    }
    LabeledSample ls;
    try {
      ls.series = MultivariateSeries(nc, nt, std::move(values), s.channels);
      ls.label = label_from_int(s.label);
    } catch (const Error& e) {
      throw DataError("sample '" + s.id + "': " + e.what());
    }
    ls.mask = agnostic ? ConceptMask::per_timestep(
                             std::vector<int>(labels.begin(), labels.begin() +
                                                  static_cast<std::ptrdiff_t>(nt)),
                             nc, max_concept)
                       : ConceptMask::per_channel(std::move(labels), nc, nt,
                                                  max_concept);
    ls.sample_id = s.id;
    out.push_back(std::move(ls));
    splits.push_back(s.split);
  }
  return Dataset(std::move(out), std::move(splits));
}

LabeledSample sample_from_json(const json& j, std::size_t line_no, Split& split) {
  std::string id;
  try {
    id = j.at("sample_id").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("missing sample_id: ") + e.what(), line_no);
  }
  try {
    split = split_from_string(j.at("split").get<std::string>());
    LabeledSample s;
    s.sample_id = id;
    s.label = label_from_int(j.at("label").get<int>());
    const auto& rows = j.at("values");
    const std::size_t nc = rows.size();
    const std::size_t nt = nc > 0 ? rows.at(0).size() : 0;
    std::vector<double> values;
    values.reserve(nc * nt);
    for (const auto& row : rows) {
      if (row.size() != nt) throw ShapeError("ragged values rows");
      for (const auto& v : row) {
        if (!v.is_number()) throw DataError("non-numeric value (NaN/Inf?)");
        values.push_back(v.get<double>());
      }
    }
    std::vector<std::string> names;
    if (j.contains("channel_names")) names = j["channel_names"].get<std::vector<std::string>>();
    std::optional<double> dt;
    if (j.contains("dt") && !j["dt"].is_null()) dt = j["dt"].get<double>();
    s.series = MultivariateSeries(nc, nt, std::move(values), std::move(names), dt);
    const int n_concepts = j.at("n_concepts").get<int>();
    const auto& m = j.at("mask");
    if (!m.empty() && m.at(0).is_array()) {
      std::vector<int> labels;
      for (const auto& row : m) {
        if (row.size() != nt) throw ShapeError("mask row length differs from series");
        for (const auto& v : row) labels.push_back(v.get<int>());
      }
      if (m.size() != nc) throw ShapeError("mask channel count differs from series");
      s.mask = ConceptMask::per_channel(std::move(labels), nc, nt, n_concepts);
    } else {
      auto labels = m.get<std::vector<int>>();
      if (labels.size() != nt) throw ShapeError("mask length differs from series");
      s.mask = ConceptMask::per_timestep(std::move(labels), nc, n_concepts);
    }
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw ParseError("sample '" + id + "': " + e.what(), line_no);
  } catch (const ShapeError& e) {
    throw ShapeError("sample '" + id + "': " + e.what());
  } catch (const DataError& e) {
    throw DataError("sample '" + id + "': " + e.what());
  }
}

Dataset load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<LabeledSample> samples;
  std::vector<Split> splits;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(e.what(), line_no);
    }
    Split split{};
    samples.push_back(sample_from_json(j, line_no, split));
    splits.push_back(split);
  }
  return Dataset(std::move(samples), std::move(splits));
}

json sample_to_json(const LabeledSample& s, Split split) {
  json j;
  j["sample_id"] = s.sample_id;
  j["label"] = to_int(s.label);
  j["split"] = std::string(to_string(split));
  json rows = json::array();
  for (std::size_t c = 0; c < s.series.n_channels(); ++c) {
    const auto ch = s.series.channel(c);
    rows.push_back(std::vector<double>(ch.begin(), ch.end()));
  }
  j["values"] = std::move(rows);
  if (s.mask.channel_agnostic()) {
    j["mask"] = s.mask.raw_labels();
  } else {
    json m = json::array();
    const auto& raw = s.mask.raw_labels();
    const std::size_t nt = s.mask.n_timesteps();
    for (std::size_t c = 0; c < s.mask.n_channels(); ++c) {
      m.push_back(std::vector<int>(raw.begin() + static_cast<std::ptrdiff_t>(c * nt),
                                   raw.begin() + static_cast<std::ptrdiff_t>((c + 1) * nt)));
    }
    j["mask"] = std::move(m);
  }
  j["n_concepts"] = s.mask.n_concepts();
  j["channel_names"] = s.series.channel_names();
  if (s.series.dt()) j["dt"] = *s.series.dt();
  return j;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

DatasetFormat format_from_string(std::string_view s) {
  if (s == "csv-long" || s == "csv") return DatasetFormat::kCsvLong;
  if (s == "jsonl") return DatasetFormat::kJsonl;
  throw ConfigError("unknown dataset format '" + std::string(s) + "'");
}

DatasetFormat format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? DatasetFormat::kCsvLong
                                    : DatasetFormat::kJsonl;
}

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format) {
  return format == DatasetFormat::kCsvLong ? load_csv(path) : load_jsonl(path);
}

Dataset load_dataset(const std::filesystem::path& path) {
  return load_dataset(path, format_from_path(path));
}

void save_dataset(const Dataset& d, const std::filesystem::path& path,
                  DatasetFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  if (format == DatasetFormat::kJsonl) {
    for (std::size_t i = 0; i < d.size(); ++i) {
      out << sample_to_json(d[i], d.split_of(i)).dump() << '\n';
    }
  } else {
    out << kCsvHeader << '\n';
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto& s = d[i];
      if (s.sample_id.find(',') != std::string::npos) {
        throw DataError("sample_id '" + s.sample_id + "' contains a comma");
      }
      const std::string prefix = s.sample_id + "," + std::to_string(to_int(s.label)) +
                                 "," + std::string(to_string(d.split_of(i))) + ",";
      for (std::size_t c = 0; c < s.series.n_channels(); ++c) {
        const auto& name = s.series.channel_names()[c];
        for (std::size_t t = 0; t < s.series.n_timesteps(); ++t) {
          out << prefix << name << ',' << t << ',' << format_double(s.series.at(c, t))
              << ',' << s.mask.label(c, t) << '\n';
        }
      }
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

void save_dataset(const Dataset& d, const std::filesystem::path& path) {
  save_dataset(d, path, format_from_path(path));
}

}  // namespace ccts
