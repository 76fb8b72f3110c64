#include "ccts/report/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "ccts/attribution/result_io.hpp"
#include "ccts/core/dataset_io.hpp"
#include "ccts/core/error.hpp"
#include "ccts/core/stats.hpp"
#include "ccts/report/heatmap.hpp"

namespace ccts::report {
namespace {

using attribution::AttributionResult;
using nlohmann::json;

int sign(double v) { return (v > 0) - (v < 0); }

void check_grid(const AttributionResult& a, const AttributionResult& b) {
  if (a.concepts != b.concepts || a.channel_names != b.channel_names ||
      a.has_channel_columns != b.has_channel_columns || a.cells.size() != b.cells.size()) {
    throw DataError("causal and associational results cover different grids");
  }
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    if (a.cells[i].concept_id != b.cells[i].concept_id ||
        a.cells[i].channel != b.cells[i].channel) {
      throw DataError("causal and associational results cover different grids");
    }
  }
}

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw IoError("cannot open '" + p.string() + "' for writing");
  os << s;
  if (!os) throw IoError("failed writing '" + p.string() + "'");
}

json stats_of(std::vector<double> v) {
  if (v.empty()) return {{"n", 0}};
  double mean_abs = 0;
  for (double x : v) mean_abs += std::abs(x);
  mean_abs /= static_cast<double>(v.size());
  return {{"n", v.size()},
          {"mean", mean(v)},
          {"mean_abs", mean_abs},
          {"min", *std::min_element(v.begin(), v.end())},
          {"q05", quantile(v, 0.05)},
          {"median", median(v)},
          {"q95", quantile(v, 0.95)},
          {"max", *std::max_element(v.begin(), v.end())}};
}

}  // namespace

SignAgreement sign_agreement(const AttributionResult& a, const AttributionResult& b) {
  check_grid(a, b);
  SignAgreement s;
  std::size_t agree = 0, agree_nz = 0;
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    const auto& x = a.cells[i];
    const auto& y = b.cells[i];
    if (x.missing || y.missing) continue;
    ++s.n_cells;
    agree += sign(x.ate) == sign(y.ate);
    if (x.ate != 0 && y.ate != 0) {
      ++s.n_nonzero;
      agree_nz += sign(x.ate) == sign(y.ate);
    }
  }
  s.all_cells = s.n_cells ? static_cast<double>(agree) / static_cast<double>(s.n_cells) : 0.0;
  if (s.n_nonzero) {
    s.nonzero_cells = static_cast<double>(agree_nz) / static_cast<double>(s.n_nonzero);
  }
  return s;
}

json diagnostics_summary(const std::vector<DiagnosticRow>& rows) {
  std::vector<double> all;
  std::map<int, std::vector<double>> by_concept;
  for (const auto& r : rows) {
    all.push_back(r.value);
    by_concept[r.concept_id].push_back(r.value);
  }
  json j = stats_of(all);
  json per = json::array();
  for (auto& [c, v] : by_concept) {
    json e = stats_of(std::move(v));
    e["concept"] = c;
    per.push_back(e);
  }
  j["per_concept"] = per;
  return j;
}

void emit_report(const AttributionResult& causal, const AttributionResult& assoc,
                 const std::vector<DiagnosticRow>& diagnostics, const std::string& dir,
                 const std::vector<OracleRow>& oracle) {
  check_grid(causal, assoc);
  const std::filesystem::path out(dir);
  std::filesystem::create_directories(out);

  double range = 0;
  for (const auto* r : {&causal, &assoc}) {
    for (const auto& c : r->cells) {
      if (!c.missing) range = std::max(range, std::abs(c.ate));
    }
  }
  for (const auto* r : {&causal, &assoc}) {
    const std::string stem(attribution::to_string(r->kind));
    std::ostringstream csv;
    attribution::write_csv(csv, *r);
    write_text(out / (stem + ".csv"), csv.str());
    write_text(out / (stem + ".svg"), heatmap_svg(*r, stem + " effects (bits)", range));
  }

  json summary;
  const auto sa = sign_agreement(causal, assoc);
  summary["sign_agreement"] = {
      {"n_cells", sa.n_cells},
      {"all_cells", sa.all_cells},
      {"n_nonzero", sa.n_nonzero},
      {"nonzero_cells", sa.nonzero_cells ? json(*sa.nonzero_cells) : json(nullptr)}};
  summary["color_range"] = range;
  for (const auto* r : {&causal, &assoc}) {
    json sig = json::array();
    for (const auto& c : r->cells) {
      if (!c.missing && c.significant) {
        sig.push_back({{"concept", c.concept_id},
                       {"channel", c.channel ? json(r->channel_names[*c.channel])
                                             : json("global")},
                       {"ate", c.ate}});
      }
    }
    summary["significant"][std::string(attribution::to_string(r->kind))] = sig;
  }
  summary["first_term_diagnostics"] = diagnostics_summary(diagnostics);

  if (!oracle.empty()) {
    std::ostringstream csv;
    csv << "concept,sample_id,kind,estimate,std_error,oracle,error\n";
    std::size_t within = 0;
    double max_err = 0;
    for (const auto& r : oracle) {
      const double err = r.estimate - r.oracle;
      max_err = std::max(max_err, std::abs(err));
      within += std::abs(err) <= 4 * r.std_error;
      csv << r.concept_id << ',' << r.sample_id << ',' << attribution::to_string(r.kind) << ','
          << format_double(r.estimate) << ',' << format_double(r.std_error) << ','
          << format_double(r.oracle) << ',' << format_double(err) << '\n';
    }
    write_text(out / "oracle.csv", csv.str());
    summary["oracle"] = {
        {"n", oracle.size()},
        {"within_4_stderr", static_cast<double>(within) / static_cast<double>(oracle.size())},
        {"max_abs_error", max_err}};
  }
  write_text(out / "summary.json", summary.dump(2) + "\n");
}

}  // namespace ccts::report
