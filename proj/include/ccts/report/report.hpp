#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ccts/attribution/matrix.hpp"

namespace ccts::report {

struct DiagnosticRow {
  std::string sample_id;
  int concept_id = 0;
  double value = 0;  // log2(mean f over D*-imputed hybrids) - log2 f(X)
};

// Monte-Carlo estimate next to its exact value for one (sample, concept).
struct OracleRow {
  int concept_id = 0;
  std::string sample_id;
  attribution::EffectKind kind = attribution::EffectKind::kCausal;
  double estimate = 0;
  double std_error = 0;
  double oracle = 0;
};

struct SignAgreement {
  std::size_t n_cells = 0;
  double all_cells = 0;  // fraction of comparable cells with equal sign (0 counts as a sign)
  std::size_t n_nonzero = 0;
  std::optional<double> nonzero_cells;  // same, over cells nonzero in both grids
};

// Throws DataError unless both results cover the same grid.
SignAgreement sign_agreement(const attribution::AttributionResult& a,
                             const attribution::AttributionResult& b);

nlohmann::json diagnostics_summary(const std::vector<DiagnosticRow>& rows);

// Writes causal.csv, associational.csv, causal.svg, associational.svg (one
// colour range for the pair), summary.json and, when rows are given,
// oracle.csv into `dir`. Throws DataError on a grid mismatch.
void emit_report(const attribution::AttributionResult& causal,
                 const attribution::AttributionResult& assoc,
                 const std::vector<DiagnosticRow>& diagnostics, const std::string& dir,
                 const std::vector<OracleRow>& oracle = {});

}  // namespace ccts::report
