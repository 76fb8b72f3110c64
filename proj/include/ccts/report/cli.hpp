#pragma once

#include <memory>
#include <string>

#include "ccts/classifier/prob_classifier.hpp"

namespace ccts::report {

inline constexpr const char* kVersion = "ccts 0.1.0";

// Classifier checkpoint written by `train-classifier`:
// {"type": "pooled-logistic", "model": {...}} or {"type": "bayes", "scm": {...}}.
std::unique_ptr<ProbClassifier> load_classifier(const std::string& path);

// Entry point of the `ccts` tool. Returns 0 on success, 1 on usage errors
// (usage text on stderr), 2 on runtime errors.
int cli_main(int argc, const char* const* argv);

}  // namespace ccts::report
