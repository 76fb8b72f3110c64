#include "ccts/report/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"

#include "ccts/attribution/result_io.hpp"
#include "ccts/classifier/metrics.hpp"
#include "ccts/classifier/pooled_logistic.hpp"
#include "ccts/core/dataset_io.hpp"
#include "ccts/core/error.hpp"
#include "ccts/core/parallel.hpp"
#include "ccts/discovery/concept_stats.hpp"
#include "ccts/discovery/kmeans.hpp"
#include "ccts/discovery/validate.hpp"
#include "ccts/imputer/diffusion.hpp"
#include "ccts/imputer/donor.hpp"
#include "ccts/report/manifest.hpp"
#include "ccts/report/report.hpp"
#include "ccts/scm/bayes.hpp"
#include "ccts/scm/generator.hpp"
#include "ccts/scm/imputers.hpp"
#include "ccts/scm/oracle.hpp"

namespace ccts::report {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string> kCommands = {"synth",         "discover",      "validate",
                                            "train-classifier", "train-imputer", "attribute",
                                            "report"};

// Options whose values are file system paths: the manifest records the
// content hash of what they point at, never the path itself.
const std::set<std::string> kPathOptions = {"--config", "--data",    "--scm",
                                            "--classifier", "--imputer-dir", "--results"};

json nan_to_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_json(const fs::path& p, const json& j) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw IoError("cannot open '" + p.string() + "' for writing");
  os << j.dump(2) << '\n';
}

json read_json(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw IoError("cannot open '" + p.string() + "'");
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw ParseError("'" + p.string() + "': " + e.what(), 0);
  }
}

// Content digest of a file, or of every file under a directory.
std::string input_digest(const fs::path& p) {
  if (!fs::is_directory(p)) return sha256_file(p);
  std::vector<std::string> lines;
  for (const auto& e : fs::recursive_directory_iterator(p)) {
    if (e.is_regular_file()) {
      lines.push_back(fs::relative(e.path(), p).generic_string() + ":" +
                      sha256_file(e.path()));
    }
  }
  std::sort(lines.begin(), lines.end());
  std::string all;
  for (const auto& l : lines) all += l + "\n";
  return sha256_hex(all);
}

json run_meta(const CLI::App& sub, std::uint64_t seed, const std::string& config) {
  json meta;
  meta["command"] = sub.get_name();
  meta["version"] = kVersion;
  meta["seed"] = seed;
  json options = json::object();
  json inputs = json::object();
  if (!config.empty()) inputs["--config"] = input_digest(config);
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_name();
    if (name.rfind("--", 0) != 0 || name == "--help") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      for (std::size_t i = 0; i < res.size(); ++i) value += (i ? " " : "") + res[i];
    } else {
      value = opt->get_default_str();
    }
    if (kPathOptions.count(name)) {
      if (!value.empty()) inputs[name] = input_digest(value);
    } else {
      options[name] = value;
    }
  }
  meta["options"] = options;
  meta["inputs"] = inputs;
  return meta;
}

std::optional<ClassLabel> parse_label(const std::string& s) {
  if (s == "all") return std::nullopt;
  if (s == "0" || s == "1") return label_from_int(s == "1");
  throw ConfigError("label must be 0, 1 or all, got '" + s + "'");
}

std::string checkpoint_name(std::optional<ClassLabel> l) {
  return "imputer_" + (l ? std::to_string(to_int(*l)) : std::string("all")) + ".ddpm";
}

json auroc_metrics(const Dataset& d, const ProbClassifier& f, std::uint64_t seed) {
  const auto idx = d.indices(Split::kTest);
  std::vector<double> scores;
  std::vector<int> labels;
  for (auto i : idx) {
    scores.push_back(f.classify(d[i].series));
    labels.push_back(to_int(d[i].label));
  }
  const bool both = std::count(labels.begin(), labels.end(), 1) > 0 &&
                    std::count(labels.begin(), labels.end(), 0) > 0;
  if (!both) return {{"test_auroc", nullptr}};
  const auto ci = classifier::bootstrap_metric(scores, labels, 1000, 0.95, seed);
  return {{"test_auroc", ci.point}, {"low", ci.low}, {"high", ci.high},
          {"n_test", idx.size()}};
}

// ---------------------------------------------------------------- commands

struct Globals {
  std::uint64_t seed = 0;
  std::string config;
  std::string out;
};

void cmd_synth(const Globals& g, std::size_t n, const std::string& format) {
  if (g.config.empty()) throw ConfigError("synth needs --config <scm.json>");
  const auto cfg = scm::load_config(g.config);
  const auto d = scm::generate_dataset(cfg, n, g.seed);
  const auto fmt = format_from_string(format);
  save_dataset(d, fs::path(g.out) / (fmt == DatasetFormat::kCsvLong ? "dataset.csv"
                                                                      : "dataset.jsonl"),
               fmt);
  write_json(fs::path(g.out) / "scm.json", scm::to_json(cfg));
}

struct DiscoverArgs {
  std::string data;
  std::size_t k = 0, k_min = 2, k_max = 8, restarts = 10;
  bool pooled = false;
};

void cmd_discover(const Globals& g, const DiscoverArgs& a) {
  const auto d = load_dataset(a.data);
  discovery::KMeansOptions ko;
  ko.n_restarts = a.restarts;
  json clusters;
  std::size_t k = a.k;
  if (k == 0) {
    const auto e = discovery::elbow_select(d, a.k_min, a.k_max, g.seed, ko);
    k = e.k_star;
    json scores = json::array();
    for (double s : e.scores) scores.push_back(nan_to_null(s));
    clusters["elbow"] = {{"ks", e.ks}, {"inertias", e.inertias}, {"scores", scores},
                         {"k_star", e.k_star}, {"warning", e.warning}};
    if (e.warning) std::cerr << "warning: no clear elbow; using k = " << k << "\n";
  }
  const auto model = discovery::kmeans_fit(d, k, g.seed, ko);
  clusters["k"] = model.k;
  clusters["dim"] = model.dim;
  clusters["centroids"] = model.centroids;
  clusters["inertia"] = model.inertia;
  clusters["iterations"] = model.iterations;
  write_json(fs::path(g.out) / "clusters.json", clusters);

  const auto assigned = discovery::assign_concepts(model, d);
  save_dataset(assigned, fs::path(g.out) / "dataset.jsonl", DatasetFormat::kJsonl);
  std::vector<discovery::ConceptStatsRow> rows;
  for (const auto& s : assigned.samples()) {
    auto r = discovery::concept_stats(s, !a.pooled);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  std::ofstream os(fs::path(g.out) / "concept_stats.csv", std::ios::binary);
  discovery::write_concept_stats_csv(os, rows, assigned.channel_names());
}

void cmd_validate(const Globals& g, const std::string& data,
                  const discovery::StumpsOptions& so, std::size_t B) {
  const auto d = load_dataset(data);
  const auto v = discovery::validate_concepts(d, g.seed, so, B);
  const json j = {{"auroc", v.auroc.point}, {"low", v.auroc.low}, {"high", v.auroc.high},
                  {"n_train", v.n_train},   {"n_test", v.n_test}, {"n_features", v.n_features}};
  write_json(fs::path(g.out) / "validation.json", j);
  std::cout << "concept AUROC " << format_double(v.auroc.point) << " ["
            << format_double(v.auroc.low) << ", " << format_double(v.auroc.high) << "]\n";
}

struct ClassifierArgs {
  std::string data, model = "pooled-logistic", scm;
  classifier::TrainOptions train;
};

void cmd_train_classifier(const Globals& g, ClassifierArgs a) {
  json ckpt;
  std::unique_ptr<ProbClassifier> f;
  if (a.model == "bayes") {
    if (a.scm.empty()) throw ConfigError("--model bayes needs --scm <scm.json>");
    const auto cfg = scm::load_config(a.scm);
    ckpt = {{"type", "bayes"}, {"scm", scm::to_json(cfg)}};
    f = scm::bayes_classifier(scm::make_ground_truth(cfg));
  } else if (a.model == "pooled-logistic") {
    if (a.data.empty()) throw ConfigError("--model pooled-logistic needs --data");
    a.train.seed = g.seed;
    auto m = classifier::train_pooled_logistic(load_dataset(a.data), a.train);
    ckpt = {{"type", "pooled-logistic"}, {"model", classifier::to_json(m)}};
    f = std::make_unique<classifier::PooledLogisticClassifier>(std::move(m));
  } else {
    throw ConfigError("unknown classifier '" + a.model + "'");
  }
  if (!a.data.empty()) ckpt["metrics"] = auroc_metrics(load_dataset(a.data), *f, g.seed);
  write_json(fs::path(g.out) / "classifier.json", ckpt);
}

struct ImputerArgs {
  std::string data;
  std::vector<std::string> labels = {"0", "1", "all"};
  std::string mask_mode = "blackout";
  imputer::DdpmTrainOptions train;
};

void cmd_train_imputer(const Globals& g, ImputerArgs a) {
  const auto d = load_dataset(a.data);
  const auto mode = imputer::mask_mode_from_string(a.mask_mode);
  const auto schedule = imputer::DiffusionSchedule::linear();
  a.train.seed = g.seed;
  for (const auto& ls : a.labels) {
    const auto label = parse_label(ls);
    const auto res = imputer::ddpm_train(d, schedule, label, mode, a.train);
    imputer::save_denoiser(res.model, (fs::path(g.out) / checkpoint_name(label)).string());
    json hist = json::array();
    for (const auto& [it, loss] : res.validation_history) hist.push_back({it, loss});
    write_json(fs::path(g.out) / ("training_" + ls + ".json"),
               {{"label", ls},
                {"mask_mode", imputer::to_string(mode)},
                {"iterations", res.model.iterations},
                {"selected_iter", res.model.selected_iter},
                {"validation_loss", res.model.validation_loss},
                {"validation_history", hist}});
  }
}

struct AttributeArgs {
  std::string data, classifier, imputer = "ddpm", imputer_dir, scm;
  attribution::EngineConfig engine;
  int target = 1;
  bool no_channels = false;
  std::vector<int> concepts;
};

void cmd_attribute(const Globals& g, AttributeArgs a) {
  const auto d = load_dataset(a.data);
  const auto f = load_classifier(a.classifier);
  const ClassLabel target = label_from_int(a.target);
  a.engine.seed = g.seed;
  a.engine.validate();

  std::vector<std::unique_ptr<SegmentImputer>> owned;
  if (a.imputer == "ddpm") {
    if (a.imputer_dir.empty()) throw ConfigError("--imputer ddpm needs --imputer-dir");
    const auto schedule = imputer::DiffusionSchedule::linear();
    for (std::optional<ClassLabel> l :
         {std::optional(target), std::optional(other(target)), std::optional<ClassLabel>()}) {
      const fs::path p = fs::path(a.imputer_dir) / checkpoint_name(l);
      if (!fs::exists(p)) {
        throw IoError("missing imputer checkpoint '" + p.string() +
                      "' (run train-imputer first)");
      }
      auto m = std::make_shared<const imputer::DenoiserModel>(
          imputer::load_denoiser(p.string()));
      if (m->label != l) throw DataError("checkpoint '" + p.string() + "' has the wrong label");
      owned.push_back(std::make_unique<imputer::DiffusionImputer>(m, schedule));
    }
  } else if (a.imputer == "donor") {
    for (std::optional<ClassLabel> l :
         {std::optional(target), std::optional(other(target)), std::optional<ClassLabel>()}) {
      owned.push_back(std::make_unique<imputer::DonorImputer>(imputer::donor_fit(d, l)));
    }
  } else if (a.imputer == "scm") {
    if (a.scm.empty()) throw ConfigError("--imputer scm needs --scm <scm.json>");
    const auto gt = scm::make_ground_truth(scm::load_config(a.scm));
    owned.push_back(std::make_unique<scm::InterventionalImputer>(gt, target));
    owned.push_back(std::make_unique<scm::InterventionalImputer>(gt, other(target)));
    owned.push_back(std::make_unique<scm::ConditionalImputer>(gt));
  } else {
    throw ConfigError("unknown imputer '" + a.imputer + "'");
  }
  const attribution::ImputerSet set{owned[0].get(), owned[1].get(), owned[2].get()};

  attribution::MatrixOptions mo;
  mo.target = target;
  mo.channel_columns = !a.no_channels;
  if (mo.channel_columns &&
      !std::all_of(owned.begin(), owned.end(), [](const auto& p) { return p->blackout_capable(); })) {
    std::cerr << "warning: imputers were not trained for blackout masks; "
                 "writing the global column only\n";
    mo.channel_columns = false;
  }
  auto concepts = a.concepts;
  if (concepts.empty()) {
    for (int c = 1; c <= d.n_concepts(); ++c) concepts.push_back(c);
  }

  const fs::path out(g.out);
  for (auto kind : {attribution::EffectKind::kCausal, attribution::EffectKind::kAssociational}) {
    mo.kind = kind;
    const auto r = attribution::effect_matrix(d, *f, set, concepts, a.engine, mo);
    attribution::save_result(r, (out / (std::string(attribution::to_string(kind)) + ".json")).string());
  }

  // First-term diagnostic on the same draws the causal global column used.
  const auto idx = d.indices(Split::kTest, target);
  std::vector<std::optional<double>> values(idx.size() * concepts.size());
  parallel_for(values.size(), [&](std::size_t k) {
    const auto& s = d[idx[k % idx.size()]];
    const int c = concepts[k / idx.size()];
    const auto rng = rng_stream(a.engine.seed, "effect/" + s.sample_id + "/" +
                                                   std::to_string(c) + "/global/causal");
    values[k] = attribution::first_term_diagnostic(s, *f, c, *set.target, a.engine, rng);
  });
  json rows = json::array();
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!values[k]) continue;
    rows.push_back({{"sample_id", d[idx[k % idx.size()]].sample_id},
                    {"concept", concepts[k / idx.size()]},
                    {"value", *values[k]}});
  }
  write_json(out / "diagnostics.json", {{"rows", rows}});
}

struct ReportArgs {
  std::string results, scm, data, classifier;
  std::size_t oracle_samples = 5;
  double oracle_tol = 1e-8;
};

std::vector<OracleRow> oracle_rows(const ReportArgs& a, const attribution::AttributionResult& causal,
                                   const attribution::AttributionResult& assoc) {
  const auto gt = scm::make_ground_truth(scm::load_config(a.scm));
  const auto d = load_dataset(a.data);
  const auto f = load_classifier(a.classifier);
  std::map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < d.size(); ++i) by_id[d[i].sample_id] = i;

  // One oracle evaluation per (concept, sample) serves both kinds.
  std::vector<std::pair<int, std::string>> keys;
  for (int c : causal.concepts) {
    std::set<std::string> ids;
    for (const auto* r : {&causal, &assoc}) {
      const auto& cell = r->cell(c, std::nullopt);
      const std::size_t n = std::min(a.oracle_samples, cell.per_sample.size());
      for (std::size_t i = 0; i < n; ++i) ids.insert(cell.per_sample[i].sample_id);
    }
    for (const auto& id : ids) keys.emplace_back(c, id);
  }
  IntegrationOptions opts;
  opts.rel_tol = a.oracle_tol;
  opts.abs_tol = a.oracle_tol * 1e-3;
  std::vector<scm::OracleEffects> exact(keys.size());
  parallel_for(keys.size(), [&](std::size_t k) {
    const auto it = by_id.find(keys[k].second);
    if (it == by_id.end()) throw DataError("sample '" + keys[k].second + "' not in --data");
    exact[k] = scm::brute_force_effects(gt, d[it->second], *f, keys[k].first, causal.target,
                                        std::nullopt, opts, causal.config.prob_clamp);
  });

  std::vector<OracleRow> rows;
  for (const auto* r : {&causal, &assoc}) {
    const bool causal_kind = r->kind == attribution::EffectKind::kCausal;
    for (int c : r->concepts) {
      const auto& cell = r->cell(c, std::nullopt);
      const std::size_t n = std::min(a.oracle_samples, cell.per_sample.size());
      for (std::size_t i = 0; i < n; ++i) {
        const auto& e = cell.per_sample[i];
        const auto k = static_cast<std::size_t>(
            std::find(keys.begin(), keys.end(), std::make_pair(c, e.sample_id)) - keys.begin());
        rows.push_back({c, e.sample_id, r->kind, e.estimate.value, e.estimate.std_error,
                        causal_kind ? exact[k].ite : exact[k].iaa});
      }
    }
  }
  return rows;
}

void cmd_report(const Globals& g, const ReportArgs& a) {
  const fs::path in(a.results);
  const auto causal = attribution::load_result((in / "causal.json").string());
  const auto assoc = attribution::load_result((in / "associational.json").string());
  std::vector<DiagnosticRow> diag;
  if (fs::exists(in / "diagnostics.json")) {
    const json j = read_json(in / "diagnostics.json");
    for (const auto& r : j.at("rows")) {
      diag.push_back({r.at("sample_id").get<std::string>(), r.at("concept").get<int>(),
                      r.at("value").get<double>()});
    }
  }
  std::vector<OracleRow> oracle;
  if (!a.scm.empty()) {
    if (a.data.empty() || a.classifier.empty()) {
      throw ConfigError("the oracle table needs --scm, --data and --classifier");
    }
    oracle = oracle_rows(a, causal, assoc);
  }
  emit_report(causal, assoc, diag, g.out, oracle);
}

// JSON config for non-synth commands: {"option-name": value, ...}, turned
// into flags placed before the command line's own so the latter win.
std::vector<std::string> config_tokens(const std::string& path) {
  const json j = read_json(path);
  if (!j.is_object()) throw ConfigError("--config must hold a JSON object");
  std::vector<std::string> out;
  auto scalar = [](const json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
  };
  for (const auto& [k, v] : j.items()) {
    const std::string flag = "--" + k;
    if (v.is_boolean()) {
      if (v.get<bool>()) out.push_back(flag);
    } else if (v.is_array()) {
      out.push_back(flag);
      for (const auto& e : v) out.push_back(scalar(e));
    } else {
      out.push_back(flag);
      out.push_back(scalar(v));
    }
  }
  return out;
}

}  // namespace

std::unique_ptr<ProbClassifier> load_classifier(const std::string& path) {
  const json j = read_json(path);
  try {
    const auto type = j.at("type").get<std::string>();
    if (type == "bayes") {
      return scm::bayes_classifier(scm::make_ground_truth(scm::config_from_json(j.at("scm"))));
    }
    if (type == "pooled-logistic") {
      return std::make_unique<classifier::PooledLogisticClassifier>(
          classifier::pooled_logistic_from_json(j.at("model")));
    }
    throw ParseError("'" + path + "': unknown classifier type '" + type + "'", 0);
  } catch (const json::exception& e) {
    throw ParseError("'" + path + "': " + e.what(), 0);
  }
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> tokens(argv + 1, argv + argc);

  CLI::App app{"Causal and associational concept attributions for time-series classifiers",
               "ccts"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  app.failure_message(CLI::FailureMessage::help);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--config", g.config,
                 "JSON file: the SCM for synth, option defaults for other commands");
  app.add_option("--out", g.out, "Output directory");

  std::size_t synth_n = 1000;
  std::string synth_format = "jsonl";
  auto* synth = app.add_subcommand("synth", "Sample a dataset from a structural causal model");
  synth->add_option("--n", synth_n, "Number of samples")->capture_default_str();
  synth->add_option("--format", synth_format, "jsonl | csv-long")->capture_default_str();

  DiscoverArgs da;
  auto* discover = app.add_subcommand("discover", "k-means concept discovery");
  discover->add_option("--data", da.data)->required();
  discover->add_option("--k", da.k, "Cluster count (0: elbow)")->capture_default_str();
  discover->add_option("--k-min", da.k_min)->capture_default_str();
  discover->add_option("--k-max", da.k_max)->capture_default_str();
  discover->add_option("--restarts", da.restarts)->capture_default_str();
  discover->add_flag("--pooled", da.pooled, "Concept statistics pooled over channels");

  std::string val_data;
  discovery::StumpsOptions so;
  std::size_t val_B = 1000;
  auto* validate = app.add_subcommand("validate", "Concept validation with boosted stumps");
  validate->add_option("--data", val_data)->required();
  validate->add_option("--rounds", so.rounds)->capture_default_str();
  validate->add_option("--learning-rate", so.learning_rate)->capture_default_str();
  validate->add_option("--bootstrap", val_B)->capture_default_str();

  ClassifierArgs ca;
  auto* train_cls = app.add_subcommand("train-classifier", "Train or build the classifier");
  train_cls->add_option("--data", ca.data);
  train_cls->add_option("--model", ca.model, "pooled-logistic | bayes")->capture_default_str();
  train_cls->add_option("--scm", ca.scm, "SCM config (bayes)");
  train_cls->add_option("--epochs", ca.train.epochs)->capture_default_str();
  train_cls->add_option("--l2", ca.train.l2)->capture_default_str();
  train_cls->add_option("--lr", ca.train.lr)->capture_default_str();

  ImputerArgs ia;
  auto* train_imp = app.add_subcommand("train-imputer", "Train diffusion imputers");
  train_imp->add_option("--data", ia.data)->required();
  train_imp->add_option("--label", ia.labels, "0, 1 and/or all")
      ->capture_default_str()
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  train_imp->add_option("--mask-mode", ia.mask_mode, "concept-regions | blackout")
      ->capture_default_str();
  train_imp->add_option("--steps", ia.train.iters)->capture_default_str();
  train_imp->add_option("--lr", ia.train.lr)->capture_default_str();
  train_imp->add_option("--batch", ia.train.batch)->capture_default_str();
  train_imp->add_option("--hidden", ia.train.hidden)->capture_default_str();
  train_imp->add_option("--radius", ia.train.radius)->capture_default_str();
  train_imp->add_option("--checkpoint-every", ia.train.checkpoint_every)->capture_default_str();
  train_imp->add_option("--validation-samples", ia.train.validation_samples)
      ->capture_default_str();

  AttributeArgs aa;
  auto* attribute = app.add_subcommand("attribute", "Causal and associational effect matrices");
  attribute->add_option("--data", aa.data)->required();
  attribute->add_option("--classifier", aa.classifier)->required();
  attribute->add_option("--imputer", aa.imputer, "ddpm | donor | scm")->capture_default_str();
  attribute->add_option("--imputer-dir", aa.imputer_dir, "Directory with imputer_*.ddpm");
  attribute->add_option("--scm", aa.scm, "SCM config (scm imputers)");
  attribute->add_option("--n-imputations", aa.engine.n_imputations)->capture_default_str();
  attribute->add_option("--bootstrap", aa.engine.bootstrap_B)->capture_default_str();
  attribute->add_option("--level", aa.engine.level)->capture_default_str();
  attribute->add_option("--prob-clamp", aa.engine.prob_clamp)->capture_default_str();
  attribute->add_option("--target", aa.target, "Target class D*")->capture_default_str();
  attribute->add_flag("--no-channel-columns", aa.no_channels);
  attribute->add_option("--concepts", aa.concepts)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "CSV, SVG and summary report");
  report->add_option("--results", ra.results, "Directory written by attribute")->required();
  report->add_option("--scm", ra.scm, "SCM config: adds the oracle table");
  report->add_option("--data", ra.data);
  report->add_option("--classifier", ra.classifier);
  report->add_option("--oracle-samples", ra.oracle_samples, "Samples per concept")
      ->capture_default_str();
  report->add_option("--oracle-tol", ra.oracle_tol, "Relative quadrature tolerance")
      ->capture_default_str();

  try {
    // Splice --config defaults in after the command name.
    auto cmd = std::find_first_of(tokens.begin(), tokens.end(), kCommands.begin(), kCommands.end());
    if (cmd != tokens.end() && *cmd != "synth") {
      std::string cfg;
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i] == "--config" && i + 1 < tokens.size()) cfg = tokens[i + 1];
        if (tokens[i].rfind("--config=", 0) == 0) cfg = tokens[i].substr(9);
      }
      if (!cfg.empty()) {
        const auto extra = config_tokens(cfg);
        tokens.insert(cmd + 1, extra.begin(), extra.end());
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  std::vector<const char*> args{argv[0]};
  for (const auto& t : tokens) args.push_back(t.c_str());
  try {
    app.parse(static_cast<int>(args.size()), args.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, std::cout, std::cerr);
    return rc == 0 ? 0 : 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  if (g.out.empty()) {
    std::cerr << "error: --out <dir> is required\n" << app.help();
    return 1;
  }
  try {
    fs::create_directories(g.out);
    if (sub == synth) cmd_synth(g, synth_n, synth_format);
    else if (sub == discover) cmd_discover(g, da);
    else if (sub == validate) cmd_validate(g, val_data, so, val_B);
    else if (sub == train_cls) cmd_train_classifier(g, ca);
    else if (sub == train_imp) cmd_train_imputer(g, ia);
    else if (sub == attribute) cmd_attribute(g, aa);
    else cmd_report(g, ra);
    write_manifest(g.out, run_meta(*sub, g.seed, g.config));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace ccts::report
