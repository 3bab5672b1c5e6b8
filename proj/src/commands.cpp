#include "ganen/commands.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ganen/checkpoint.hpp"
#include "ganen/error.hpp"

namespace ganen {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string join(const std::string& dir, const char* file) { return (fs::path(dir) / file).string(); }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory " + dir + ": " + ec.message());
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  return out;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

std::optional<ScalerMethod> scaler_method(Normalization n) {
  switch (n) {
    case Normalization::kNone: return std::nullopt;
    case Normalization::kMinMax01: return ScalerMethod::kMinMax01;
    case Normalization::kZScore: return ScalerMethod::kZScore;
  }
  return std::nullopt;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) throw FormatError(where + ": '" + s + "' is not a number");
  return v;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

LabeledDataset cmd_generate_data(const GenerateDataOptions& options, std::ostream& log) {
  if (options.spec.n_normal == 0) throw ValidationError("n_normal must be >= 1");
  if (options.spec.dim < 2) throw ValidationError("dim must be >= 2");
  if (options.output.empty()) throw ValidationError("an output path is required");
  LabeledDataset data = make_synthetic(options.spec);
  const fs::path parent = fs::path(options.output).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
  save_delimited(options.output, data, options.delimiter);
  log << "wrote " << data.size() << " rows (" << options.spec.n_normal << " normal, " << options.spec.n_anomaly
      << " anomalous) to " << options.output << '\n';
  return data;
}

LabeledDataset load_source(const DataSource& source) {
  if (source.synthetic) return make_synthetic(*source.synthetic);
  return load_delimited(source.path, {source.label_column, source.delimiter});
}

PreparedData prepare_data(const RunConfig& config) {
  const LabeledDataset data = load_source(config.data);
  data.validate();
  Split split = anomaly_split(data, config.train_fraction, config.seed);
  PreparedData out;
  out.test = std::move(split.test);
  if (auto method = scaler_method(config.normalization)) {
    auto [scaled, scaler] = normalize(split.train, *method);
    out.train = std::move(scaled);
    out.scaler = std::move(scaler);
  } else {
    out.train = std::move(split.train);
  }
  return out;
}

TrainedModel train_model(const RunConfig& config, const LabeledDataset& train) {
  ArchitectureSpec arch = config.arch;
  arch.data_width = train.width();
  TrainedModel out;
  out.model = make_ensemble(config.variant, arch, config.generators, config.discriminators, config.weights,
                            config.seed);
  out.result = ganen::train(out.model, train.rows, config.train_config());
  return out;
}

double test_auroc(const EnsembleModel& model, const LabeledDataset& test, const std::optional<Scaler>& scaler,
                  std::optional<double> beta) {
  const Tensor rows = scaler ? scaler->apply(test.rows) : test.rows;
  const AnomalyReport report =
      beta ? score_dataset(rows, model, *beta, 0) : score_dataset(rows, model, 0);
  return auroc(report.scores, test.labels);
}

TrainArtifacts cmd_train(const RunConfig& config, std::ostream& log) {
  config.validate();
  const PreparedData data = prepare_data(config);
  log << "training " << variant_name(config.variant) << ' ' << config.generators << 'x' << config.discriminators
      << " on " << data.train.size() << " normal rows for up to " << config.effective_max_iter()
      << " iterations\n";
  ensure_dir(config.output_dir);
  write_json(join(config.output_dir, kResolvedConfigFile), config_to_json(config));
  TrainedModel trained = train_model(config, data.train);

  Checkpoint ckpt{std::move(trained.model), data.scaler, config.seed};
  save_checkpoint(join(config.output_dir, kCheckpointFile), ckpt);
  {
    std::ofstream out = open_out(join(config.output_dir, kHistoryFile));
    write_history_csv(out, trained.result.history);
  }
  save_delimited(join(config.output_dir, kTestDataFile), data.test);
  log << "ran " << trained.result.iterations << " iterations"
      << (trained.result.converged ? " (objective plateaued)" : "") << "; wrote run to " << config.output_dir
      << '\n';
  return {config.output_dir, std::move(trained.result)};
}

AnomalyReport cmd_score(const ScoreOptions& options, std::ostream& log) {
  if (options.checkpoint.empty()) throw ValidationError("a checkpoint path is required");
  if (options.data.empty()) throw ValidationError("a data path is required");
  if (options.output_dir.empty()) throw ValidationError("an output directory is required");
  if (options.beta && !(*options.beta >= 0.0)) throw ValidationError("beta must be >= 0");
  const Checkpoint ckpt = load_checkpoint(options.checkpoint);
  const LabeledDataset data = load_delimited(options.data, {options.label_column, options.delimiter});
  const std::size_t expected = ckpt.model.arch.data_width;
  if (data.width() != expected) {
    throw ValidationError("data has " + std::to_string(data.width()) + " feature columns but the checkpoint expects " +
                          std::to_string(expected));
  }
  const Tensor rows = ckpt.scaler ? ckpt.scaler->apply(data.rows) : data.rows;
  AnomalyReport report = options.beta ? score_dataset(rows, ckpt.model, *options.beta, ckpt.seed)
                                      : score_dataset(rows, ckpt.model, ckpt.seed);
  ensure_dir(options.output_dir);
  {
    std::ofstream out = open_out(join(options.output_dir, kScoresFile));
    write_report_csv(out, report, &data.labels);
  }
  double lo = report.scores.front(), hi = lo, sum = 0.0;
  for (double s : report.scores) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
    sum += s;
  }
  write_json(join(options.output_dir, kScoreSummaryFile),
             {{"variant", std::string(variant_name(report.variant))},
              {"generators", report.num_generators},
              {"discriminators", report.num_discriminators},
              {"beta", report.weights.beta},
              {"samples", report.scores.size()},
              {"min_score", lo},
              {"max_score", hi},
              {"mean_score", sum / static_cast<double>(report.scores.size())}});
  log << "scored " << report.scores.size() << " rows with " << report.num_generators * report.num_discriminators
      << " pairs\n";
  return report;
}

Evaluation evaluate_scores(const std::vector<double>& scores, const std::vector<int>& labels,
                           std::optional<double> contamination, std::optional<double> threshold) {
  if (scores.size() != labels.size()) throw ValidationError("score and label counts differ");
  Evaluation e;
  e.samples = scores.size();
  for (int l : labels) e.anomalies += l == 1;
  if (e.anomalies == 0 || e.anomalies == e.samples) {
    throw ValidationError("evaluation needs both normal and anomalous labels");
  }
  e.auroc = auroc(scores, labels);
  e.roc = roc_curve(scores, labels);
  e.contamination = contamination.value_or(static_cast<double>(e.anomalies) / static_cast<double>(e.samples));
  const double t = threshold ? *threshold : threshold_by_contamination(scores, e.contamination);
  e.at_threshold = prf_at_threshold(scores, labels, t);
  return e;
}

json evaluation_to_json(const Evaluation& e) {
  return {{"samples", e.samples},
          {"anomalies", e.anomalies},
          {"auroc", e.auroc},
          {"roc_area", e.roc.area()},
          {"contamination", e.contamination},
          {"threshold", e.at_threshold.threshold},
          {"precision", e.at_threshold.precision},
          {"recall", e.at_threshold.recall},
          {"f1", e.at_threshold.f1}};
}

Evaluation cmd_evaluate(const EvaluateOptions& options, std::ostream& log) {
  if (options.scores.empty()) throw ValidationError("a scores path is required");
  if (options.output_dir.empty()) throw ValidationError("an output directory is required");
  std::ifstream in(options.scores);
  if (!in) throw ValidationError("cannot read " + options.scores);
  std::string line;
  if (!std::getline(in, line)) throw FormatError(options.scores + " is empty");
  const std::vector<std::string> header = split_line(line);
  if (header.size() < 3 || header[1] != "label" || header[2] != "score") {
    throw FormatError(options.scores + ": expected a header starting with sample_index,label,score");
  }
  std::vector<double> scores;
  std::vector<int> labels;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    const std::string where = options.scores + ":" + std::to_string(lineno);
    if (cells.size() < 3) throw FormatError(where + ": too few columns");
    if (cells[1] != "0" && cells[1] != "1") throw FormatError(where + ": label must be 0 or 1");
    labels.push_back(cells[1] == "1");
    scores.push_back(parse_double(cells[2], where));
  }
  const Evaluation e = evaluate_scores(scores, labels, options.contamination, options.threshold);
  ensure_dir(options.output_dir);
  write_json(join(options.output_dir, kMetricsFile), evaluation_to_json(e));
  {
    std::ofstream out = open_out(join(options.output_dir, kRocFile));
    write_roc_csv(out, e.roc);
  }
  log << std::setprecision(6) << "auroc " << e.auroc << "  precision " << e.at_threshold.precision << "  recall "
      << e.at_threshold.recall << "  f1 " << e.at_threshold.f1 << '\n';
  return e;
}

VerifyCriticOutcome cmd_verify_critic(const VerifyCriticOptions& options, std::ostream& log) {
  if (!(options.tol > 0.0)) throw ValidationError("tolerance must be > 0");
  std::vector<critic::CriticInstance> instances;
  if (options.instance) {
    instances.push_back(critic::instance_from_json(read_json_file(*options.instance)));
  } else {
    if (options.count == 0) throw ValidationError("count must be >= 1");
    if (options.max_train == 0 || options.max_support == 0) throw ValidationError("N and M must be >= 1");
    for (std::size_t k = 0; k < options.count; ++k) {
      critic::RandomInstanceSpec spec;
      spec.max_train = options.max_train;
      spec.max_support = options.max_support;
      spec.dim = options.dim ? options.dim : 1 + k % 2;
      spec.norm = options.norm ? *options.norm : ((k / 2) % 2 ? critic::Norm::kL1 : critic::Norm::kL2);
      instances.push_back(critic::random_instance(spec, options.seed + k));
    }
  }
  VerifyCriticOutcome outcome;
  for (std::size_t k = 0; k < instances.size(); ++k) {
    const critic::CriticInstance& inst = instances[k];
    inst.validate();
    const critic::TheoremReport r = critic::check_theorem(inst, options.tol, options.lipschitz_tol);
    ++outcome.instances;
    outcome.passed += r.pass;
    outcome.worst_difference = std::max(outcome.worst_difference, r.max_abs_difference);
    json entry = critic::report_to_json(r);
    entry["instance"] = critic::instance_to_json(inst);
    outcome.reports.push_back(std::move(entry));
    log << "instance " << k << ": N=" << inst.train.size() << " M=" << inst.support.size() << " d=" << inst.dim()
        << ' ' << critic::norm_name(inst.norm) << "  max |oracle - closed form| = " << std::setprecision(3)
        << r.max_abs_difference << (r.pass ? "  PASS" : "  FAIL") << '\n';
    if (options.plot && k == 0 && inst.dim() <= 2) {
      std::ofstream out = open_out(*options.plot);
      critic::write_plot_rows(out, inst, r.oracle_train_values);
    }
  }
  if (options.output) {
    write_json(*options.output, {{"instances", outcome.instances},
                                 {"passed", outcome.passed},
                                 {"worst_difference", outcome.worst_difference},
                                 {"tolerance", options.tol},
                                 {"reports", outcome.reports}});
  }
  log << outcome.passed << '/' << outcome.instances << " instances pass at tolerance " << options.tol << '\n';
  return outcome;
}

std::string_view sweep_kind_name(SweepKind k) { return k == SweepKind::kBeta ? "beta" : "ensemble-size"; }

SweepKind parse_sweep_kind(std::string_view name) {
  if (name == "ensemble-size") return SweepKind::kEnsembleSize;
  if (name == "beta") return SweepKind::kBeta;
  throw ValidationError("unknown sweep kind '" + std::string(name) + "' (expected ensemble-size or beta)");
}

std::vector<SweepRow> run_sweep(const RunConfig& base, const SweepOptions& options, std::ostream& log) {
  base.validate();
  if (options.seeds == 0) throw ValidationError("sweep needs at least one seed");
  std::vector<double> settings = options.settings;
  if (settings.empty()) {
    settings = options.kind == SweepKind::kEnsembleSize ? std::vector<double>{1, 3, 5, 7}
                                                        : std::vector<double>{0, 0.1, 1, 9, 39};
  }
  for (double s : settings) {
    if (options.kind == SweepKind::kEnsembleSize && (s < 1.0 || s != std::floor(s))) {
      throw ValidationError("ensemble sizes must be positive integers");
    }
    if (options.kind == SweepKind::kBeta && !(s >= 0.0)) throw ValidationError("beta values must be >= 0");
  }
  std::vector<SweepRow> rows;
  if (options.kind == SweepKind::kEnsembleSize) {
    std::size_t cell = 0;
    for (double s : settings) {
      for (std::size_t k = 0; k < options.seeds; ++k, ++cell) {
        RunConfig c = base;
        c.generators = c.discriminators = static_cast<std::size_t>(s);
        c.seed = base.seed + cell;
        c.trainer.seed = c.seed;
        const PreparedData data = prepare_data(c);
        const TrainedModel trained = train_model(c, data.train);
        rows.push_back({s, c.seed, test_auroc(trained.model, data.test, data.scaler)});
        log << "size " << s << " seed " << c.seed << " auroc " << rows.back().auroc << std::endl;
      }
    }
  } else {
    std::vector<std::vector<SweepRow>> by_seed;
    for (std::size_t k = 0; k < options.seeds; ++k) {
      RunConfig c = base;
      c.seed = base.seed + k;
      c.trainer.seed = c.seed;
      const PreparedData data = prepare_data(c);
      const TrainedModel trained = train_model(c, data.train);
      std::vector<SweepRow> cells;
      for (double s : settings) cells.push_back({s, c.seed, test_auroc(trained.model, data.test, data.scaler, s)});
      by_seed.push_back(std::move(cells));
    }
    for (std::size_t si = 0; si < settings.size(); ++si) {
      for (const auto& cells : by_seed) {
        rows.push_back(cells[si]);
        log << "beta " << cells[si].setting << " seed " << cells[si].seed << " auroc " << cells[si].auroc << std::endl;
      }
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "setting,seed,auroc\n" << std::setprecision(17);
  for (const SweepRow& r : rows) out << r.setting << ',' << r.seed << ',' << r.auroc << '\n';
}

std::vector<SweepRow> cmd_sweep(const RunConfig& base, const SweepOptions& options, std::ostream& log) {
  std::vector<SweepRow> rows = run_sweep(base, options, log);
  ensure_dir(base.output_dir);
  write_json(join(base.output_dir, kResolvedConfigFile), config_to_json(base));
  std::ofstream out = open_out(join(base.output_dir, kSweepFile));
  write_sweep_csv(out, rows);
  return rows;
}

}  // namespace ganen
