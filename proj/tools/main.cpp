#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ganen/commands.hpp"
#include "ganen/error.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitCheckFailed = 1;

using nlohmann::json;

/// Flags shared by train and sweep. Unset flags leave the config file and
/// variant defaults in charge.
struct RunFlags {
  std::string config_file;
  std::optional<std::string> variant;
  std::optional<std::size_t> generators, discriminators, max_iter, batch_size, latent_width;
  std::optional<double> beta, lr, train_fraction;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> data, synthetic, label_column, normalization, out;
  std::vector<std::string> sets;

  void add(CLI::App* app) {
    app->add_option("-c,--config", config_file, "JSON config file");
    app->add_option("--variant", variant, "f-anogan | egbad | ganomaly");
    app->add_option("-I,--generators", generators, "number of generators");
    app->add_option("-J,--discriminators", discriminators, "number of discriminators");
    app->add_option("--max-iter", max_iter, "base-model iteration budget");
    app->add_option("--batch-size", batch_size);
    app->add_option("--latent-width", latent_width, "encoding dimension d'");
    app->add_option("--beta", beta, "score weight of the discriminative loss");
    app->add_option("--lr", lr, "learning rate of both players");
    app->add_option("--train-fraction", train_fraction, "fraction of normal rows used for training");
    app->add_option("--seed", seed);
    app->add_option("--data", data, "delimited data file");
    app->add_option("--synthetic", synthetic, "ring | two-moons | gaussian-mixture");
    app->add_option("--label-column", label_column);
    app->add_option("--normalization", normalization, "none | minmax01 | zscore");
    app->add_option("-o,--out", out, "run directory");
    app->add_option("--set", sets, "dotted key=value override, e.g. trainer.n_critic=5");
  }

  ganen::RunConfig resolve() const {
    const json file = config_file.empty() ? json() : ganen::read_json_file(config_file);
    json flags = json::object();
    if (variant) flags["variant"] = *variant;
    if (generators) flags["generators"] = *generators;
    if (discriminators) flags["discriminators"] = *discriminators;
    if (max_iter) flags["trainer"]["max_iter"] = *max_iter;
    if (batch_size) flags["trainer"]["batch_size"] = *batch_size;
    if (latent_width) flags["network"]["latent_width"] = *latent_width;
    if (beta) flags["weights"]["beta"] = *beta;
    if (lr) {
      flags["trainer"]["lr_generator"] = *lr;
      flags["trainer"]["lr_discriminator"] = *lr;
    }
    if (train_fraction) flags["train_fraction"] = *train_fraction;
    if (seed) flags["seed"] = *seed;
    if (data) flags["data"]["path"] = *data;
    if (synthetic) flags["data"]["synthetic"]["kind"] = *synthetic;
    if (label_column) flags["data"]["label_column"] = *label_column;
    if (normalization) flags["normalization"] = *normalization;
    if (out) flags["output_dir"] = *out;
    for (const std::string& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ganen::ValidationError("--set expects key=value, got '" + s + "'");
      ganen::set_dotted(flags, s.substr(0, eq), s.substr(eq + 1));
    }
    return ganen::resolve_config(file, flags);
  }
};

char delimiter_of(const std::string& s) {
  if (s.size() != 1) throw ganen::ValidationError("delimiter must be a single character");
  return s[0];
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GAN ensembles for anomaly detection"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate-data", "write a synthetic labeled dataset");
  std::string gen_kind = "ring", gen_out, gen_delim = ",";
  ganen::SyntheticSpec gen_spec;
  gen->add_option("--kind", gen_kind, "ring | two-moons | gaussian-mixture");
  gen->add_option("--n-normal", gen_spec.n_normal);
  gen->add_option("--n-anomaly", gen_spec.n_anomaly);
  gen->add_option("--dim", gen_spec.dim);
  gen->add_option("--seed", gen_spec.seed);
  gen->add_option("--delimiter", gen_delim);
  gen->add_option("-o,--out", gen_out, "output file")->required();

  auto* train = app.add_subcommand("train", "train an ensemble and write a run directory");
  RunFlags train_flags;
  train_flags.add(train);
  bool print_config = false;
  train->add_flag("--print-config", print_config, "print the resolved config and exit");

  auto* score = app.add_subcommand("score", "score a data file with a checkpoint");
  ganen::ScoreOptions score_opts;
  std::string score_delim = ",";
  std::optional<double> score_beta;
  score->add_option("--checkpoint", score_opts.checkpoint)->required();
  score->add_option("--data", score_opts.data)->required();
  score->add_option("-o,--out", score_opts.output_dir)->required();
  score->add_option("--label-column", score_opts.label_column);
  score->add_option("--delimiter", score_delim);
  score->add_option("--beta", score_beta, "override the checkpoint's score weight");

  auto* evaluate = app.add_subcommand("evaluate", "AUROC, ROC and P/R/F1 of a scores file");
  ganen::EvaluateOptions eval_opts;
  evaluate->add_option("--scores", eval_opts.scores)->required();
  evaluate->add_option("-o,--out", eval_opts.output_dir)->required();
  evaluate->add_option("--contamination", eval_opts.contamination,
                       "flag this top fraction (default: labelled anomaly fraction)");
  evaluate->add_option("--threshold", eval_opts.threshold, "explicit score threshold");

  auto* verify = app.add_subcommand("verify-critic", "check the closed-form optimal critic against the LP oracle");
  ganen::VerifyCriticOptions verify_opts;
  std::vector<std::size_t> random_sizes;
  std::string verify_norm;
  verify->add_option("--instance", verify_opts.instance, "JSON critic instance");
  verify->add_option("--random", random_sizes, "N M: random instances with up to N training and M support points")
      ->expected(2);
  verify->add_option("--count", verify_opts.count);
  verify->add_option("--seed", verify_opts.seed);
  verify->add_option("--dim", verify_opts.dim, "1 or 2 (default alternates)");
  verify->add_option("--norm", verify_norm, "L1 or L2 (default alternates)");
  verify->add_option("--tol", verify_opts.tol);
  verify->add_option("--report", verify_opts.output, "write the JSON report here");
  verify->add_option("--plot", verify_opts.plot, "write closed-form grid rows of the first instance");

  auto* sweep = app.add_subcommand("sweep", "ensemble-size or beta sweep");
  RunFlags sweep_flags;
  sweep_flags.add(sweep);
  std::string sweep_kind = "ensemble-size";
  ganen::SweepOptions sweep_opts;
  sweep->add_option("--kind", sweep_kind, "ensemble-size | beta");
  sweep->add_option("--settings", sweep_opts.settings, "grid values (default sizes 1 3 5 7 or betas 0 0.1 1 9 39)");
  sweep->add_option("--seeds", sweep_opts.seeds, "seeds per setting");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (gen->parsed()) {
      gen_spec.kind = ganen::parse_synthetic_kind(gen_kind);
      ganen::cmd_generate_data({gen_spec, gen_out, delimiter_of(gen_delim)}, std::cout);
    } else if (train->parsed()) {
      const ganen::RunConfig config = train_flags.resolve();
      if (print_config) {
        std::cout << ganen::config_to_json(config).dump(2) << '\n';
        return 0;
      }
      ganen::cmd_train(config, std::cout);
    } else if (score->parsed()) {
      score_opts.delimiter = delimiter_of(score_delim);
      score_opts.beta = score_beta;
      ganen::cmd_score(score_opts, std::cout);
    } else if (evaluate->parsed()) {
      ganen::cmd_evaluate(eval_opts, std::cout);
    } else if (verify->parsed()) {
      if (verify_opts.instance && !random_sizes.empty()) {
        throw ganen::ValidationError("use either --instance or --random");
      }
      if (!verify_opts.instance && random_sizes.empty()) {
        throw ganen::ValidationError("verify-critic needs --instance or --random N M");
      }
      if (!random_sizes.empty()) {
        verify_opts.max_train = random_sizes[0];
        verify_opts.max_support = random_sizes[1];
      }
      if (!verify_norm.empty()) verify_opts.norm = ganen::critic::parse_norm(verify_norm);
      if (!ganen::cmd_verify_critic(verify_opts, std::cout).pass()) return kExitCheckFailed;
    } else if (sweep->parsed()) {
      sweep_opts.kind = ganen::parse_sweep_kind(sweep_kind);
      ganen::cmd_sweep(sweep_flags.resolve(), sweep_opts, std::cout);
    }
  } catch (const ganen::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ganen::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ganen::ShapeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ganen::DivergenceError& e) {
    std::cerr << "training diverged: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
