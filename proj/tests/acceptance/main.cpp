#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ganen/checkpoint.hpp"
#include "ganen/commands.hpp"
#include "ganen/critic.hpp"
#include "ganen/gradcheck.hpp"
#include "ganen/losses.hpp"
#include "ganen/metrics.hpp"
#include "ganen/scoring.hpp"
#include "ganen/trainer.hpp"

#include "oracle.hpp"

using namespace ganen;
namespace fs = std::filesystem;

namespace {

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status = Status::kFail;
  std::string detail;
};

Outcome verdict(bool ok, const std::string& detail) { return {ok ? Status::kPass : Status::kFail, detail}; }

std::string fmt(double v, int precision = 6) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("ganen_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// 1 ------------------------------------------------------------------------

enum class LossKind { kAdvGan, kAdvWgan, kAdvBigan, kRecon, kDisc, kEnc };

const char* loss_name(LossKind k) {
  switch (k) {
    case LossKind::kAdvGan: return "adv_gan";
    case LossKind::kAdvWgan: return "adv_wgan";
    case LossKind::kAdvBigan: return "adv_bigan";
    case LossKind::kRecon: return "recon";
    case LossKind::kDisc: return "disc";
    case LossKind::kEnc: return "enc";
  }
  return "?";
}

Variant variant_for(LossKind k, std::mt19937_64& rng) {
  switch (k) {
    case LossKind::kAdvGan: return Variant::kGanomaly;
    case LossKind::kAdvWgan: return Variant::kFAnoGan;
    case LossKind::kAdvBigan: return Variant::kEgbad;
    case LossKind::kEnc: return Variant::kGanomaly;
    case LossKind::kRecon:
    case LossKind::kDisc: {
      const Variant all[] = {Variant::kFAnoGan, Variant::kEgbad, Variant::kGanomaly};
      return all[rng() % 3];
    }
  }
  return Variant::kFAnoGan;
}

void randomize(Mlp& net, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  for (Tensor* p : net.parameters())
    for (double& v : p->values()) v = g(rng);
}

Tensor gaussian(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Tensor t(Shape{n, d});
  for (double& v : t.values()) v = g(rng);
  return t;
}

Outcome gradient_correctness() {
  const LossKind kinds[] = {LossKind::kAdvGan, LossKind::kAdvWgan, LossKind::kAdvBigan,
                            LossKind::kRecon,  LossKind::kDisc,    LossKind::kEnc};
  const Activation hidden_acts[] = {Activation::kLeakyRelu, Activation::kTanh, Activation::kRelu};
  constexpr std::size_t kPerLoss = 20;
  double worst = 0.0;
  std::string worst_where;
  std::size_t configs = 0;
  for (std::size_t k = 0; k < kPerLoss * 6; ++k) {
    const LossKind kind = kinds[k % 6];
    std::mt19937_64 rng(1000 + k);
    const Variant v = variant_for(kind, rng);
    ArchitectureSpec a;
    a.data_width = 2 + rng() % 3;
    a.latent_width = 1 + rng() % 3;
    a.generator_hidden = {3 + rng() % 4};
    a.discriminator_hidden = {3 + rng() % 4, 2 + rng() % 3};
    a.hidden_activation = hidden_acts[rng() % 3];
    a.decoder_output = rng() % 2 ? Activation::kIdentity : Activation::kTanh;
    GeneratorBundle gen = make_generator(a, v, rng);
    DiscriminatorBundle disc = make_discriminator(a, v, rng);
    randomize(gen.encoder, rng, 0.5);
    randomize(gen.decoder, rng, 0.5);
    if (gen.second_encoder) randomize(*gen.second_encoder, rng, 0.5);
    randomize(disc.net, rng, 0.5);
    const std::size_t n = 2 + rng() % 4;
    const Tensor x = gaussian(n, a.data_width, rng);
    const Tensor z = gaussian(n, a.latent_width, rng);
    const int ell = 1 + static_cast<int>(rng() % 2);

    auto build = [&](Tape& t) -> Var {
      Var xb = t.input(x);
      Var zb = t.input(z);
      switch (kind) {
        case LossKind::kAdvGan: return adv_gan(t, xb, gen, disc, Tracking::all());
        case LossKind::kAdvWgan: return adv_wgan(t, xb, zb, gen, disc, Tracking::all());
        case LossKind::kAdvBigan: return adv_bigan(t, xb, zb, gen, disc, Tracking::all());
        case LossKind::kRecon: return recon_loss(t, xb, gen, ell, Tracking::all());
        case LossKind::kDisc: return disc_loss(t, v, xb, gen, disc, ell, Tracking::all());
        case LossKind::kEnc: return enc_loss(t, xb, gen, ell, Tracking::all());
      }
      return xb;
    };

    std::vector<Tensor*> params;
    for (Mlp* m : {&gen.encoder, &gen.decoder, &disc.net}) {
      for (Tensor* p : m->parameters()) params.push_back(p);
    }
    if (gen.second_encoder) {
      for (Tensor* p : gen.second_encoder->parameters()) params.push_back(p);
    }
    for (Tensor* p : params) p->zero_grad();
    {
      Tape t;
      Var loss = build(t);
      t.backward(loss);
      t.accumulate_grads(params);
    }
    std::vector<double> analytic, numeric;
    for (Tensor* p : params) {
      const Tensor saved = *p;
      const std::vector<double> g = p->grad();
      const Tensor fd = finite_difference_grad(
          [&](const Tensor& candidate) {
            p->values() = candidate.values();
            Tape t;
            return t.value(build(t)).item();
          },
          saved);
      p->values() = saved.values();
      analytic.insert(analytic.end(), g.begin(), g.end());
      numeric.insert(numeric.end(), fd.values().begin(), fd.values().end());
    }
    const double err = max_relative_error(analytic, numeric);
    if (err > worst) {
      worst = err;
      worst_where = std::string(loss_name(kind)) + " config " + std::to_string(k);
    }
    ++configs;
  }
  return verdict(worst < 1e-4, std::to_string(configs) + " configs over 6 losses, max relative error " +
                                   fmt(worst, 3) + (worst_where.empty() ? "" : " (" + worst_where + ")"));
}

// 2 ------------------------------------------------------------------------

Outcome critic_theorem() {
  std::size_t passed = 0;
  double worst = 0.0, worst_lip = 0.0;
  constexpr std::size_t kInstances = 50;
  for (std::size_t k = 0; k < kInstances; ++k) {
    critic::RandomInstanceSpec spec{8, 25, 1 + k % 2, (k / 2) % 2 ? critic::Norm::kL1 : critic::Norm::kL2};
    const critic::CriticInstance inst = critic::random_instance(spec, 500 + k);
    const critic::TheoremReport r = critic::check_theorem(inst, 1e-3, 1e-6);
    passed += r.pass;
    worst = std::max(worst, r.max_abs_difference);
    worst_lip = std::max(worst_lip, r.oracle_lipschitz.worst_excess);
  }
  return verdict(passed == kInstances, std::to_string(passed) + "/" + std::to_string(kInstances) +
                                          " instances, max |oracle - closed form| " + fmt(worst, 3) +
                                          ", max Lipschitz excess " + fmt(worst_lip, 3));
}

// 3 ------------------------------------------------------------------------

Tensor ring_rows(std::size_t n, std::uint64_t seed) {
  return make_synthetic({SyntheticKind::kRing, n, 0, 2, seed}).rows;
}

Outcome score_identity() {
  double worst = 0.0;
  for (Variant v : {Variant::kFAnoGan, Variant::kEgbad, Variant::kGanomaly}) {
    ArchitectureSpec a;
    a.data_width = 2;
    a.latent_width = 4;
    a.generator_hidden = {16};
    a.discriminator_hidden = {16, 4};
    EnsembleModel m = make_ensemble(v, a, 3, 3, default_weights(v), 31);
    TrainConfig c;
    c.max_iter = 300;
    c.batch_size = 32;
    c.lr_generator = c.lr_discriminator = 1e-3;
    c.stop_on_plateau = false;
    c.seed = 7;
    train(m, ring_rows(200, 3), c);
    const Tensor x = make_synthetic({SyntheticKind::kRing, 40, 20, 2, 4}).rows;
    const AnomalyReport r = score_dataset(x, m);
    for (std::size_t s = 0; s < x.rows(); ++s) {
      const Tensor row = x.slice_rows(s, 1);
      double sum = 0.0;
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) sum += pair_score(row, m.generators[i], m.discriminators[j], m.weights, v);
      }
      const double mean = sum / 9.0;
      worst = std::max({worst, std::fabs(r.scores[s] - mean), std::fabs(ensemble_score(row, m) - mean)});
    }
  }
  return verdict(worst <= 1e-12, "3 variants x 60 samples, max |A(x) - mean pair score| " + fmt(worst, 3));
}

// 4 ------------------------------------------------------------------------

Outcome single_model_reduction() {
  std::size_t compared = 0;
  bool same = true;
  std::string where;
  for (Variant v : {Variant::kFAnoGan, Variant::kEgbad, Variant::kGanomaly}) {
    ArchitectureSpec a;
    a.data_width = 2;
    a.latent_width = 3;
    a.generator_hidden = {8};
    a.discriminator_hidden = {8, 3};
    EnsembleModel ens = make_ensemble(v, a, 1, 1, default_weights(v), 77);
    EnsembleModel single = ens;
    TrainConfig c;
    c.max_iter = 200;
    c.batch_size = 16;
    c.lr_generator = c.lr_discriminator = 1e-3;
    c.stop_on_plateau = false;
    c.seed = 11;
    const Tensor data = ring_rows(100, 5);
    std::vector<EnsembleModel> trajectory;
    train(ens, data, c, [&](const HistoryRow&, const EnsembleModel& m) { trajectory.push_back(m); });
    std::size_t step = 0;
    train_single_model(v, single.generators[0], single.discriminators[0], single.weights, single.prior, data, c,
                       [&](const HistoryRow&, const GeneratorBundle& g, const DiscriminatorBundle& d) {
                         EnsembleModel snap = single;
                         snap.generators[0] = g;
                         snap.discriminators[0] = d;
                         if (step >= trajectory.size() || !same_model(snap, trajectory[step])) {
                           if (same) where = std::string(variant_name(v)) + " step " + std::to_string(step);
                           same = false;
                         }
                         ++step;
                         ++compared;
                       });
    if (step != trajectory.size()) {
      same = false;
      where = std::string(variant_name(v)) + " trajectory lengths differ";
    }
    same = same && same_model(ens, single);
  }
  return verdict(same, std::to_string(compared) + " steps over 3 variants compared bitwise" +
                           (same ? "" : ", first mismatch at " + where));
}

// 5 ------------------------------------------------------------------------

Outcome update_frequency() {
  ArchitectureSpec a;
  a.data_width = 2;
  a.latent_width = 2;
  a.generator_hidden = {4};
  a.discriminator_hidden = {4, 2};
  EnsembleModel m = make_ensemble(Variant::kEgbad, a, 3, 3, default_weights(Variant::kEgbad), 5);
  TrainConfig c;
  c.max_iter = 10000;
  c.batch_size = 4;
  c.lr_generator = c.lr_discriminator = 1e-4;
  c.stop_on_plateau = false;
  c.seed = 2024;
  const TrainResult r = train(m, ring_rows(64, 6), c);
  const double expected = static_cast<double>(r.iterations) / 3.0;
  double worst = 0.0;
  std::string counts;
  for (std::size_t u : r.generator_updates) {
    worst = std::max(worst, std::fabs(static_cast<double>(u) - expected) / expected);
    counts += (counts.empty() ? "" : ", ") + std::to_string(u);
  }
  return verdict(r.iterations == 10000 && worst <= 0.10,
                 std::to_string(r.iterations) + " iterations, generator updates [" + counts +
                     "], max deviation " + fmt(100 * worst, 3) + "%");
}

// 6 and 7 ------------------------------------------------------------------

struct RingRun {
  double auroc = 0.0;
  double auroc_beta0 = 0.0;
  double auroc_beta1 = 0.0;
};

RunConfig ring_config(std::size_t size, std::uint64_t seed) {
  nlohmann::json flags = {{"variant", "f-anogan"},
                          {"generators", size},
                          {"discriminators", size},
                          {"seed", seed},
                          {"trainer", {{"max_iter", 2000}, {"lr_generator", 1e-3}, {"lr_discriminator", 1e-3}}},
                          {"data", {{"synthetic", {{"kind", "ring"}}}}}};
  return resolve_config(nlohmann::json::object(), flags);
}

RingRun ring_run(std::size_t size, std::uint64_t seed) {
  const RunConfig c = ring_config(size, seed);
  const PreparedData p = prepare_data(c);
  const TrainedModel t = train_model(c, p.train);
  return {test_auroc(t.model, p.test, p.scaler), test_auroc(t.model, p.test, p.scaler, 0.0),
          test_auroc(t.model, p.test, p.scaler, 1.0)};
}

std::vector<RingRun> g_ensemble_runs;

Outcome ensemble_benefit() {
  constexpr std::uint64_t kSeeds = 5;
  double single = 0.0, ensemble = 0.0;
  std::string singles, ensembles;
  g_ensemble_runs.clear();
  for (std::uint64_t s = 0; s < kSeeds; ++s) {
    const RingRun one = ring_run(1, s);
    const RingRun three = ring_run(3, s);
    g_ensemble_runs.push_back(three);
    single += one.auroc / kSeeds;
    ensemble += three.auroc / kSeeds;
    singles += (s ? " " : "") + fmt(one.auroc, 4);
    ensembles += (s ? " " : "") + fmt(three.auroc, 4);
  }
  return verdict(ensemble >= single && single > 0.5 && ensemble > 0.5,
                 "mean AUROC 3x3 " + fmt(ensemble, 4) + " [" + ensembles + "] vs 1x1 " + fmt(single, 4) + " [" +
                     singles + "]");
}

Outcome beta_trend() {
  if (g_ensemble_runs.empty()) {
    for (std::uint64_t s = 0; s < 5; ++s) g_ensemble_runs.push_back(ring_run(3, s));
  }
  std::size_t wins = 0;
  std::string pairs;
  for (const RingRun& r : g_ensemble_runs) {
    wins += r.auroc_beta1 >= r.auroc_beta0;
    pairs += (pairs.empty() ? "" : ", ") + fmt(r.auroc_beta1, 4) + " vs " + fmt(r.auroc_beta0, 4);
  }
  return verdict(wins >= 3, std::to_string(wins) + "/5 seeds with AUROC(beta=1) >= AUROC(beta=0): " + pairs);
}

// 8 ------------------------------------------------------------------------

Outcome kdd_protocol() {
  const char* path = std::getenv("GANEN_KDD99");
  if (!path || !fs::exists(path)) {
    return {Status::kSkip, "set GANEN_KDD99 to a preprocessed KDD99 CSV (tools/preprocess_kdd99.py) to run"};
  }
  const LabeledDataset full = load_delimited(path, {});
  std::vector<std::size_t> idx(full.size());
  for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
  std::mt19937_64 rng(99);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(std::min<std::size_t>(20000, idx.size()));
  std::sort(idx.begin(), idx.end());
  LabeledDataset sub{full.rows.gather_rows(idx), {}, full.feature_names};
  for (std::size_t k : idx) sub.labels.push_back(full.labels[k]);
  const fs::path dir = scratch("kdd");
  const std::string csv = (dir / "kdd20k.csv").string();
  save_delimited(csv, sub);

  std::size_t wins = 0;
  std::string detail;
  for (std::uint64_t s = 0; s < 3; ++s) {
    double f1[2] = {0.0, 0.0};
    for (std::size_t size : {1, 3}) {
      nlohmann::json flags = {{"variant", "f-anogan"},
                              {"generators", size},
                              {"discriminators", size},
                              {"seed", s},
                              {"trainer", {{"max_iter", 1000}, {"lr_generator", 1e-3}, {"lr_discriminator", 1e-3}}},
                              {"data", {{"path", csv}}}};
      const RunConfig c = resolve_config(nlohmann::json::object(), flags);
      const PreparedData p = prepare_data(c);
      const TrainedModel t = train_model(c, p.train);
      const Tensor x = p.scaler ? p.scaler->apply(p.test.rows) : p.test.rows;
      const AnomalyReport r = score_dataset(x, t.model);
      f1[size == 3] = evaluate_scores(r.scores, p.test.labels, std::nullopt, std::nullopt).at_threshold.f1;
    }
    wins += f1[1] >= f1[0];
    detail += (detail.empty() ? "" : ", ") + fmt(f1[1], 4) + " vs " + fmt(f1[0], 4);
  }
  return verdict(wins >= 2, std::to_string(wins) + "/3 seeds with ensemble F1 >= single F1: " + detail);
}

// 9 ------------------------------------------------------------------------

Outcome metric_correctness() {
  std::mt19937_64 rng(4242);
  double worst_auc = 0.0, worst_area = 0.0;
  constexpr std::size_t kInstances = 1000;
  for (std::size_t k = 0; k < kInstances; ++k) {
    const std::size_t n = 2 + rng() % 49;
    const int levels = 1 + static_cast<int>(rng() % 10);
    std::vector<double> s(n);
    std::vector<int> l(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng() % levels) * 0.25;
      l[i] = static_cast<int>(rng() % 2);
    }
    l[0] = 0;
    l[1] = 1;
    std::shuffle(l.begin(), l.end(), rng);
    const double want = oracle::auroc(s, l);
    worst_auc = std::max(worst_auc, std::fabs(auroc(s, l) - want));
    worst_area = std::max(worst_area, std::fabs(roc_curve(s, l).area() - want));
  }
  return verdict(worst_auc <= 1e-12 && worst_area <= 1e-12,
                 std::to_string(kInstances) + " tied instances, max |auroc - pair count| " + fmt(worst_auc, 3) +
                     ", max |ROC area - pair count| " + fmt(worst_area, 3));
}

// 10 -----------------------------------------------------------------------

Outcome determinism() {
  const fs::path root = scratch("determinism");
  nlohmann::json flags = {{"variant", "egbad"},
                          {"generators", 3},
                          {"discriminators", 2},
                          {"seed", 13},
                          {"trainer", {{"max_iter", 100}, {"batch_size", 32}}},
                          {"data", {{"synthetic", {{"kind", "two-moons"}, {"n_normal", 300}, {"n_anomaly", 30}}}}},
                          {"output_dir", (root / "a").string()}};
  const RunConfig first = resolve_config(nlohmann::json::object(), flags);
  std::ostringstream log;
  cmd_train(first, log);
  RunConfig second = config_from_json(read_json_file((root / "a" / kResolvedConfigFile).string()));
  second.output_dir = (root / "b").string();
  cmd_train(second, log);
  for (const char* run : {"a", "b"}) {
    const fs::path d = root / run;
    cmd_score({(d / kCheckpointFile).string(), (d / kTestDataFile).string(), d.string(), "label", ',', std::nullopt},
              log);
  }
  const std::string a = slurp(root / "a" / kScoresFile), b = slurp(root / "b" / kScoresFile);
  const bool ckpt = slurp(root / "a" / kCheckpointFile) == slurp(root / "b" / kCheckpointFile);
  return verdict(!a.empty() && a == b && ckpt, "scores.csv " + std::to_string(a.size()) + " bytes, " +
                                                   (a == b ? "identical" : "different") + "; checkpoint " +
                                                   (ckpt ? "identical" : "different"));
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, gradient_correctness}, {2, critic_theorem},     {3, score_identity}, {4, single_model_reduction},
      {5, update_frequency},     {6, ensemble_benefit},   {7, beta_trend},     {8, kdd_protocol},
      {9, metric_correctness},   {10, determinism}};
  std::vector<int> only;
  for (int k = 1; k < argc; ++k) only.push_back(std::atoi(argv[k]));

  int failures = 0;
  for (const auto& [id, run] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {Status::kFail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* tag = o.status == Status::kPass ? "PASS" : o.status == Status::kFail ? "FAIL" : "SKIP";
    failures += o.status == Status::kFail;
    std::cout << "criterion " << id << ": " << tag << "  " << o.detail << "  [" << fmt(secs, 3) << " s]"
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
