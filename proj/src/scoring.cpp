#include "ganen/scoring.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "ganen/error.hpp"

namespace ganen {
namespace {

std::vector<double> row_power_norms(const Tensor& a, const Tensor& b, int ell) {
  const std::size_t n = a.rows(), c = a.cols();
  std::vector<double> out(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      const double d = a[r * c + k] - b[r * c + k];
      s += ell == 1 ? std::fabs(d) : d * d;
    }
    out[r] = s;
  }
  return out;
}

void check_samples(const Tensor& samples, const GeneratorBundle& gen) {
  if (samples.rank() != 2) throw ShapeError("samples must be a matrix");
  if (samples.cols() != gen.data_width()) {
    throw ShapeError("samples have width " + std::to_string(samples.cols()) + ", model expects " +
                     std::to_string(gen.data_width()));
  }
}

// Reconstruction-side quantities of one generator, shared across discriminators.
struct GeneratorPass {
  Tensor reconstruction;
  Tensor encoding;
  Tensor reconstruction_encoding;
  std::vector<double> recon_term;
  std::vector<double> encoding_term;
};

GeneratorPass generator_pass(const Tensor& x, const GeneratorBundle& gen, const LossWeights& w,
                             Variant variant) {
  GeneratorPass p;
  Tape tape;
  Var xv = tape.constant(x);
  Var z = encode(tape, xv, gen, false);
  Var x_rec = decode(tape, z, gen, false);
  p.encoding = tape.value(z);
  p.reconstruction = tape.value(x_rec);
  if (variant == Variant::kGanomaly) {
    Var z_rec = encode_second(tape, x_rec, gen, false);
    p.encoding_term = row_power_norms(p.encoding, tape.value(z_rec), w.ell);
  } else {
    p.recon_term = row_power_norms(x, p.reconstruction, w.ell);
    if (variant == Variant::kEgbad) p.reconstruction_encoding = encode(p.reconstruction, gen);
  }
  return p;
}

std::vector<double> combine(const Tensor& x, const GeneratorPass& p, const GeneratorBundle& gen,
                            const DiscriminatorBundle& disc, const LossWeights& w, Variant variant) {
  if (variant == Variant::kGanomaly) return p.encoding_term;
  check_pair(variant, gen, disc);
  Tensor real_in = x;
  Tensor fake_in = p.reconstruction;
  if (variant == Variant::kEgbad) {
    real_in = concat_sample_encoding(x, p.encoding);
    fake_in = concat_sample_encoding(p.reconstruction, p.reconstruction_encoding);
  }
  const Tensor h_real = discriminate(real_in, disc).second;
  const Tensor h_fake = discriminate(fake_in, disc).second;
  std::vector<double> d_term = row_power_norms(h_real, h_fake, w.ell);
  std::vector<double> out(p.recon_term.size());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = p.recon_term[r] + w.beta * d_term[r];
  return out;
}

}  // namespace

std::vector<double> pair_scores(const Tensor& samples, const GeneratorBundle& gen,
                                const DiscriminatorBundle& disc, const LossWeights& weights,
                                Variant variant) {
  check_samples(samples, gen);
  check_pair(variant, gen, disc);
  return combine(samples, generator_pass(samples, gen, weights, variant), gen, disc, weights, variant);
}

double pair_score(const Tensor& x, const GeneratorBundle& gen, const DiscriminatorBundle& disc,
                  const LossWeights& weights, Variant variant) {
  if (x.rank() != 2 || x.rows() != 1) throw ShapeError("pair_score takes a single row");
  return pair_scores(x, gen, disc, weights, variant).front();
}

double ensemble_score(const Tensor& x, const EnsembleModel& model) {
  double total = 0.0;
  for (const auto& gen : model.generators) {
    for (const auto& disc : model.discriminators) {
      total += pair_score(x, gen, disc, model.weights, model.variant);
    }
  }
  return total / static_cast<double>(model.num_generators() * model.num_discriminators());
}

AnomalyReport score_dataset(const Tensor& samples, const EnsembleModel& model, double beta,
                            std::uint64_t seed) {
  model.validate();
  if (samples.rank() != 2 || samples.rows() == 0) throw ValidationError("nothing to score");
  check_samples(samples, model.generators.front());
  AnomalyReport report;
  report.variant = model.variant;
  report.weights = model.weights;
  report.weights.beta = beta;
  report.num_generators = model.num_generators();
  report.num_discriminators = model.num_discriminators();
  report.seed = seed;
  const std::size_t n = samples.rows();
  std::vector<double> totals(n, 0.0);
  for (const auto& gen : model.generators) {
    const GeneratorPass pass = generator_pass(samples, gen, report.weights, model.variant);
    for (const auto& disc : model.discriminators) {
      auto row = combine(samples, pass, gen, disc, report.weights, model.variant);
      for (std::size_t r = 0; r < n; ++r) totals[r] += row[r];
      report.pair_scores.push_back(std::move(row));
    }
  }
  const double pairs = static_cast<double>(report.pair_scores.size());
  report.scores.resize(n);
  for (std::size_t r = 0; r < n; ++r) report.scores[r] = totals[r] / pairs;
  return report;
}

AnomalyReport score_dataset(const Tensor& samples, const EnsembleModel& model, std::uint64_t seed) {
  return score_dataset(samples, model, model.weights.beta, seed);
}

void write_report_csv(std::ostream& out, const AnomalyReport& report, const std::vector<int>* labels) {
  if (labels && labels->size() != report.scores.size()) {
    throw ShapeError("label count does not match report rows");
  }
  out << "sample_index,label,score";
  for (std::size_t i = 0; i < report.num_generators; ++i) {
    for (std::size_t j = 0; j < report.num_discriminators; ++j) out << ",pair_" << i << '_' << j;
  }
  out << '\n' << std::setprecision(17);
  for (std::size_t r = 0; r < report.scores.size(); ++r) {
    out << r << ',';
    if (labels) out << (*labels)[r];
    out << ',' << report.scores[r];
    for (const auto& p : report.pair_scores) out << ',' << p[r];
    out << '\n';
  }
}

}  // namespace ganen
