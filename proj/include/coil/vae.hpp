#ifndef COIL_VAE_HPP
#define COIL_VAE_HPP

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "coil/core.hpp"
#include "coil/rng.hpp"

namespace coil {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Small dense VAE: encoder input->hidden (ReLU) with linear mu/logvar heads,
// decoder latent->hidden (ReLU) -> input with sigmoid output. The latent
// dimension equals the input dimension; the point is remapping, not
// compression.
struct VaeArchitecture {
  int input_dim = 1;
  int latent_dim = 1;
  int hidden_dim = 32;

  void validate() const {
    if (input_dim < 1 || latent_dim < 1 || hidden_dim < 1)
      throw std::invalid_argument("VAE dimensions must be >= 1");
  }
};

struct TrainConfig {
  int epochs = 200;
  double learning_rate = 0.001;
  double kld_weight = 1.0;
  int batch_size = 128;
  int repeats = 10;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  void validate() const {
    if (epochs < 1 || batch_size < 1 || repeats < 1)
      throw std::invalid_argument("epochs, batch_size, repeats must be >= 1");
    if (!(learning_rate > 0.0) && learning_rate != 0.0)
      throw std::invalid_argument("learning_rate must be >= 0");
    if (kld_weight < 0.0)
      throw std::invalid_argument("kld_weight must be >= 0");
  }
};

struct VaeModel {
  VaeArchitecture arch;
  MatrixXd w_enc;     // hidden x input
  VectorXd b_enc;     // hidden
  MatrixXd w_mu;      // latent x hidden
  VectorXd b_mu;      // latent
  MatrixXd w_logvar;  // latent x hidden
  VectorXd b_logvar;  // latent
  MatrixXd w_dec;     // hidden x latent
  VectorXd b_dec;     // hidden
  MatrixXd w_out;     // input x hidden
  VectorXd b_out;     // input
  double final_loss = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t training_seed = 0;
  int epochs_trained = 0;
};

// Gradients share the parameter shapes.
struct VaeGradients {
  MatrixXd w_enc, w_mu, w_logvar, w_dec, w_out;
  VectorXd b_enc, b_mu, b_logvar, b_dec, b_out;
};

namespace detail {

// Fixed parameter order; weight init, Adam updates and the finite-difference
// sweep all walk parameters in this order.
template <typename Model, typename F>
void for_each_parameter(Model& model, F&& f) {
  f(model.w_enc);
  f(model.b_enc);
  f(model.w_mu);
  f(model.b_mu);
  f(model.w_logvar);
  f(model.b_logvar);
  f(model.w_dec);
  f(model.b_dec);
  f(model.w_out);
  f(model.b_out);
}

template <typename ModelA, typename ModelB, typename F>
void for_each_parameter_pair(ModelA& a, ModelB& b, F&& f) {
  f(a.w_enc, b.w_enc);
  f(a.b_enc, b.b_enc);
  f(a.w_mu, b.w_mu);
  f(a.b_mu, b.b_mu);
  f(a.w_logvar, b.w_logvar);
  f(a.b_logvar, b.b_logvar);
  f(a.w_dec, b.w_dec);
  f(a.b_dec, b.b_dec);
  f(a.w_out, b.w_out);
  f(a.b_out, b.b_out);
}

inline MatrixXd relu(const MatrixXd& a) { return a.cwiseMax(0.0); }

inline MatrixXd relu_mask(const MatrixXd& a) {
  return (a.array() > 0.0).cast<double>().matrix();
}

inline MatrixXd sigmoid(const MatrixXd& a) {
  return (1.0 / (1.0 + (-a.array()).exp())).matrix();
}

// Cross-entropy of a sigmoid output against targets in [0,1], evaluated from
// the logit so saturated outputs stay finite:
// max(a,0) - a*u + log(1 + exp(-|a|)).
inline double bce_with_logits(const MatrixXd& logits, const MatrixXd& targets) {
  return (logits.array().max(0.0) - logits.array() * targets.array() +
          (1.0 + (-logits.array().abs()).exp()).log())
      .sum();
}

}  // namespace detail

// Maps a phenotype onto the unit cube for the sigmoid/BCE pipeline.
inline VectorXd normalize_for_vae(const Phenotype& x, const ProblemSpec& spec) {
  if (static_cast<int>(x.size()) != spec.dimension)
    throw std::invalid_argument("phenotype length does not match dimension");
  VectorXd u(spec.dimension);
  for (int i = 0; i < spec.dimension; ++i) {
    if (!(x.vars[i] >= spec.var_min && x.vars[i] <= spec.var_max))
      throw std::out_of_range("phenotype component outside variable range");
    u[i] = (x.vars[i] - spec.var_min) / (spec.var_max - spec.var_min);
  }
  return u;
}

inline Phenotype denormalize_from_vae(const VectorXd& u,
                                      const ProblemSpec& spec) {
  if (static_cast<int>(u.size()) != spec.dimension)
    throw std::invalid_argument("vector length does not match dimension");
  Phenotype x;
  x.vars.resize(spec.dimension);
  for (int i = 0; i < spec.dimension; ++i)
    x.vars[i] = spec.var_min + u[i] * (spec.var_max - spec.var_min);
  return x;
}

// Uniform fan-in init, biases zero. Weight matrices are filled row-major in
// the fixed parameter order so a seed pins the exact initial model.
inline VaeModel init_vae(const VaeArchitecture& arch, Rng& rng) {
  arch.validate();
  VaeModel model;
  model.arch = arch;
  const int d = arch.input_dim, l = arch.latent_dim, h = arch.hidden_dim;
  model.w_enc.resize(h, d);
  model.b_enc = VectorXd::Zero(h);
  model.w_mu.resize(l, h);
  model.b_mu = VectorXd::Zero(l);
  model.w_logvar.resize(l, h);
  model.b_logvar = VectorXd::Zero(l);
  model.w_dec.resize(h, l);
  model.b_dec = VectorXd::Zero(h);
  model.w_out.resize(d, h);
  model.b_out = VectorXd::Zero(d);

  auto fill = [&rng](MatrixXd& w) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        w(r, c) = rng.uniform(-bound, bound);
  };
  fill(model.w_enc);
  fill(model.w_mu);
  fill(model.w_logvar);
  fill(model.w_dec);
  fill(model.w_out);
  return model;
}

// Deterministic encoder pass. Batches are column-per-sample matrices.
inline void encode_batch(const VaeModel& model, const MatrixXd& u, MatrixXd& mu,
                         MatrixXd& logvar) {
  if (u.rows() != model.arch.input_dim)
    throw std::invalid_argument("encode: input dimension mismatch");
  const MatrixXd h1 =
      detail::relu((model.w_enc * u).colwise() + model.b_enc);
  mu = (model.w_mu * h1).colwise() + model.b_mu;
  logvar = (model.w_logvar * h1).colwise() + model.b_logvar;
}

inline std::pair<VectorXd, VectorXd> encode(const VaeModel& model,
                                            const VectorXd& u) {
  MatrixXd mu, logvar;
  encode_batch(model, u, mu, logvar);
  return {mu.col(0), logvar.col(0)};
}

// z = mu + exp(logvar / 2) * eps with eps ~ N(0, I).
inline VectorXd reparameterize(const VectorXd& mu, const VectorXd& logvar,
                               Rng& rng) {
  if (mu.size() != logvar.size())
    throw std::invalid_argument("reparameterize: length mismatch");
  VectorXd z(mu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    z[i] = mu[i] + std::exp(0.5 * logvar[i]) * rng.normal();
  return z;
}

inline MatrixXd decode_batch(const VaeModel& model, const MatrixXd& z) {
  if (z.rows() != model.arch.latent_dim)
    throw std::invalid_argument("decode: latent dimension mismatch");
  const MatrixXd h2 =
      detail::relu((model.w_dec * z).colwise() + model.b_dec);
  return detail::sigmoid((model.w_out * h2).colwise() + model.b_out);
}

inline VectorXd decode(const VaeModel& model, const VectorXd& z) {
  return decode_batch(model, z).col(0);
}

struct LossParts {
  double total = 0.0;
  double recon = 0.0;
  double kld = 0.0;
};

namespace detail {

struct ForwardCache {
  MatrixXd u, a1, h1, mu, logvar, noise, z, a2, h2, logits, y;
};

inline ForwardCache forward(const VaeModel& model, const MatrixXd& batch,
                            const MatrixXd& noise) {
  ForwardCache c;
  c.u = batch;
  c.noise = noise;
  c.a1 = (model.w_enc * c.u).colwise() + model.b_enc;
  c.h1 = relu(c.a1);
  c.mu = (model.w_mu * c.h1).colwise() + model.b_mu;
  c.logvar = (model.w_logvar * c.h1).colwise() + model.b_logvar;
  c.z = c.mu + ((0.5 * c.logvar.array()).exp() * noise.array()).matrix();
  c.a2 = (model.w_dec * c.z).colwise() + model.b_dec;
  c.h2 = relu(c.a2);
  c.logits = (model.w_out * c.h2).colwise() + model.b_out;
  c.y = sigmoid(c.logits);
  return c;
}

// Reconstruction summed over batch and components; KL of the diagonal
// Gaussian posterior against the unit normal prior, same reduction.
inline LossParts loss_from_cache(const ForwardCache& c, double kld_weight) {
  LossParts parts;
  parts.recon = bce_with_logits(c.logits, c.u);
  parts.kld = -0.5 * (1.0 + c.logvar.array() - c.mu.array().square() -
                      c.logvar.array().exp())
                         .sum();
  parts.total = parts.recon + kld_weight * parts.kld;
  return parts;
}

inline VaeGradients backward(const VaeModel& model, const ForwardCache& c,
                             double kld_weight) {
  VaeGradients g;
  const MatrixXd d_logits = c.y - c.u;
  g.w_out = d_logits * c.h2.transpose();
  g.b_out = d_logits.rowwise().sum();

  const MatrixXd d_a2 =
      ((model.w_out.transpose() * d_logits).array() * relu_mask(c.a2).array())
          .matrix();
  g.w_dec = d_a2 * c.z.transpose();
  g.b_dec = d_a2.rowwise().sum();

  const MatrixXd d_z = model.w_dec.transpose() * d_a2;
  const MatrixXd d_mu = d_z + kld_weight * c.mu;
  const MatrixXd d_logvar =
      (d_z.array() * c.noise.array() * (0.5 * c.logvar.array()).exp() * 0.5 +
       kld_weight * 0.5 * (c.logvar.array().exp() - 1.0))
          .matrix();
  g.w_mu = d_mu * c.h1.transpose();
  g.b_mu = d_mu.rowwise().sum();
  g.w_logvar = d_logvar * c.h1.transpose();
  g.b_logvar = d_logvar.rowwise().sum();

  const MatrixXd d_a1 = ((model.w_mu.transpose() * d_mu +
                          model.w_logvar.transpose() * d_logvar)
                             .array() *
                         relu_mask(c.a1).array())
                            .matrix();
  g.w_enc = d_a1 * c.u.transpose();
  g.b_enc = d_a1.rowwise().sum();
  return g;
}

inline MatrixXd draw_noise(int rows, int cols, Rng& rng) {
  MatrixXd noise(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) noise(i, j) = rng.normal();
  return noise;
}

}  // namespace detail

// One stochastic evaluation of the training loss on a normalized batch.
inline LossParts loss(const VaeModel& model, const MatrixXd& batch,
                      double kld_weight, Rng& rng) {
  const MatrixXd noise =
      detail::draw_noise(model.arch.latent_dim, static_cast<int>(batch.cols()),
                         rng);
  return detail::loss_from_cache(detail::forward(model, batch, noise),
                                 kld_weight);
}

// Mini-batch Adam over shuffled batches; gradients by exact backprop through
// decoder, reparameterization and encoder. final_loss is the mean per-sample
// training loss over the final epoch. Throws numeric_error on divergence.
inline VaeModel train(const MatrixXd& data, const VaeArchitecture& arch,
                      const TrainConfig& config, std::uint64_t seed) {
  arch.validate();
  config.validate();
  if (data.cols() == 0) throw std::invalid_argument("empty training data");
  if (data.rows() != arch.input_dim)
    throw std::invalid_argument("training data dimension mismatch");

  Rng rng(seed);
  VaeModel model = init_vae(arch, rng);
  model.training_seed = seed;

  VaeGradients m_state, v_state;
  detail::for_each_parameter_pair(model, m_state, [](const auto& p, auto& s) {
    s = std::decay_t<decltype(s)>::Zero(p.rows(), p.cols());
  });
  detail::for_each_parameter_pair(model, v_state, [](const auto& p, auto& s) {
    s = std::decay_t<decltype(s)>::Zero(p.rows(), p.cols());
  });

  const int n = static_cast<int>(data.cols());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;

  long step = 0;
  double epoch_loss_sum = 0.0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (int i = n - 1; i > 0; --i)
      std::swap(order[i],
                order[rng.uniform_index(static_cast<std::size_t>(i) + 1)]);

    epoch_loss_sum = 0.0;
    for (int start = 0; start < n; start += config.batch_size) {
      const int b = std::min(config.batch_size, n - start);
      MatrixXd batch(arch.input_dim, b);
      for (int j = 0; j < b; ++j) batch.col(j) = data.col(order[start + j]);

      const MatrixXd noise = detail::draw_noise(arch.latent_dim, b, rng);
      const auto cache = detail::forward(model, batch, noise);
      const auto parts = detail::loss_from_cache(cache, config.kld_weight);
      if (!std::isfinite(parts.total))
        throw numeric_error("training loss diverged");
      epoch_loss_sum += parts.total;

      const VaeGradients grads =
          detail::backward(model, cache, config.kld_weight);
      ++step;
      const double corr1 = 1.0 - std::pow(config.adam_beta1, step);
      const double corr2 = 1.0 - std::pow(config.adam_beta2, step);
      auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
        m = config.adam_beta1 * m + (1.0 - config.adam_beta1) * grad;
        v = (config.adam_beta2 * v.array() +
             (1.0 - config.adam_beta2) * grad.array().square())
                .matrix();
        param.array() -= config.learning_rate * (m.array() / corr1) /
                         ((v.array() / corr2).sqrt() + config.adam_epsilon);
      };
      update(model.w_enc, grads.w_enc, m_state.w_enc, v_state.w_enc);
      update(model.b_enc, grads.b_enc, m_state.b_enc, v_state.b_enc);
      update(model.w_mu, grads.w_mu, m_state.w_mu, v_state.w_mu);
      update(model.b_mu, grads.b_mu, m_state.b_mu, v_state.b_mu);
      update(model.w_logvar, grads.w_logvar, m_state.w_logvar,
             v_state.w_logvar);
      update(model.b_logvar, grads.b_logvar, m_state.b_logvar,
             v_state.b_logvar);
      update(model.w_dec, grads.w_dec, m_state.w_dec, v_state.w_dec);
      update(model.b_dec, grads.b_dec, m_state.b_dec, v_state.b_dec);
      update(model.w_out, grads.w_out, m_state.w_out, v_state.w_out);
      update(model.b_out, grads.b_out, m_state.b_out, v_state.b_out);
    }
  }
  model.final_loss = epoch_loss_sum / n;
  model.epochs_trained = config.epochs;
  return model;
}

struct TrainSelection {
  VaeModel best;
  int best_index = -1;
  std::vector<double> repeat_losses;       // NaN marks a diverged repeat
  std::vector<std::uint64_t> repeat_seeds;
};

// Trains config.repeats models on derived child seeds and keeps the lowest
// final-epoch loss; ties resolve to the earliest repeat.
inline TrainSelection train_select_best(const MatrixXd& data,
                                        const VaeArchitecture& arch,
                                        const TrainConfig& config,
                                        std::uint64_t seed) {
  TrainSelection selection;
  selection.repeat_losses.resize(config.repeats,
                                 std::numeric_limits<double>::quiet_NaN());
  selection.repeat_seeds.resize(config.repeats);
  for (int i = 0; i < config.repeats; ++i)
    selection.repeat_seeds[i] = derive_seed(seed, i);

  for (int i = 0; i < config.repeats; ++i) {
    VaeModel candidate;
    try {
      candidate = train(data, arch, config, selection.repeat_seeds[i]);
    } catch (const numeric_error&) {
      continue;
    }
    selection.repeat_losses[i] = candidate.final_loss;
    if (selection.best_index < 0 ||
        candidate.final_loss < selection.best.final_loss) {
      selection.best = std::move(candidate);
      selection.best_index = i;
    }
  }
  if (selection.best_index < 0)
    throw numeric_error("every training repeat diverged");
  return selection;
}

// Central finite differences against the analytic gradient, with the
// reparameterization noise held fixed across all evaluations. Returns the
// worst relative disagreement over every parameter.
inline double gradient_check(const VaeModel& model, const MatrixXd& batch,
                             const MatrixXd& noise, double kld_weight = 1.0,
                             double h = 1e-5) {
  VaeGradients analytic = detail::backward(
      model, detail::forward(model, batch, noise), kld_weight);

  VaeModel probe = model;
  double worst = 0.0;
  auto loss_at = [&]() {
    return detail::loss_from_cache(detail::forward(probe, batch, noise),
                                   kld_weight)
        .total;
  };
  detail::for_each_parameter_pair(
      probe, analytic, [&](auto& param, auto& grad) {
        for (Eigen::Index i = 0; i < param.size(); ++i) {
          double* cell = param.data() + i;
          const double saved = *cell;
          *cell = saved + h;
          const double above = loss_at();
          *cell = saved - h;
          const double below = loss_at();
          *cell = saved;
          const double numeric = (above - below) / (2.0 * h);
          const double exact = *(grad.data() + i);
          const double denom =
              std::max(1e-4, std::abs(exact) + std::abs(numeric));
          worst = std::max(worst, std::abs(exact - numeric) / denom);
        }
      });
  return worst;
}

inline double gradient_check(const VaeArchitecture& arch, std::uint64_t seed,
                             int batch_size = 3, double h = 1e-5) {
  Rng rng(seed);
  VaeModel model = init_vae(arch, rng);
  MatrixXd batch(arch.input_dim, batch_size);
  for (int j = 0; j < batch_size; ++j)
    for (int i = 0; i < arch.input_dim; ++i)
      batch(i, j) = rng.uniform(0.05, 0.95);
  const MatrixXd noise = detail::draw_noise(arch.latent_dim, batch_size, rng);
  return gradient_check(model, batch, noise, 1.0, h);
}

}  // namespace coil

#endif

