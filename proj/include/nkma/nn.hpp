#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "nkma/rng.hpp"

namespace nkma::nn {

/// Rows are batch samples, columns are features.
using Matrix = Eigen::MatrixXd;

enum class Mode { Training, Inference };

struct DenseLayer {
    Matrix weights;  // out x in
    Matrix biases;   // out x 1
};

struct BatchNormLayer {
    Matrix gamma;         // features x 1
    Matrix beta;          // features x 1
    Matrix running_mean;  // features x 1
    Matrix running_var;   // features x 1
    double momentum = 0.1;
    double epsilon = 1e-5;
};

struct VaeConfig {
    std::size_t input = 0;    // genome length N
    std::size_t hidden = 4096;
    std::size_t latent = 32;  // d_latent
};

/// Encoder: input -> dense -> batchnorm -> ReLU -> {mu head, logvar head}.
/// Decoder: latent -> dense -> batchnorm -> ReLU -> dense -> sigmoid.
/// logvar is clamped to [-10, 10] before exponentiation.
struct VaeModel {
    VaeConfig config;
    DenseLayer enc_hidden;
    BatchNormLayer enc_bn;
    DenseLayer enc_mu;
    DenseLayer enc_logvar;
    DenseLayer dec_hidden;
    BatchNormLayer dec_bn;
    DenseLayer dec_out;
};

/// Glorot-uniform weights, zero biases, gamma=1, beta=0, running stats
/// at the standard-normal prior.
VaeModel make_vae(const VaeConfig& config, Rng& rng);

struct BatchNormCache {
    Matrix normalized;  // batch x features, pre scale/shift
    Matrix inv_std;     // features x 1
};

/// Everything the backward pass needs from one forward pass.
struct ForwardCache {
    Mode mode = Mode::Training;
    Matrix input;            // B x N
    Matrix noise;            // B x d_latent
    BatchNormCache enc_bn;
    Matrix enc_activation;   // B x hidden, post ReLU
    Matrix mu;               // B x d_latent
    Matrix logvar_raw;       // B x d_latent, pre clamp
    Matrix logvar;           // B x d_latent, clamped
    Matrix latent;           // B x d_latent, z = mu + exp(logvar/2) * noise
    BatchNormCache dec_bn;
    Matrix dec_activation;   // B x hidden
    Matrix reconstruction;   // B x N, strictly inside (0,1)
};

/// One VAE forward pass with reparameterized latent. In training mode
/// batchnorm uses batch statistics and updates the running statistics;
/// in inference mode it uses the running statistics only.
ForwardCache forward(VaeModel& model, const Matrix& batch, Mode mode,
                     const Matrix& noise);

struct LossParts {
    double total = 0.0;
    double bce = 0.0;  // summed over coordinates, averaged over the batch
    double kl = 0.0;   // averaged over the batch; always >= 0
};

LossParts loss(const Matrix& reconstruction, const Matrix& batch,
               const Matrix& mu, const Matrix& logvar);

/// Gradients in the same tensor layout as the model parameters.
struct VaeGradients {
    Matrix enc_hidden_w, enc_hidden_b;
    Matrix enc_bn_gamma, enc_bn_beta;
    Matrix enc_mu_w, enc_mu_b;
    Matrix enc_logvar_w, enc_logvar_b;
    Matrix dec_hidden_w, dec_hidden_b;
    Matrix dec_bn_gamma, dec_bn_beta;
    Matrix dec_out_w, dec_out_b;
};

/// Exact gradient of loss(...).total w.r.t. every trainable parameter,
/// for the computation recorded in `cache` (training-mode batchnorm).
VaeGradients backward(const VaeModel& model, const ForwardCache& cache);

/// Trainable tensors in a fixed order, aligned between model and
/// gradients (running statistics excluded).
std::vector<Matrix*> trainable_parameters(VaeModel& model);
std::vector<const Matrix*> gradient_tensors(const VaeGradients& grads);

struct NadamConfig {
    double alpha = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct NadamState {
    NadamConfig config;
    std::vector<Matrix> first_moment;
    std::vector<Matrix> second_moment;
    std::uint64_t step_count = 0;
};

NadamState make_nadam(const VaeModel& model, const NadamConfig& config = {});

/// Nadam update: bias-corrected moments with Nesterov-style lookahead on
/// the first moment.
void nadam_step(NadamState& state, VaeModel& model, const VaeGradients& grads);

struct TrainConfig {
    std::size_t batch_size = 64;
    std::size_t epochs = 500;
    double learning_rate = 0.001;
};

/// Minibatch training on the given data (rows = individuals, entries in
/// {0,1}). Rows are reshuffled each epoch; a short final batch is
/// included. Deterministic for a fixed rng state.
void train(VaeModel& model, const Matrix& data, const TrainConfig& config,
           Rng& rng);

/// Inference-mode encoder: returns (mu, logvar) for the given rows.
std::pair<Matrix, Matrix> encode(VaeModel& model, const Matrix& batch);

/// Inference-mode decoder: latent rows -> probability rows in (0,1).
Matrix decode(VaeModel& model, const Matrix& latent);

/// Debug checkpoint: parameters, running stats and optimizer state.
void save_checkpoint(const VaeModel& model, const NadamState* optimizer,
                     std::ostream& out);

}  // namespace nkma::nn
