#include "nkma/nn.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

namespace nkma::nn {

namespace {

constexpr double kLogvarClamp = 10.0;
constexpr double kProbEps = 1e-7;

DenseLayer make_dense(std::size_t out, std::size_t in, Rng& rng) {
    DenseLayer layer;
    layer.weights.resize(out, in);
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
        for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
            layer.weights(r, c) = (2.0 * rng.unit_real() - 1.0) * limit;
        }
    }
    layer.biases = Matrix::Zero(out, 1);
    return layer;
}

BatchNormLayer make_batchnorm(std::size_t features) {
    BatchNormLayer layer;
    layer.gamma = Matrix::Ones(features, 1);
    layer.beta = Matrix::Zero(features, 1);
    layer.running_mean = Matrix::Zero(features, 1);
    layer.running_var = Matrix::Ones(features, 1);
    return layer;
}

Matrix dense_forward(const DenseLayer& layer, const Matrix& x) {
    return (x * layer.weights.transpose()).rowwise() +
           layer.biases.col(0).transpose();
}

/// dY -> (dW, db) accumulated into grads; returns dX.
Matrix dense_backward(const DenseLayer& layer, const Matrix& x,
                      const Matrix& d_out, Matrix& d_weights,
                      Matrix& d_biases) {
    d_weights = d_out.transpose() * x;
    d_biases = d_out.colwise().sum().transpose();
    return d_out * layer.weights;
}

Matrix bn_forward(BatchNormLayer& layer, const Matrix& x, Mode mode,
                  BatchNormCache& cache) {
    const auto gamma = layer.gamma.col(0).transpose().array();
    const auto beta = layer.beta.col(0).transpose().array();
    if (mode == Mode::Inference) {
        const auto mean = layer.running_mean.col(0).transpose().array();
        const auto inv_std =
            (layer.running_var.col(0).transpose().array() + layer.epsilon)
                .sqrt()
                .inverse();
        cache.normalized =
            ((x.rowwise() - layer.running_mean.col(0).transpose()).array()
                 .rowwise() *
             inv_std)
                .matrix();
        cache.inv_std = inv_std.transpose().matrix();
        (void)mean;
    } else {
        const double batch = static_cast<double>(x.rows());
        Eigen::RowVectorXd mean = x.colwise().mean();
        Eigen::RowVectorXd var =
            (x.rowwise() - mean).array().square().colwise().sum() / batch;
        Eigen::RowVectorXd inv_std =
            (var.array() + layer.epsilon).sqrt().inverse();
        cache.normalized =
            ((x.rowwise() - mean).array().rowwise() * inv_std.array()).matrix();
        cache.inv_std = inv_std.transpose();
        layer.running_mean =
            (1.0 - layer.momentum) * layer.running_mean.array() +
            layer.momentum * mean.transpose().array();
        layer.running_var =
            (1.0 - layer.momentum) * layer.running_var.array() +
            layer.momentum * var.transpose().array();
    }
    return ((cache.normalized.array().rowwise() * gamma).rowwise() + beta)
        .matrix();
}

/// Training-mode batchnorm backward from the cached normalization.
Matrix bn_backward(const BatchNormLayer& layer, const BatchNormCache& cache,
                   const Matrix& d_out, Matrix& d_gamma, Matrix& d_beta) {
    const double batch = static_cast<double>(d_out.rows());
    d_gamma = (d_out.array() * cache.normalized.array())
                  .colwise()
                  .sum()
                  .transpose()
                  .matrix();
    d_beta = d_out.colwise().sum().transpose();
    const Eigen::RowVectorXd mean_d = d_out.colwise().sum() / batch;
    const Eigen::RowVectorXd mean_dx =
        (d_out.array() * cache.normalized.array()).colwise().sum() / batch;
    const Eigen::RowVectorXd scale =
        (layer.gamma.col(0).array() * cache.inv_std.col(0).array())
            .transpose();
    return ((((d_out.rowwise() - mean_d).array() -
              cache.normalized.array().rowwise() * mean_dx.array())
                 .rowwise() *
             scale.array()))
        .matrix();
}

Matrix relu(const Matrix& x) { return x.cwiseMax(0.0); }

Matrix sigmoid_clamped(const Matrix& logits) {
    return ((-logits.array()).exp() + 1.0)
        .inverse()
        .max(kProbEps)
        .min(1.0 - kProbEps)
        .matrix();
}

}  // namespace

VaeModel make_vae(const VaeConfig& config, Rng& rng) {
    if (config.input == 0 || config.hidden == 0 || config.latent == 0) {
        throw std::invalid_argument("make_vae: all dimensions must be >= 1");
    }
    VaeModel model;
    model.config = config;
    model.enc_hidden = make_dense(config.hidden, config.input, rng);
    model.enc_bn = make_batchnorm(config.hidden);
    model.enc_mu = make_dense(config.latent, config.hidden, rng);
    model.enc_logvar = make_dense(config.latent, config.hidden, rng);
    model.dec_hidden = make_dense(config.hidden, config.latent, rng);
    model.dec_bn = make_batchnorm(config.hidden);
    model.dec_out = make_dense(config.input, config.hidden, rng);
    return model;
}

ForwardCache forward(VaeModel& model, const Matrix& batch, Mode mode,
                     const Matrix& noise) {
    if (static_cast<std::size_t>(batch.cols()) != model.config.input) {
        throw std::invalid_argument("forward: batch width != model input");
    }
    if (noise.rows() != batch.rows() ||
        static_cast<std::size_t>(noise.cols()) != model.config.latent) {
        throw std::invalid_argument("forward: noise shape mismatch");
    }
    ForwardCache cache;
    cache.mode = mode;
    cache.input = batch;
    cache.noise = noise;

    const Matrix enc_pre = dense_forward(model.enc_hidden, batch);
    const Matrix enc_bn_out = bn_forward(model.enc_bn, enc_pre, mode, cache.enc_bn);
    cache.enc_activation = relu(enc_bn_out);

    cache.mu = dense_forward(model.enc_mu, cache.enc_activation);
    cache.logvar_raw = dense_forward(model.enc_logvar, cache.enc_activation);
    cache.logvar =
        cache.logvar_raw.array().max(-kLogvarClamp).min(kLogvarClamp).matrix();

    cache.latent =
        (cache.mu.array() +
         (cache.logvar.array() / 2.0).exp() * noise.array())
            .matrix();

    const Matrix dec_pre = dense_forward(model.dec_hidden, cache.latent);
    const Matrix dec_bn_out = bn_forward(model.dec_bn, dec_pre, mode, cache.dec_bn);
    cache.dec_activation = relu(dec_bn_out);
    cache.reconstruction =
        sigmoid_clamped(dense_forward(model.dec_out, cache.dec_activation));
    return cache;
}

LossParts loss(const Matrix& reconstruction, const Matrix& batch,
               const Matrix& mu, const Matrix& logvar) {
    if (reconstruction.rows() != batch.rows() ||
        reconstruction.cols() != batch.cols() || mu.rows() != batch.rows() ||
        mu.rows() != logvar.rows() || mu.cols() != logvar.cols()) {
        throw std::invalid_argument("loss: shape mismatch");
    }
    const double batch_size = static_cast<double>(batch.rows());
    const auto p =
        reconstruction.array().max(kProbEps).min(1.0 - kProbEps);
    LossParts parts;
    parts.bce = -(batch.array() * p.log() +
                  (1.0 - batch.array()) * (1.0 - p).log())
                     .sum() /
                batch_size;
    parts.kl = -0.5 *
               (1.0 + logvar.array() - mu.array().square() -
                logvar.array().exp())
                   .sum() /
               batch_size;
    parts.total = parts.bce + parts.kl;
    return parts;
}

VaeGradients backward(const VaeModel& model, const ForwardCache& cache) {
    VaeGradients g;
    const double batch_size = static_cast<double>(cache.input.rows());

    // BCE through the sigmoid collapses to (p - x); zero where the output
    // clamp is active.
    const auto p = cache.reconstruction.array();
    const auto unclamped =
        (p > kProbEps && p < 1.0 - kProbEps).cast<double>();
    const Matrix d_logits =
        ((p - cache.input.array()) * unclamped / batch_size).matrix();

    Matrix d_dec_act = dense_backward(model.dec_out, cache.dec_activation,
                                      d_logits, g.dec_out_w, g.dec_out_b);
    d_dec_act.array() *= (cache.dec_activation.array() > 0.0).cast<double>();
    const Matrix d_dec_pre =
        bn_backward(model.dec_bn, cache.dec_bn, d_dec_act, g.dec_bn_gamma,
                    g.dec_bn_beta);
    Matrix d_latent = dense_backward(model.dec_hidden, cache.latent, d_dec_pre,
                                     g.dec_hidden_w, g.dec_hidden_b);

    // Reparameterization z = mu + exp(logvar/2) * noise, plus the KL terms.
    const auto sigma = (cache.logvar.array() / 2.0).exp();
    Matrix d_mu = d_latent + (cache.mu / batch_size);
    Matrix d_logvar =
        (d_latent.array() * cache.noise.array() * sigma * 0.5 +
         (cache.logvar.array().exp() - 1.0) * (0.5 / batch_size))
            .matrix();
    const auto in_range = (cache.logvar_raw.array() > -kLogvarClamp &&
                           cache.logvar_raw.array() < kLogvarClamp)
                              .cast<double>();
    d_logvar.array() *= in_range;

    Matrix d_enc_act = dense_backward(model.enc_mu, cache.enc_activation, d_mu,
                                      g.enc_mu_w, g.enc_mu_b);
    d_enc_act += dense_backward(model.enc_logvar, cache.enc_activation,
                                d_logvar, g.enc_logvar_w, g.enc_logvar_b);
    d_enc_act.array() *= (cache.enc_activation.array() > 0.0).cast<double>();
    const Matrix d_enc_pre =
        bn_backward(model.enc_bn, cache.enc_bn, d_enc_act, g.enc_bn_gamma,
                    g.enc_bn_beta);
    Matrix unused_w, unused_b;
    dense_backward(model.enc_hidden, cache.input, d_enc_pre, g.enc_hidden_w,
                   g.enc_hidden_b);
    return g;
}

std::vector<Matrix*> trainable_parameters(VaeModel& m) {
    return {&m.enc_hidden.weights, &m.enc_hidden.biases,
            &m.enc_bn.gamma,       &m.enc_bn.beta,
            &m.enc_mu.weights,     &m.enc_mu.biases,
            &m.enc_logvar.weights, &m.enc_logvar.biases,
            &m.dec_hidden.weights, &m.dec_hidden.biases,
            &m.dec_bn.gamma,       &m.dec_bn.beta,
            &m.dec_out.weights,    &m.dec_out.biases};
}

std::vector<const Matrix*> gradient_tensors(const VaeGradients& g) {
    return {&g.enc_hidden_w, &g.enc_hidden_b, &g.enc_bn_gamma, &g.enc_bn_beta,
            &g.enc_mu_w,     &g.enc_mu_b,     &g.enc_logvar_w, &g.enc_logvar_b,
            &g.dec_hidden_w, &g.dec_hidden_b, &g.dec_bn_gamma, &g.dec_bn_beta,
            &g.dec_out_w,    &g.dec_out_b};
}

NadamState make_nadam(const VaeModel& model, const NadamConfig& config) {
    NadamState state;
    state.config = config;
    auto params = trainable_parameters(const_cast<VaeModel&>(model));
    for (const Matrix* p : params) {
        state.first_moment.push_back(Matrix::Zero(p->rows(), p->cols()));
        state.second_moment.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
    return state;
}

void nadam_step(NadamState& state, VaeModel& model,
                const VaeGradients& grads) {
    auto params = trainable_parameters(model);
    auto gs = gradient_tensors(grads);
    if (params.size() != state.first_moment.size()) {
        throw std::invalid_argument("nadam_step: state does not match model");
    }
    ++state.step_count;
    const auto& c = state.config;
    const double t = static_cast<double>(state.step_count);
    const double bias1 = 1.0 - std::pow(c.beta1, t);
    const double bias2 = 1.0 - std::pow(c.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        Matrix& m = state.first_moment[i];
        Matrix& v = state.second_moment[i];
        const auto grad = gs[i]->array();
        m = c.beta1 * m.array() + (1.0 - c.beta1) * grad;
        v = c.beta2 * v.array() + (1.0 - c.beta2) * grad.square();
        const auto lookahead =
            (c.beta1 * m.array() + (1.0 - c.beta1) * grad) / bias1;
        params[i]->array() -=
            c.alpha * lookahead / ((v.array() / bias2).sqrt() + c.epsilon);
    }
}

void train(VaeModel& model, const Matrix& data, const TrainConfig& config,
           Rng& rng) {
    if (static_cast<std::size_t>(data.cols()) != model.config.input) {
        throw std::invalid_argument("train: data width != model input");
    }
    if (config.batch_size == 0 || config.epochs == 0) {
        throw std::invalid_argument("train: batch_size and epochs must be >= 1");
    }
    NadamState optimizer = make_nadam(model, {.alpha = config.learning_rate});
    const std::size_t rows = static_cast<std::size_t>(data.rows());
    std::vector<std::size_t> perm(rows);
    for (std::size_t i = 0; i < rows; ++i) perm[i] = i;

    const std::size_t latent = model.config.latent;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(perm);
        for (std::size_t begin = 0; begin < rows; begin += config.batch_size) {
            const std::size_t count =
                std::min(config.batch_size, rows - begin);
            Matrix batch(count, data.cols());
            for (std::size_t r = 0; r < count; ++r) {
                batch.row(r) = data.row(perm[begin + r]);
            }
            Matrix noise(count, latent);
            for (std::size_t r = 0; r < count; ++r) {
                for (std::size_t c = 0; c < latent; ++c) {
                    noise(r, c) = rng.standard_normal();
                }
            }
            const ForwardCache cache =
                forward(model, batch, Mode::Training, noise);
            const VaeGradients grads = backward(model, cache);
            nadam_step(optimizer, model, grads);
        }
    }
}

std::pair<Matrix, Matrix> encode(VaeModel& model, const Matrix& batch) {
    BatchNormCache bn_cache;
    const Matrix pre = dense_forward(model.enc_hidden, batch);
    const Matrix act =
        relu(bn_forward(model.enc_bn, pre, Mode::Inference, bn_cache));
    Matrix mu = dense_forward(model.enc_mu, act);
    Matrix logvar = dense_forward(model.enc_logvar, act)
                        .array()
                        .max(-kLogvarClamp)
                        .min(kLogvarClamp)
                        .matrix();
    return {std::move(mu), std::move(logvar)};
}

Matrix decode(VaeModel& model, const Matrix& latent) {
    BatchNormCache bn_cache;
    const Matrix pre = dense_forward(model.dec_hidden, latent);
    const Matrix act =
        relu(bn_forward(model.dec_bn, pre, Mode::Inference, bn_cache));
    return sigmoid_clamped(dense_forward(model.dec_out, act));
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json bn_to_json(const BatchNormLayer& bn) {
    return {{"gamma", matrix_to_json(bn.gamma)},
            {"beta", matrix_to_json(bn.beta)},
            {"running_mean", matrix_to_json(bn.running_mean)},
            {"running_var", matrix_to_json(bn.running_var)},
            {"momentum", bn.momentum},
            {"epsilon", bn.epsilon}};
}

nlohmann::json dense_to_json(const DenseLayer& d) {
    return {{"weights", matrix_to_json(d.weights)},
            {"biases", matrix_to_json(d.biases)}};
}

}  // namespace

void save_checkpoint(const VaeModel& model, const NadamState* optimizer,
                     std::ostream& out) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["config"] = {{"input", model.config.input},
                   {"hidden", model.config.hidden},
                   {"latent", model.config.latent}};
    j["enc_hidden"] = dense_to_json(model.enc_hidden);
    j["enc_bn"] = bn_to_json(model.enc_bn);
    j["enc_mu"] = dense_to_json(model.enc_mu);
    j["enc_logvar"] = dense_to_json(model.enc_logvar);
    j["dec_hidden"] = dense_to_json(model.dec_hidden);
    j["dec_bn"] = bn_to_json(model.dec_bn);
    j["dec_out"] = dense_to_json(model.dec_out);
    if (optimizer != nullptr) {
        nlohmann::json opt;
        opt["step_count"] = optimizer->step_count;
        opt["alpha"] = optimizer->config.alpha;
        opt["beta1"] = optimizer->config.beta1;
        opt["beta2"] = optimizer->config.beta2;
        opt["epsilon"] = optimizer->config.epsilon;
        nlohmann::json m1 = nlohmann::json::array();
        nlohmann::json m2 = nlohmann::json::array();
        for (const Matrix& m : optimizer->first_moment)
            m1.push_back(matrix_to_json(m));
        for (const Matrix& m : optimizer->second_moment)
            m2.push_back(matrix_to_json(m));
        opt["first_moment"] = std::move(m1);
        opt["second_moment"] = std::move(m2);
        j["optimizer"] = std::move(opt);
    }
    out << j.dump() << '\n';
}

}  // namespace nkma::nn
