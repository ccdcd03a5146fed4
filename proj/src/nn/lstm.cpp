#include "vilo/nn/lstm.hpp"

#include <cmath>

namespace vilo::nn {

namespace {

inline Scalar sigmoid(Scalar x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

LstmParams::LstmParams(Index input_dim_, Index hidden_dim_)
    : input_dim(input_dim_), hidden_dim(hidden_dim_) {
    require_dim(input_dim > 0 && hidden_dim > 0, "lstm: dims must be positive");
    w_input = Mat::Zero(4 * hidden_dim, input_dim);
    w_hidden = Mat::Zero(4 * hidden_dim, hidden_dim);
    bias = Vec::Zero(4 * hidden_dim);
}

void LstmParams::init(std::mt19937_64& rng) {
    const Scalar bound = 1.0 / std::sqrt(static_cast<Scalar>(hidden_dim));
    std::uniform_real_distribution<Scalar> dist(-bound, bound);
    for (Index i = 0; i < w_input.size(); ++i) w_input.data()[i] = dist(rng);
    for (Index i = 0; i < w_hidden.size(); ++i) w_hidden.data()[i] = dist(rng);
    bias.setZero();
    // Forget-gate bias 1.0 keeps early gradients alive on long sequences.
    bias.segment(hidden_dim, hidden_dim).setConstant(1.0);
}

Mat lstm_forward(const LstmParams& params, const Mat& input, LstmCache& cache) {
    const Index T = input.rows();
    const Index D = params.input_dim;
    const Index H = params.hidden_dim;
    require_dim(T >= 1, "lstm_forward: time axis empty");
    require_dim(input.cols() == D, "lstm_forward: input feature axis != input_dim");

    cache.input = input;
    cache.gate_i.resize(T, H);
    cache.gate_f.resize(T, H);
    cache.gate_g.resize(T, H);
    cache.gate_o.resize(T, H);
    cache.cell.resize(T, H);
    cache.cell_tanh.resize(T, H);
    cache.hidden.resize(T, H);

    Vec h = Vec::Zero(H);
    Vec c = Vec::Zero(H);
    Vec z(4 * H);
    for (Index t = 0; t < T; ++t) {
        z.noalias() = params.w_input * input.row(t).transpose();
        z.noalias() += params.w_hidden * h;
        z += params.bias;
        for (Index j = 0; j < H; ++j) {
            const Scalar gi = sigmoid(z[j]);
            const Scalar gf = sigmoid(z[H + j]);
            const Scalar gg = std::tanh(z[2 * H + j]);
            const Scalar go = sigmoid(z[3 * H + j]);
            const Scalar cc = gf * c[j] + gi * gg;
            const Scalar ct = std::tanh(cc);
            cache.gate_i(t, j) = gi;
            cache.gate_f(t, j) = gf;
            cache.gate_g(t, j) = gg;
            cache.gate_o(t, j) = go;
            cache.cell(t, j) = cc;
            cache.cell_tanh(t, j) = ct;
            c[j] = cc;
            h[j] = go * ct;
            cache.hidden(t, j) = h[j];
        }
    }
    return cache.hidden;
}

Mat lstm_backward(const LstmParams& params, const LstmCache& cache,
                  const Mat& hidden_grad, LstmGrads& out) {
    const Index T = cache.input.rows();
    const Index H = params.hidden_dim;
    require_dim(hidden_grad.rows() == T && hidden_grad.cols() == H,
                "lstm_backward: hidden_grad shape mismatch");

    if (out.w_input.size() == 0) {
        out.w_input = Mat::Zero(params.w_input.rows(), params.w_input.cols());
        out.w_hidden = Mat::Zero(params.w_hidden.rows(), params.w_hidden.cols());
        out.bias = Vec::Zero(params.bias.size());
    }

    Mat input_grad = Mat::Zero(T, params.input_dim);
    Vec dh_next = Vec::Zero(H);
    Vec dc_next = Vec::Zero(H);
    Vec dz(4 * H);
    for (Index t = T - 1; t >= 0; --t) {
        for (Index j = 0; j < H; ++j) {
            const Scalar dh = hidden_grad(t, j) + dh_next[j];
            const Scalar go = cache.gate_o(t, j);
            const Scalar ct = cache.cell_tanh(t, j);
            const Scalar dc = dh * go * (1.0 - ct * ct) + dc_next[j];
            const Scalar gi = cache.gate_i(t, j);
            const Scalar gf = cache.gate_f(t, j);
            const Scalar gg = cache.gate_g(t, j);
            const Scalar c_prev = (t > 0) ? cache.cell(t - 1, j) : 0.0;
            dz[j] = dc * gg * gi * (1.0 - gi);
            dz[H + j] = dc * c_prev * gf * (1.0 - gf);
            dz[2 * H + j] = dc * gi * (1.0 - gg * gg);
            dz[3 * H + j] = dh * ct * go * (1.0 - go);
            dc_next[j] = dc * gf;
        }
        out.w_input.noalias() += dz * cache.input.row(t);
        if (t > 0) out.w_hidden.noalias() += dz * cache.hidden.row(t - 1);
        out.bias += dz;
        input_grad.row(t).noalias() = (params.w_input.transpose() * dz).transpose();
        dh_next.noalias() = params.w_hidden.transpose() * dz;
    }
    return input_grad;
}

}  // namespace vilo::nn
