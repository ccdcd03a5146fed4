#pragma once

#include <random>

#include "vilo/types.hpp"

namespace vilo::nn {

// Standard LSTM parameterization. Gate rows are stacked [input; forget;
// candidate; output], each block hidden_dim rows.
struct LstmParams {
    Index input_dim = 0;
    Index hidden_dim = 0;
    Mat w_input;   // 4H x D
    Mat w_hidden;  // 4H x H
    Vec bias;      // 4H

    LstmParams() = default;
    LstmParams(Index input_dim, Index hidden_dim);

    // Uniform +-1/sqrt(hidden_dim) weights, forget-gate bias 1.0, rest 0.
    void init(std::mt19937_64& rng);
};

struct LstmCache {
    Mat input;        // T x D
    Mat gate_i, gate_f, gate_g, gate_o;  // T x H each
    Mat cell;         // T x H
    Mat cell_tanh;    // T x H
    Mat hidden;       // T x H
};

struct LstmGrads {
    Mat w_input;
    Mat w_hidden;
    Vec bias;
};

// Runs the full sequence; row t of the result is the hidden state after
// consuming inputs 0..t. Cache holds everything backward needs.
Mat lstm_forward(const LstmParams& params, const Mat& input, LstmCache& cache);

// Backprop through time. hidden_grad is dLoss/dHidden, T x H. Returns the
// gradient w.r.t. the input sequence; parameter grads accumulate into out.
Mat lstm_backward(const LstmParams& params, const LstmCache& cache,
                  const Mat& hidden_grad, LstmGrads& out);

}  // namespace vilo::nn
