#pragma once

#include <random>
#include <vector>

#include "vilo/types.hpp"

namespace vilo::nn {

// Valid (no padding) 1D cross-correlation over channel-major sequences.
struct Conv1dParams {
    Index in_channels = 0;
    Index out_channels = 0;
    Index kernel_width = 0;
    Index stride = 1;
    // kernel(o, c * kernel_width + k) multiplies input(c, t*stride + k).
    Mat kernel;
    Vec bias;

    Conv1dParams() = default;
    Conv1dParams(Index in_channels, Index out_channels, Index kernel_width,
                 Index stride = 1);

    void init(std::mt19937_64& rng);

    static Index out_length(Index in_length, Index kernel_width, Index stride) {
        return (in_length - kernel_width) / stride + 1;
    }
};

struct Conv1dGrads {
    Mat kernel;
    Vec bias;
};

// input: in_channels x L, output: out_channels x L_out.
Mat conv1d_forward(const Conv1dParams& params, const Mat& input);

// output_grad: out_channels x L_out. Returns input gradient; parameter grads
// accumulate into out.
Mat conv1d_backward(const Conv1dParams& params, const Mat& input,
                    const Mat& output_grad, Conv1dGrads& out);

}  // namespace vilo::nn
