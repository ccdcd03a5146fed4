#pragma once

#include <random>

#include "vilo/types.hpp"

namespace vilo::nn {

// Affine map applied independently to each row of a T x D sequence.
struct DenseParams {
    Index input_dim = 0;
    Index output_dim = 0;
    Mat weight;  // O x D
    Vec bias;    // O

    DenseParams() = default;
    DenseParams(Index input_dim, Index output_dim);

    void init(std::mt19937_64& rng);
};

struct DenseGrads {
    Mat weight;
    Vec bias;
};

Mat dense_forward(const DenseParams& params, const Mat& input);

Mat dense_backward(const DenseParams& params, const Mat& input,
                   const Mat& output_grad, DenseGrads& out);

}  // namespace vilo::nn
