#include "vilo/nn/dense.hpp"

#include <cmath>

namespace vilo::nn {

DenseParams::DenseParams(Index input_dim_, Index output_dim_)
    : input_dim(input_dim_), output_dim(output_dim_) {
    require_dim(input_dim > 0 && output_dim > 0, "dense: dims must be positive");
    weight = Mat::Zero(output_dim, input_dim);
    bias = Vec::Zero(output_dim);
}

void DenseParams::init(std::mt19937_64& rng) {
    const Scalar bound = 1.0 / std::sqrt(static_cast<Scalar>(input_dim));
    std::uniform_real_distribution<Scalar> dist(-bound, bound);
    for (Index i = 0; i < weight.size(); ++i) weight.data()[i] = dist(rng);
    bias.setZero();
}

Mat dense_forward(const DenseParams& params, const Mat& input) {
    require_dim(input.cols() == params.input_dim,
                "dense_forward: feature axis != input_dim");
    Mat output = input * params.weight.transpose();
    output.rowwise() += params.bias.transpose();
    return output;
}

Mat dense_backward(const DenseParams& params, const Mat& input,
                   const Mat& output_grad, DenseGrads& out) {
    require_dim(output_grad.rows() == input.rows() &&
                    output_grad.cols() == params.output_dim,
                "dense_backward: output_grad shape mismatch");
    if (out.weight.size() == 0) {
        out.weight = Mat::Zero(params.weight.rows(), params.weight.cols());
        out.bias = Vec::Zero(params.bias.size());
    }
    out.weight.noalias() += output_grad.transpose() * input;
    out.bias += output_grad.colwise().sum().transpose();
    return output_grad * params.weight;
}

}  // namespace vilo::nn
