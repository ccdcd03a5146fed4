#include "vilo/nn/conv1d.hpp"

#include <cmath>

namespace vilo::nn {

Conv1dParams::Conv1dParams(Index in_channels_, Index out_channels_,
                           Index kernel_width_, Index stride_)
    : in_channels(in_channels_),
      out_channels(out_channels_),
      kernel_width(kernel_width_),
      stride(stride_) {
    require_dim(in_channels > 0 && out_channels > 0 && kernel_width > 0 && stride > 0,
                "conv1d: dims must be positive");
    kernel = Mat::Zero(out_channels, in_channels * kernel_width);
    bias = Vec::Zero(out_channels);
}

void Conv1dParams::init(std::mt19937_64& rng) {
    const Scalar bound = 1.0 / std::sqrt(static_cast<Scalar>(in_channels * kernel_width));
    std::uniform_real_distribution<Scalar> dist(-bound, bound);
    for (Index i = 0; i < kernel.size(); ++i) kernel.data()[i] = dist(rng);
    bias.setZero();
}

Mat conv1d_forward(const Conv1dParams& params, const Mat& input) {
    require_dim(input.rows() == params.in_channels,
                "conv1d_forward: channel axis != in_channels");
    const Index L = input.cols();
    require_dim(L >= params.kernel_width,
                "conv1d_forward: sequence axis shorter than kernel_width");
    const Index Lout = Conv1dParams::out_length(L, params.kernel_width, params.stride);

    Mat output(params.out_channels, Lout);
    Vec patch(params.in_channels * params.kernel_width);
    for (Index t = 0; t < Lout; ++t) {
        for (Index c = 0; c < params.in_channels; ++c)
            for (Index k = 0; k < params.kernel_width; ++k)
                patch[c * params.kernel_width + k] = input(c, t * params.stride + k);
        output.col(t).noalias() = params.kernel * patch;
        output.col(t) += params.bias;
    }
    return output;
}

Mat conv1d_backward(const Conv1dParams& params, const Mat& input,
                    const Mat& output_grad, Conv1dGrads& out) {
    const Index L = input.cols();
    const Index Lout = Conv1dParams::out_length(L, params.kernel_width, params.stride);
    require_dim(output_grad.rows() == params.out_channels && output_grad.cols() == Lout,
                "conv1d_backward: output_grad shape mismatch");

    if (out.kernel.size() == 0) {
        out.kernel = Mat::Zero(params.kernel.rows(), params.kernel.cols());
        out.bias = Vec::Zero(params.bias.size());
    }

    Mat input_grad = Mat::Zero(input.rows(), L);
    Vec patch(params.in_channels * params.kernel_width);
    for (Index t = 0; t < Lout; ++t) {
        for (Index c = 0; c < params.in_channels; ++c)
            for (Index k = 0; k < params.kernel_width; ++k)
                patch[c * params.kernel_width + k] = input(c, t * params.stride + k);
        out.kernel.noalias() += output_grad.col(t) * patch.transpose();
        out.bias += output_grad.col(t);
        Vec dpatch = params.kernel.transpose() * output_grad.col(t);
        for (Index c = 0; c < params.in_channels; ++c)
            for (Index k = 0; k < params.kernel_width; ++k)
                input_grad(c, t * params.stride + k) += dpatch[c * params.kernel_width + k];
    }
    return input_grad;
}

}  // namespace vilo::nn
