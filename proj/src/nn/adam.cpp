#include "vilo/nn/adam.hpp"

#include <cmath>

namespace vilo::nn {

void Adam::update(const std::string& name, Mat& param, const Mat& grad) {
    require_dim(param.rows() == grad.rows() && param.cols() == grad.cols(),
                "adam: grad shape mismatch for " + name);
    if (!grad.allFinite())
        throw TrainingError("adam: non-finite gradient for " + name);
    if (step_ == 0)
        throw TrainingError("adam: update before begin_step for " + name);

    auto& mo = state_[name];
    if (mo.m.size() == 0) {
        mo.m = Mat::Zero(param.rows(), param.cols());
        mo.v = Mat::Zero(param.rows(), param.cols());
    }
    mo.m = beta1_ * mo.m + (1.0 - beta1_) * grad;
    mo.v = beta2_ * mo.v + (1.0 - beta2_) * grad.cwiseProduct(grad);
    const Scalar bc1 = 1.0 - std::pow(beta1_, static_cast<Scalar>(step_));
    const Scalar bc2 = 1.0 - std::pow(beta2_, static_cast<Scalar>(step_));
    param.array() -= lr_ * (mo.m.array() / bc1) /
                     ((mo.v.array() / bc2).sqrt() + eps_);
}

void Adam::update(const std::string& name, Vec& param, const Vec& grad) {
    Mat p = param, g = grad;
    update(name, p, g);
    param = p;
}

}  // namespace vilo::nn
