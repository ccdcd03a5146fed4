#pragma once

#include <map>
#include <string>

#include "vilo/types.hpp"

namespace vilo::nn {

// Adaptive-moment estimation. One step covers every parameter block updated
// between begin_step() calls; moment buffers are keyed by block name and
// allocated lazily to the block's shape.
class Adam {
  public:
    explicit Adam(Scalar lr = 1e-3, Scalar beta1 = 0.9, Scalar beta2 = 0.999,
                  Scalar eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void begin_step() { ++step_; }

    void update(const std::string& name, Mat& param, const Mat& grad);
    void update(const std::string& name, Vec& param, const Vec& grad);

    Scalar learning_rate() const { return lr_; }
    long step_count() const { return step_; }

  private:
    struct Moments {
        Mat m, v;
    };
    Scalar lr_, beta1_, beta2_, eps_;
    long step_ = 0;
    std::map<std::string, Moments> state_;
};

}  // namespace vilo::nn
