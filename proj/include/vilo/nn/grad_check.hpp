#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vilo/types.hpp"

namespace vilo::nn {

// A view onto one named parameter block of a model fragment.
struct ParamBlock {
    std::string name;
    Scalar* data = nullptr;
    Index size = 0;
};

struct GradCheckEntry {
    std::string name;
    Scalar max_rel_error = 0.0;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    Scalar tolerance = 0.0;

    bool passed() const {
        for (const auto& e : entries)
            if (!(e.max_rel_error < tolerance)) return false;
        return true;
    }
    Scalar worst() const {
        Scalar w = 0.0;
        for (const auto& e : entries) w = std::max(w, e.max_rel_error);
        return w;
    }
};

// Compares analytic gradients against central finite differences. loss_fn
// evaluates the fragment with the blocks' current contents; grad_fn returns
// one flat analytic gradient per block, in block order.
GradCheckReport gradient_check(const std::vector<ParamBlock>& blocks,
                               const std::function<Scalar()>& loss_fn,
                               const std::function<std::vector<Vec>()>& grad_fn,
                               Scalar perturbation = 1e-5,
                               Scalar tolerance = 1e-4);

}  // namespace vilo::nn
