#include "vilo/nn/grad_check.hpp"

#include <cmath>

namespace vilo::nn {

GradCheckReport gradient_check(const std::vector<ParamBlock>& blocks,
                               const std::function<Scalar()>& loss_fn,
                               const std::function<std::vector<Vec>()>& grad_fn,
                               Scalar perturbation, Scalar tolerance) {
    GradCheckReport report;
    report.tolerance = tolerance;

    const std::vector<Vec> analytic = grad_fn();
    require_dim(analytic.size() == blocks.size(),
                "gradient_check: grad_fn block count mismatch");

    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const ParamBlock& block = blocks[b];
        require_dim(analytic[b].size() == block.size,
                    "gradient_check: grad size mismatch for " + block.name);
        GradCheckEntry entry{block.name, 0.0};
        for (Index i = 0; i < block.size; ++i) {
            const Scalar saved = block.data[i];
            block.data[i] = saved + perturbation;
            const Scalar lp = loss_fn();
            block.data[i] = saved - perturbation;
            const Scalar lm = loss_fn();
            block.data[i] = saved;
            if (!std::isfinite(lp) || !std::isfinite(lm))
                throw TrainingError("gradient_check: non-finite loss at " + block.name);
            const Scalar fd = (lp - lm) / (2.0 * perturbation);
            const Scalar g = analytic[b][i];
            const Scalar denom = std::max({Scalar(1.0), std::abs(fd), std::abs(g)});
            entry.max_rel_error = std::max(entry.max_rel_error, std::abs(fd - g) / denom);
        }
        report.entries.push_back(entry);
    }
    return report;
}

}  // namespace vilo::nn
