#include "vilo/features/tracks.hpp"

namespace vilo::features {

void interpolate_gaps(Mat& values, std::vector<bool>& observed) {
    const Index T = values.rows();
    require_dim(static_cast<Index>(observed.size()) == T,
                "interpolate_gaps: mask length != time axis");

    Index prev = -1;
    for (Index t = 0; t < T; ++t) {
        if (!observed[t]) continue;
        if (prev >= 0 && t > prev + 1) {
            const Scalar span = static_cast<Scalar>(t - prev);
            for (Index u = prev + 1; u < t; ++u) {
                const Scalar w = static_cast<Scalar>(u - prev) / span;
                values.row(u) = (1.0 - w) * values.row(prev) + w * values.row(t);
                observed[u] = true;
            }
        }
        prev = t;
    }
}

std::vector<bool> pad_exit(Mat& values, Index window_length) {
    const Index have = values.rows();
    require_dim(have <= window_length, "pad_exit: track longer than window");
    std::vector<bool> mask(window_length, false);
    if (have < window_length) {
        Mat padded = Mat::Zero(window_length, values.cols() > 0 ? values.cols() : 1);
        if (have > 0) padded.topRows(have) = values;
        values = padded;
        for (Index t = have; t < window_length; ++t) mask[t] = true;
    }
    return mask;
}

}  // namespace vilo::features
