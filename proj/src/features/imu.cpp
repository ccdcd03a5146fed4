#include "vilo/features/imu.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vilo::features {

ImuWindow resample_imu(const RawImuStream& raw, std::int64_t window_start_ns,
                       Index window_frames, double fps) {
    require_dim(window_frames >= 1, "resample_imu: window_frames must be positive");
    require_dim(raw.samples.rows() == 6, "resample_imu: stream channel axis != 6");
    const Index n = static_cast<Index>(raw.timestamps_ns.size());
    require_dim(raw.samples.cols() == n, "resample_imu: sample/timestamp count mismatch");
    if (n == 0) throw IngestError("resample_imu: empty stream");

    const double span_ns = static_cast<double>(window_frames) / fps * 1e9;
    const std::int64_t window_end_ns =
        window_start_ns + static_cast<std::int64_t>(span_ns);
    if (raw.timestamps_ns.front() > window_start_ns ||
        raw.timestamps_ns.back() < window_end_ns - static_cast<std::int64_t>(2e7))
        throw IngestError("resample_imu: stream does not cover window span");

    // Coverage check inside the window: gaps beyond 3 nominal raw periods.
    const std::int64_t max_gap_ns = static_cast<std::int64_t>(3.0 * 1e9 / kImuRateHz);
    for (Index i = 1; i < n; ++i) {
        if (raw.timestamps_ns[i] < window_start_ns || raw.timestamps_ns[i - 1] > window_end_ns)
            continue;
        const std::int64_t gap = raw.timestamps_ns[i] - raw.timestamps_ns[i - 1];
        if (gap <= 0) throw IngestError("resample_imu: timestamps not strictly increasing");
        if (gap > max_gap_ns)
            throw IngestError("resample_imu: coverage gap of " +
                              std::to_string(gap) + " ns inside window");
    }

    const Index T_out = window_frames * kImuPerFrame;
    ImuWindow out;
    out.person_id = raw.person_id;
    out.samples.resize(6, T_out);
    out.timestamps_ns.resize(static_cast<std::size_t>(T_out));

    Index cursor = 0;
    for (Index k = 0; k < T_out; ++k) {
        const std::int64_t target =
            window_start_ns +
            static_cast<std::int64_t>(span_ns * static_cast<double>(k) /
                                      static_cast<double>(T_out));
        while (cursor + 1 < n &&
               std::llabs(raw.timestamps_ns[cursor + 1] - target) <=
                   std::llabs(raw.timestamps_ns[cursor] - target))
            ++cursor;
        out.samples.col(k) = raw.samples.col(cursor);
        out.timestamps_ns[static_cast<std::size_t>(k)] = target;
    }
    return out;
}

Vec butterworth_filtfilt(const Vec& signal, double cutoff_hz, double sample_rate_hz) {
    require_dim(cutoff_hz > 0 && cutoff_hz < sample_rate_hz / 2.0,
                "butterworth: cutoff must lie below Nyquist");
    const Index n = signal.size();
    if (n == 0) return signal;

    // Bilinear-transform biquad; DC gain is exactly 1 by construction.
    const double ita = 1.0 / std::tan(M_PI * cutoff_hz / sample_rate_hz);
    const double q = std::sqrt(2.0);
    const double b0 = 1.0 / (1.0 + q * ita + ita * ita);
    const double b1 = 2.0 * b0;
    const double b2 = b0;
    const double a1 = 2.0 * (ita * ita - 1.0) * b0;
    const double a2 = -(1.0 - q * ita + ita * ita) * b0;

    auto pass = [&](const Vec& x) {
        Vec y(x.size());
        // Steady-state initial conditions so constants stay constant.
        double xp = x[0], xpp = x[0], yp = x[0], ypp = x[0];
        for (Index i = 0; i < x.size(); ++i) {
            const double v = b0 * x[i] + b1 * xp + b2 * xpp + a1 * yp + a2 * ypp;
            xpp = xp;
            xp = x[i];
            ypp = yp;
            yp = v;
            y[i] = v;
        }
        return y;
    };

    Vec forward = pass(signal);
    Vec backward = pass(forward.reverse());
    return backward.reverse();
}

ImuWindow low_pass_filter(const ImuWindow& window, double cutoff_hz,
                          double sample_rate_hz) {
    ImuWindow out = window;
    for (Index ch = 0; ch < 6; ++ch) {
        Vec row = window.samples.row(ch).transpose();
        out.samples.row(ch) = butterworth_filtfilt(row, cutoff_hz, sample_rate_hz).transpose();
    }
    return out;
}

Scalar accel_magnitude_std(const ImuWindow& window) {
    const Index n = window.length();
    if (n == 0) return 0.0;
    Vec mag(n);
    for (Index k = 0; k < n; ++k) mag[k] = window.samples.col(k).head(3).norm();
    const Scalar mean = mag.mean();
    return std::sqrt((mag.array() - mean).square().mean());
}

bool motion_filter(const ImuWindow& window, double threshold_mps2) {
    return accel_magnitude_std(window) >= threshold_mps2;
}

}  // namespace vilo::features
