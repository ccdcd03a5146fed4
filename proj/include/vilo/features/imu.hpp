#pragma once

#include <cstdint>
#include <vector>

#include "vilo/types.hpp"

namespace vilo::features {

// Raw 6-channel inertial stream as recorded (~100 Hz, UTC-stamped).
// samples rows are [a_x, a_y, a_z, w_x, w_y, w_z]; accel in m/s^2 with
// gravity already removed, angular velocity in rad/s.
struct RawImuStream {
    int person_id = 0;
    std::vector<std::int64_t> timestamps_ns;  // strictly increasing
    Mat samples;                              // 6 x n
};

// Inertial feature matrix aligned to one video window: 6 x T' with T' = 3T.
struct ImuWindow {
    int person_id = 0;
    Mat samples;                              // 6 x 3T
    std::vector<std::int64_t> timestamps_ns;  // 3T target times

    Index length() const { return samples.cols(); }
};

constexpr double kVideoFps = 30.0;
constexpr double kImuRateHz = 100.0;
constexpr int kImuPerFrame = 3;  // T' = 3T
constexpr double kMotionStdThreshold = 0.02;  // m/s^2

// Picks 3T samples at uniformly spaced target times across the window
// [start_ns, start_ns + T/fps); each output sample is the raw sample with
// the nearest timestamp. Throws IngestError when the stream has a coverage
// gap larger than three nominal raw periods inside the window.
ImuWindow resample_imu(const RawImuStream& raw, std::int64_t window_start_ns,
                       Index window_frames, double fps = kVideoFps);

// Zero-phase (forward-backward) second-order Butterworth low-pass, each
// channel independently. sample_rate_hz is the window's effective rate
// (90 Hz for T' = 3T at 30 fps video).
ImuWindow low_pass_filter(const ImuWindow& window, double cutoff_hz,
                          double sample_rate_hz = kImuRateHz * 0.9);

// Single-channel zero-phase Butterworth pass, exposed for reuse.
Vec butterworth_filtfilt(const Vec& signal, double cutoff_hz, double sample_rate_hz);

// Keep iff the standard deviation of the per-sample acceleration magnitude
// reaches the threshold; near-static targets carry no matchable signature.
bool motion_filter(const ImuWindow& window, double threshold_mps2 = kMotionStdThreshold);

// Std of ||a_t||_2 over the window (population form).
Scalar accel_magnitude_std(const ImuWindow& window);

}  // namespace vilo::features
