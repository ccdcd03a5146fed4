#pragma once

#include <cstdint>
#include <vector>

#include "vilo/embedding/train.hpp"
#include "vilo/features/imu.hpp"
#include "vilo/features/tracks.hpp"
#include "vilo/nn/conv1d.hpp"
#include "vilo/nn/dense.hpp"
#include "vilo/nn/lstm.hpp"

namespace vilo::baselines {

enum class BaselineKind {
    VelMag,         // 1) velocity magnitude sequences, cosine
    AccelMag,       // 2) acceleration magnitude sequences, cosine
    VelMagHist,     // 3) 150-bin histogram of 1)
    AccelMagHist,   // 4) 150-bin histogram of 2)
    Orientation3D,  // 5) visual regressor for orientation change vs gyro
    Flow2D,         // 6) inertial regressor for 2D flow vs observed flow
};

constexpr int kHistogramBins = 150;

const char* baseline_name(BaselineKind kind);

// Cumulative rectangle-rule integral of the acceleration rows, v0 = 0:
// column t equals column t-1 plus a_t * dt. Returns 3 x T'.
Mat integrate_velocity(const features::ImuWindow& imu, double dt = 1.0 / 90.0);

// Counts normalized to sum 1; values outside [lo, hi] clamp into the edge
// bins. Throws on an empty sequence.
Vec histogram(const Vec& sequence, int n_bins, double lo, double hi);

// 1 - cos similarity; zero-norm inputs map to the maximal distance 2.
Scalar cosine_distance(const Vec& u, const Vec& v);

// Nearest-index resample of a D x L sequence to a target length.
Mat resample_columns(const Mat& seq, Index target_len);

// Per-frame flow magnitude of one part track (length T).
Vec flow_magnitude(const features::PartTrack& part);
// Magnitude of the frame-difference of the flow (visual acceleration).
Vec flow_gradient_magnitude(const features::PartTrack& part);

// Small LSTM + affine head used by the two supervised baselines. Kind 6
// prepends the same strided conv as the main method's inertial branch.
struct SeqRegressor {
    bool use_conv = false;
    nn::Conv1dParams conv;
    nn::LstmParams lstm;
    nn::DenseParams head;

    // use_conv: input is channels x 3T; otherwise T x input_dim.
    Mat predict(const Mat& input) const;  // returns T x output_dim
};

struct RegressorConfig {
    Index hidden_dim = 16;
    int epochs = 3;
    Scalar lr = 1e-3;
    std::uint64_t seed = 1;
    long max_samples_per_epoch = 1500;
};

// 5) keypoint+box sequences -> per-frame 3D orientation change, trained
// against the target's angular velocity.
SeqRegressor train_orientation_regressor(const std::vector<embedding::TrainWindow>& data,
                                         const RegressorConfig& cfg,
                                         Scalar image_height = 389.0);

// 6) raw 6-channel IMU -> per-frame 2D flow, trained against the target's
// observed part flows.
SeqRegressor train_flow_regressor(const std::vector<embedding::TrainWindow>& data,
                                  const RegressorConfig& cfg);

// Trained artifacts plus histogram ranges fixed from the training corpus.
struct BaselineContext {
    double vel_hist_max = 1.0;  // p99 of training velocity magnitudes
    double acc_hist_max = 1.0;  // p99 of training acceleration magnitudes
    SeqRegressor orientation;
    SeqRegressor flow;
    Scalar image_height = 389.0;
};

struct BaselineMatchResult {
    int predicted_person = -1;
    std::vector<std::pair<int, Scalar>> distances;
};

BaselineMatchResult baseline_match(BaselineKind kind,
                                   const std::vector<features::PersonWindow>& candidates,
                                   const features::ImuWindow& query,
                                   const BaselineContext& ctx);

}  // namespace vilo::baselines
