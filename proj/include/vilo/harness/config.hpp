#pragma once

#include <string>
#include <vector>

#include "vilo/embedding/model.hpp"
#include "vilo/sim/scene.hpp"

namespace vilo::harness {

// Inertial representation fed to the method's encoder.
enum class ImuRepr {
    VelAccGyro,   // (v_hat, a, w)  9 channels
    AccGyro,      // (a, w)         6 channels
    VelGyro,      // (v_hat, w)     6 channels
    AccGyroLpf,   // (a_lpf, w_lpf) 6 channels, the operating point
};

const char* imu_repr_name(ImuRepr repr);
Index imu_repr_channels(ImuRepr repr);

struct ExperimentConfig {
    // Corpus.
    std::vector<int> agent_counts = {2, 3, 4, 5, 6};
    int recordings_per_count = 8;
    long recording_frames = 600;
    std::uint64_t seed = 7;

    // Windowing.
    Index window = 150;
    Index step = 20;

    // Method.
    embedding::ModelConfig model;
    int epochs = 6;
    Scalar lr = 1e-3;
    long max_triplets_per_epoch = 2000;
    Scalar pair_loss_weight = 0.0;
    ImuRepr imu_repr = ImuRepr::AccGyroLpf;
    double lpf_cutoff_hz = 5.0;
    double motion_threshold = features::kMotionStdThreshold;

    sim::SimParams sim;
};

// Key-value text config (one `key = value` per line, # comments).
// Recognized keys: hidden_dim, conv_channels, alpha, beta, kappa, lr,
// epochs, seed, window, step, lpf_cutoff_hz, motion_threshold, imu_repr,
// recordings_per_count, recording_frames, max_triplets_per_epoch,
// pair_loss_weight.
ExperimentConfig load_config(const std::string& path);
void apply_config_line(ExperimentConfig& cfg, const std::string& key,
                       const std::string& value);
void save_config(const ExperimentConfig& cfg, const std::string& path);

}  // namespace vilo::harness
