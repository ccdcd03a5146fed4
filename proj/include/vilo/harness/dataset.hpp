#pragma once

#include <map>
#include <string>
#include <vector>

#include "vilo/embedding/train.hpp"
#include "vilo/harness/config.hpp"

namespace vilo::harness {

// One sliding window with both the method's processed inertial features
// (TrainWindow) and the raw resampled windows the baselines consume.
struct WindowBundle {
    embedding::TrainWindow train;
    std::map<int, features::ImuWindow> raw_imu;  // motion-filtered set
};

struct RecordingWindows {
    int recording_id = 0;
    int n_agents = 0;
    std::vector<WindowBundle> windows;
    long targets_total = 0;     // (window, person) pairs with IMU coverage
    long targets_filtered = 0;  // dropped by the motion filter
    std::vector<std::string> issues;
};

// Applies windowing, IMU resampling, the motion filter and the configured
// representation transform to one recording.
RecordingWindows build_recording_windows(
    int recording_id, int n_agents, const features::RecordingTracks& tracks,
    const std::map<int, features::RawImuStream>& streams,
    const ExperimentConfig& cfg);

// Representation transform for one resampled window (6 x 3T in, channels
// per the repr out). LPF uses cfg.lpf_cutoff_hz at the window's 90 Hz rate.
Mat imu_repr_features(const features::ImuWindow& window, ImuRepr repr,
                      double lpf_cutoff_hz);

// A corpus on disk: manifest + per-recording track/IMU files.
struct Corpus {
    std::vector<RecordingWindows> recordings;
};

// Simulates and writes a corpus (files + manifest) under out_dir.
void simulate_corpus(const ExperimentConfig& cfg, const std::string& out_dir);

// Loads a corpus directory (written by simulate_corpus or hand-assembled in
// the same formats) and builds windows per the config.
Corpus load_corpus(const std::string& dir, const ExperimentConfig& cfg);

}  // namespace vilo::harness
