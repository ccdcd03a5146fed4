#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "vilo/embedding/model.hpp"
#include "vilo/nn/adam.hpp"

namespace vilo::embedding {

struct ModelGrads {
    nn::LstmGrads of, pose, box, imu;
    nn::Conv1dGrads conv;
};

// One triplet: the target's inertial features, one of the target's part
// tracks (positive) and one part track of a different person (negative).
// Both visual sides carry their window's box/keypoint tracks and pad mask.
struct TripletSample {
    const features::PartTrack* pos_part = nullptr;
    const features::BoxTrack* pos_box = nullptr;
    const features::KeypointTrack* pos_keypoints = nullptr;
    const std::vector<bool>* pos_mask = nullptr;
    const features::PartTrack* neg_part = nullptr;
    const features::BoxTrack* neg_box = nullptr;
    const features::KeypointTrack* neg_keypoints = nullptr;
    const std::vector<bool>* neg_mask = nullptr;
    const Mat* imu_features = nullptr;  // channels x 3T
};

// Forward + backward of the triplet objective (optionally plus the plain
// pair term at pair_loss_weight). Accumulates parameter gradients; the
// positive and negative sides share the visual encoder weights.
Scalar triplet_backward(const EmbeddingModel& model, const TripletSample& triplet,
                        Scalar pair_loss_weight, ModelGrads& grads);

// One sliding-window slice with every person's visual bundle and the
// processed inertial features of the people that passed the motion filter.
struct TrainWindow {
    int recording_id = 0;
    long window_start = 0;
    std::vector<features::PersonWindow> people;
    std::map<int, Mat> imu_features;  // person_id -> channels x 3T
};

struct TrainConfig {
    int epochs = 8;
    Scalar lr = 1e-3;
    std::uint64_t seed = 0;
    long max_triplets_per_epoch = 0;  // 0 = use every triplet
    Scalar pair_loss_weight = 0.0;
};

struct TrainStats {
    std::vector<Scalar> epoch_mean_loss;
    long skipped_single_person = 0;
    long triplets_per_epoch = 0;
};

using EpochCallback = std::function<void(int epoch, const EmbeddingModel& model)>;

// Sequential, seeded triplet training: one triplet per positive part track
// per (window, target), negatives drawn uniformly from other persons in the
// same window, reseeded each epoch.
TrainStats train(EmbeddingModel& model, const std::vector<TrainWindow>& data,
                 const TrainConfig& cfg, const EpochCallback& on_epoch = {});

}  // namespace vilo::embedding
