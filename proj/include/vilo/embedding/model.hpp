#pragma once

#include <random>
#include <vector>

#include "vilo/features/imu.hpp"
#include "vilo/features/tracks.hpp"
#include "vilo/nn/checkpoint.hpp"
#include "vilo/nn/conv1d.hpp"
#include "vilo/nn/lstm.hpp"

namespace vilo::embedding {

struct ModelConfig {
    Index hidden_dim = 32;
    Index conv_channels = 8;
    Index imu_channels = 6;  // 9 when integrated velocity is concatenated
    Scalar alpha = 0.5;      // keypoint branch weight
    Scalar beta = 0.2;       // box branch weight
    Scalar kappa = 1.0;      // triplet margin
    Scalar image_height = 389.0;  // normalizes box/keypoint pixels
};

// All learnable parameters of the four encoders. The visual embedding is
// f_of(flow) + alpha * f_pose(keypoints) + beta * f_box(box); the inertial
// embedding is f_imu over a strided conv that maps 6 x 3T onto T steps.
struct EmbeddingModel {
    ModelConfig config;
    nn::LstmParams f_of;
    nn::LstmParams f_pose;
    nn::LstmParams f_box;
    nn::Conv1dParams imu_conv;
    nn::LstmParams f_imu;

    EmbeddingModel() = default;
    explicit EmbeddingModel(const ModelConfig& cfg);

    void init(std::mt19937_64& rng);

    nn::Checkpoint to_checkpoint() const;
    static EmbeddingModel from_checkpoint(const nn::Checkpoint& ckpt);
};

// Per-timestep embedding with the window's padding mask; masked rows never
// enter distances or losses.
struct EmbeddingSequence {
    Mat values;  // T x hidden_dim
    std::vector<bool> pad_mask;
};

// Caches for one visual encoding, kept when the encoding feeds a backward
// pass.
struct VisualCache {
    nn::LstmCache of, pose, box;
    Mat flow_in, pose_in, box_in;
};

struct InertialCache {
    Mat conv_in;   // channels x 3T
    Mat conv_out;  // conv_channels x T
    nn::LstmCache lstm;
};

EmbeddingSequence encode_visual(const EmbeddingModel& model,
                                const features::PartTrack& part,
                                const features::BoxTrack& box,
                                const features::KeypointTrack& keypoints,
                                const std::vector<bool>& pad_mask,
                                VisualCache* cache = nullptr);

EmbeddingSequence encode_inertial(const EmbeddingModel& model,
                                  const features::ImuWindow& imu,
                                  InertialCache* cache = nullptr);

// As encode_inertial but over an arbitrary channels x 3T feature matrix
// (used by the inertial-representation ablations).
EmbeddingSequence encode_inertial_raw(const EmbeddingModel& model,
                                      const Mat& channels_by_time,
                                      InertialCache* cache = nullptr);

// L2 norm over all unmasked timestep-feature entries. Throws when no
// timestep survives both masks.
Scalar pair_distance(const EmbeddingSequence& a, const EmbeddingSequence& b);

// Hinge triplet value on already-encoded sequences.
Scalar triplet_hinge(Scalar positive_distance, Scalar negative_distance,
                     Scalar kappa);

}  // namespace vilo::embedding
