#include "vilo/embedding/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace vilo::embedding {

namespace {

constexpr Scalar kDistEps = 1e-12;

// Zeroes masked rows of a gradient w.r.t. an embedding sequence.
void apply_mask(Mat& grad, const std::vector<bool>& mask) {
    for (Index t = 0; t < grad.rows(); ++t)
        if (static_cast<std::size_t>(t) < mask.size() && mask[static_cast<std::size_t>(t)])
            grad.row(t).setZero();
}

void visual_backward(const EmbeddingModel& model, const VisualCache& cache,
                     const Mat& embedding_grad, ModelGrads& grads) {
    nn::lstm_backward(model.f_of, cache.of, embedding_grad, grads.of);
    if (model.config.alpha != 0.0)
        nn::lstm_backward(model.f_pose, cache.pose,
                          model.config.alpha * embedding_grad, grads.pose);
    if (model.config.beta != 0.0)
        nn::lstm_backward(model.f_box, cache.box,
                          model.config.beta * embedding_grad, grads.box);
}

}  // namespace

Scalar triplet_backward(const EmbeddingModel& model, const TripletSample& triplet,
                        Scalar pair_loss_weight, ModelGrads& grads) {
    VisualCache pos_cache, neg_cache;
    InertialCache imu_cache;
    const EmbeddingSequence pos =
        encode_visual(model, *triplet.pos_part, *triplet.pos_box,
                      *triplet.pos_keypoints, *triplet.pos_mask, &pos_cache);
    const EmbeddingSequence neg =
        encode_visual(model, *triplet.neg_part, *triplet.neg_box,
                      *triplet.neg_keypoints, *triplet.neg_mask, &neg_cache);
    const EmbeddingSequence imu =
        encode_inertial_raw(model, *triplet.imu_features, &imu_cache);

    const Scalar d_pos = pair_distance(pos, imu);
    const Scalar d_neg = pair_distance(neg, imu);
    const Scalar hinge = triplet_hinge(d_pos, d_neg, model.config.kappa);
    const Scalar loss = hinge + pair_loss_weight * d_pos;

    const bool active = hinge > 0.0;
    const Scalar coef_pos = (active ? 1.0 : 0.0) + pair_loss_weight;
    const Scalar coef_neg = active ? -1.0 : 0.0;
    if (coef_pos == 0.0 && coef_neg == 0.0) return loss;

    Mat diff_pos = pos.values - imu.values;
    Mat diff_neg = neg.values - imu.values;
    apply_mask(diff_pos, pos.pad_mask);
    apply_mask(diff_neg, neg.pad_mask);

    Mat d_imu = Mat::Zero(imu.values.rows(), imu.values.cols());
    if (coef_pos != 0.0 && d_pos > kDistEps) {
        Mat g = (coef_pos / d_pos) * diff_pos;
        visual_backward(model, pos_cache, g, grads);
        d_imu -= g;
    }
    if (coef_neg != 0.0 && d_neg > kDistEps) {
        Mat g = (coef_neg / d_neg) * diff_neg;
        visual_backward(model, neg_cache, g, grads);
        d_imu -= g;
    }
    if (d_imu.cwiseAbs().maxCoeff() > 0.0) {
        Mat conv_out_grad =
            nn::lstm_backward(model.f_imu, imu_cache.lstm, d_imu, grads.imu)
                .transpose();
        nn::conv1d_backward(model.imu_conv, imu_cache.conv_in, conv_out_grad,
                            grads.conv);
    }
    return loss;
}

namespace {

struct TripletSlot {
    std::size_t window;
    int target;
    std::size_t part;
};

void adam_lstm(nn::Adam& opt, const std::string& prefix, nn::LstmParams& p,
               const nn::LstmGrads& g) {
    if (g.w_input.size() == 0) return;
    opt.update(prefix + "/w_input", p.w_input, g.w_input);
    opt.update(prefix + "/w_hidden", p.w_hidden, g.w_hidden);
    opt.update(prefix + "/bias", p.bias, g.bias);
}

}  // namespace

TrainStats train(EmbeddingModel& model, const std::vector<TrainWindow>& data,
                 const TrainConfig& cfg, const EpochCallback& on_epoch) {
    TrainStats stats;
    nn::Adam opt(cfg.lr);
    std::mt19937_64 rng(cfg.seed);

    // Every (window, target, part) combination that can seed a triplet.
    std::vector<TripletSlot> slots;
    for (std::size_t w = 0; w < data.size(); ++w) {
        const TrainWindow& win = data[w];
        for (const auto& [target, imu] : win.imu_features) {
            if (win.people.size() < 2) {
                ++stats.skipped_single_person;
                continue;
            }
            const features::PersonWindow* target_window = nullptr;
            for (const auto& p : win.people)
                if (p.person_id == target) target_window = &p;
            if (!target_window) continue;
            for (std::size_t part = 0; part < target_window->parts.size(); ++part)
                slots.push_back({w, target, part});
        }
    }

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<std::size_t> order(slots.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        if (cfg.max_triplets_per_epoch > 0 &&
            static_cast<long>(order.size()) > cfg.max_triplets_per_epoch)
            order.resize(static_cast<std::size_t>(cfg.max_triplets_per_epoch));
        stats.triplets_per_epoch = static_cast<long>(order.size());

        Scalar loss_sum = 0.0;
        for (std::size_t idx : order) {
            const TripletSlot& slot = slots[idx];
            const TrainWindow& win = data[slot.window];

            const features::PersonWindow* target_window = nullptr;
            std::vector<const features::PersonWindow*> others;
            for (const auto& p : win.people) {
                if (p.person_id == slot.target)
                    target_window = &p;
                else
                    others.push_back(&p);
            }
            std::uniform_int_distribution<std::size_t> pick_person(0, others.size() - 1);
            const features::PersonWindow* neg = others[pick_person(rng)];
            if (neg->parts.empty()) continue;
            std::uniform_int_distribution<std::size_t> pick_part(0, neg->parts.size() - 1);
            const features::PartTrack& neg_part = neg->parts[pick_part(rng)];

            TripletSample triplet;
            triplet.pos_part = &target_window->parts[slot.part];
            triplet.pos_box = &target_window->box;
            triplet.pos_keypoints = &target_window->keypoints;
            triplet.pos_mask = &target_window->pad_mask;
            triplet.neg_part = &neg_part;
            triplet.neg_box = &neg->box;
            triplet.neg_keypoints = &neg->keypoints;
            triplet.neg_mask = &neg->pad_mask;
            triplet.imu_features = &win.imu_features.at(slot.target);

            ModelGrads grads;
            const Scalar loss =
                triplet_backward(model, triplet, cfg.pair_loss_weight, grads);
            loss_sum += loss;
            if (grads.of.w_input.size() == 0) continue;  // inactive hinge

            opt.begin_step();
            adam_lstm(opt, "f_of", model.f_of, grads.of);
            adam_lstm(opt, "f_pose", model.f_pose, grads.pose);
            adam_lstm(opt, "f_box", model.f_box, grads.box);
            adam_lstm(opt, "f_imu", model.f_imu, grads.imu);
            if (grads.conv.kernel.size() != 0) {
                opt.update("imu_conv/kernel", model.imu_conv.kernel, grads.conv.kernel);
                opt.update("imu_conv/bias", model.imu_conv.bias, grads.conv.bias);
            }
        }
        stats.epoch_mean_loss.push_back(
            order.empty() ? 0.0 : loss_sum / static_cast<Scalar>(order.size()));
        if (on_epoch) on_epoch(epoch, model);
    }
    return stats;
}

}  // namespace vilo::embedding
