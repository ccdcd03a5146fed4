#include "vilo/embedding/model.hpp"

#include <cmath>

namespace vilo::embedding {

EmbeddingModel::EmbeddingModel(const ModelConfig& cfg)
    : config(cfg),
      f_of(2, cfg.hidden_dim),
      f_pose(4, cfg.hidden_dim),
      f_box(2, cfg.hidden_dim),
      imu_conv(cfg.imu_channels, cfg.conv_channels, features::kImuPerFrame,
               features::kImuPerFrame),
      f_imu(cfg.conv_channels, cfg.hidden_dim) {}

void EmbeddingModel::init(std::mt19937_64& rng) {
    f_of.init(rng);
    f_pose.init(rng);
    f_box.init(rng);
    imu_conv.init(rng);
    f_imu.init(rng);
}

nn::Checkpoint EmbeddingModel::to_checkpoint() const {
    nn::Checkpoint ckpt;
    ckpt.add_scalar("config/hidden_dim", static_cast<Scalar>(config.hidden_dim));
    ckpt.add_scalar("config/conv_channels", static_cast<Scalar>(config.conv_channels));
    ckpt.add_scalar("config/imu_channels", static_cast<Scalar>(config.imu_channels));
    ckpt.add_scalar("config/alpha", config.alpha);
    ckpt.add_scalar("config/beta", config.beta);
    ckpt.add_scalar("config/kappa", config.kappa);
    ckpt.add_scalar("config/image_height", config.image_height);
    auto add_lstm = [&](const std::string& prefix, const nn::LstmParams& p) {
        ckpt.add(prefix + "/w_input", p.w_input);
        ckpt.add(prefix + "/w_hidden", p.w_hidden);
        ckpt.add(prefix + "/bias", p.bias);
    };
    add_lstm("f_of", f_of);
    add_lstm("f_pose", f_pose);
    add_lstm("f_box", f_box);
    ckpt.add("imu_conv/kernel", imu_conv.kernel);
    ckpt.add("imu_conv/bias", imu_conv.bias);
    add_lstm("f_imu", f_imu);
    return ckpt;
}

EmbeddingModel EmbeddingModel::from_checkpoint(const nn::Checkpoint& ckpt) {
    ModelConfig cfg;
    cfg.hidden_dim = static_cast<Index>(ckpt.get_scalar("config/hidden_dim"));
    cfg.conv_channels = static_cast<Index>(ckpt.get_scalar("config/conv_channels"));
    cfg.imu_channels = static_cast<Index>(ckpt.get_scalar("config/imu_channels"));
    cfg.alpha = ckpt.get_scalar("config/alpha");
    cfg.beta = ckpt.get_scalar("config/beta");
    cfg.kappa = ckpt.get_scalar("config/kappa");
    cfg.image_height = ckpt.get_scalar("config/image_height");
    EmbeddingModel model(cfg);
    auto load_lstm = [&](const std::string& prefix, nn::LstmParams& p) {
        p.w_input = ckpt.get(prefix + "/w_input");
        p.w_hidden = ckpt.get(prefix + "/w_hidden");
        p.bias = ckpt.get(prefix + "/bias");
    };
    load_lstm("f_of", model.f_of);
    load_lstm("f_pose", model.f_pose);
    load_lstm("f_box", model.f_box);
    model.imu_conv.kernel = ckpt.get("imu_conv/kernel");
    model.imu_conv.bias = ckpt.get("imu_conv/bias");
    load_lstm("f_imu", model.f_imu);
    return model;
}

EmbeddingSequence encode_visual(const EmbeddingModel& model,
                                const features::PartTrack& part,
                                const features::BoxTrack& box,
                                const features::KeypointTrack& keypoints,
                                const std::vector<bool>& pad_mask,
                                VisualCache* cache) {
    const Index T = part.flow.rows();
    require_dim(box.sizes.rows() == T && keypoints.points.rows() == T,
                "encode_visual: tracks disagree on time axis");

    VisualCache local;
    VisualCache& c = cache ? *cache : local;
    c.flow_in = part.flow;
    c.pose_in = keypoints.points / model.config.image_height;
    c.box_in = box.sizes / model.config.image_height;

    EmbeddingSequence out;
    out.values = nn::lstm_forward(model.f_of, c.flow_in, c.of);
    if (model.config.alpha != 0.0)
        out.values += model.config.alpha * nn::lstm_forward(model.f_pose, c.pose_in, c.pose);
    if (model.config.beta != 0.0)
        out.values += model.config.beta * nn::lstm_forward(model.f_box, c.box_in, c.box);
    out.pad_mask = pad_mask.empty()
                       ? std::vector<bool>(static_cast<std::size_t>(T), false)
                       : pad_mask;
    return out;
}

EmbeddingSequence encode_inertial_raw(const EmbeddingModel& model,
                                      const Mat& channels_by_time,
                                      InertialCache* cache) {
    require_dim(channels_by_time.rows() == model.config.imu_channels,
                "encode_inertial: channel axis != imu_channels");
    require_dim(channels_by_time.cols() % features::kImuPerFrame == 0,
                "encode_inertial: sample axis is not 3T");

    InertialCache local;
    InertialCache& c = cache ? *cache : local;
    c.conv_in = channels_by_time;
    c.conv_out = nn::conv1d_forward(model.imu_conv, c.conv_in);

    EmbeddingSequence out;
    out.values = nn::lstm_forward(model.f_imu, c.conv_out.transpose(), c.lstm);
    out.pad_mask.assign(static_cast<std::size_t>(out.values.rows()), false);
    return out;
}

EmbeddingSequence encode_inertial(const EmbeddingModel& model,
                                  const features::ImuWindow& imu,
                                  InertialCache* cache) {
    return encode_inertial_raw(model, imu.samples, cache);
}

Scalar pair_distance(const EmbeddingSequence& a, const EmbeddingSequence& b) {
    require_dim(a.values.rows() == b.values.rows() &&
                    a.values.cols() == b.values.cols(),
                "pair_distance: embedding shapes differ");
    Scalar sq = 0.0;
    Index used = 0;
    for (Index t = 0; t < a.values.rows(); ++t) {
        const auto ut = static_cast<std::size_t>(t);
        if ((ut < a.pad_mask.size() && a.pad_mask[ut]) ||
            (ut < b.pad_mask.size() && b.pad_mask[ut]))
            continue;
        sq += (a.values.row(t) - b.values.row(t)).squaredNorm();
        ++used;
    }
    if (used == 0)
        throw DimensionError("pair_distance: no unmasked timestep overlap");
    return std::sqrt(sq);
}

Scalar triplet_hinge(Scalar positive_distance, Scalar negative_distance,
                     Scalar kappa) {
    return std::max(positive_distance - negative_distance + kappa, 0.0);
}

}  // namespace vilo::embedding
