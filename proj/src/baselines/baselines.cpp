#include "vilo/baselines/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "vilo/nn/adam.hpp"

namespace vilo::baselines {

const char* baseline_name(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::VelMag: return "velocity_magnitude";
        case BaselineKind::AccelMag: return "acceleration_magnitude";
        case BaselineKind::VelMagHist: return "velocity_magnitude_histogram";
        case BaselineKind::AccelMagHist: return "acceleration_magnitude_histogram";
        case BaselineKind::Orientation3D: return "orientation_3d";
        case BaselineKind::Flow2D: return "flow_2d";
    }
    return "unknown";
}

Mat integrate_velocity(const features::ImuWindow& imu, double dt) {
    const Index n = imu.length();
    Mat vel(3, n);
    Vec v = Vec::Zero(3);
    for (Index t = 0; t < n; ++t) {
        v += imu.samples.col(t).head(3) * dt;
        vel.col(t) = v;
    }
    return vel;
}

Vec histogram(const Vec& sequence, int n_bins, double lo, double hi) {
    require_dim(n_bins >= 1, "histogram: need at least one bin");
    require_dim(hi > lo, "histogram: empty value range");
    if (sequence.size() == 0) throw DimensionError("histogram: empty sequence");
    Vec counts = Vec::Zero(n_bins);
    for (Index i = 0; i < sequence.size(); ++i) {
        int bin = static_cast<int>((sequence[i] - lo) / (hi - lo) * n_bins);
        bin = std::clamp(bin, 0, n_bins - 1);
        counts[bin] += 1.0;
    }
    return counts / counts.sum();
}

Scalar cosine_distance(const Vec& u, const Vec& v) {
    require_dim(u.size() == v.size(), "cosine_distance: length mismatch");
    const Scalar nu = u.norm(), nv = v.norm();
    if (nu == 0.0 || nv == 0.0) return 2.0;
    return 1.0 - u.dot(v) / (nu * nv);
}

Mat resample_columns(const Mat& seq, Index target_len) {
    require_dim(target_len >= 1, "resample_columns: target length must be positive");
    const Index n = seq.cols();
    if (n == target_len) return seq;
    Mat out(seq.rows(), target_len);
    for (Index k = 0; k < target_len; ++k) {
        // endpoint-preserving nearest index
        const Index src =
            target_len == 1
                ? (n - 1) / 2
                : std::min<Index>(
                      n - 1, static_cast<Index>(std::llround(
                                 static_cast<double>(k) * static_cast<double>(n - 1) /
                                 static_cast<double>(target_len - 1))));
        out.col(k) = seq.col(src);
    }
    return out;
}

Vec flow_magnitude(const features::PartTrack& part) {
    const Index T = part.flow.rows();
    Vec mag(T);
    for (Index t = 0; t < T; ++t) mag[t] = part.flow.row(t).norm();
    return mag;
}

Vec flow_gradient_magnitude(const features::PartTrack& part) {
    const Index T = part.flow.rows();
    Vec mag = Vec::Zero(T);
    for (Index t = 1; t < T; ++t)
        mag[t] = (part.flow.row(t) - part.flow.row(t - 1)).norm();
    return mag;
}

Mat SeqRegressor::predict(const Mat& input) const {
    nn::LstmCache cache;
    Mat seq;
    if (use_conv) {
        seq = nn::conv1d_forward(conv, input).transpose();
    } else {
        seq = input;
    }
    const Mat hidden = nn::lstm_forward(lstm, seq, cache);
    return nn::dense_forward(head, hidden);
}

namespace {

// One MSE gradient step through (optional conv) + LSTM + dense head.
Scalar regressor_step(SeqRegressor& reg, const Mat& input, const Mat& target,
                      nn::Adam& opt) {
    nn::LstmCache lstm_cache;
    Mat conv_in, seq;
    if (reg.use_conv) {
        conv_in = input;
        seq = nn::conv1d_forward(reg.conv, conv_in).transpose();
    } else {
        seq = input;
    }
    const Mat hidden = nn::lstm_forward(reg.lstm, seq, lstm_cache);
    const Mat pred = nn::dense_forward(reg.head, hidden);
    require_dim(pred.rows() == target.rows() && pred.cols() == target.cols(),
                "regressor_step: target shape mismatch");

    const Scalar n = static_cast<Scalar>(pred.size());
    const Mat diff = pred - target;
    const Scalar loss = diff.squaredNorm() / n;

    nn::DenseGrads head_grads;
    const Mat hidden_grad =
        nn::dense_backward(reg.head, hidden, (2.0 / n) * diff, head_grads);
    nn::LstmGrads lstm_grads;
    const Mat seq_grad = nn::lstm_backward(reg.lstm, lstm_cache, hidden_grad, lstm_grads);

    opt.begin_step();
    if (reg.use_conv) {
        nn::Conv1dGrads conv_grads;
        nn::conv1d_backward(reg.conv, conv_in, seq_grad.transpose(), conv_grads);
        opt.update("conv/kernel", reg.conv.kernel, conv_grads.kernel);
        opt.update("conv/bias", reg.conv.bias, conv_grads.bias);
    }
    opt.update("lstm/w_input", reg.lstm.w_input, lstm_grads.w_input);
    opt.update("lstm/w_hidden", reg.lstm.w_hidden, lstm_grads.w_hidden);
    opt.update("lstm/bias", reg.lstm.bias, lstm_grads.bias);
    opt.update("head/weight", reg.head.weight, head_grads.weight);
    opt.update("head/bias", reg.head.bias, head_grads.bias);
    return loss;
}

template <typename MakeSample>
void train_regressor(SeqRegressor& reg, std::size_t n_samples,
                     const RegressorConfig& cfg, MakeSample make_sample) {
    nn::Adam opt(cfg.lr);
    std::mt19937_64 rng(cfg.seed);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<std::size_t> order(n_samples);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        if (cfg.max_samples_per_epoch > 0 &&
            static_cast<long>(order.size()) > cfg.max_samples_per_epoch)
            order.resize(static_cast<std::size_t>(cfg.max_samples_per_epoch));
        for (std::size_t idx : order) {
            Mat input, target;
            if (!make_sample(idx, input, target)) continue;
            regressor_step(reg, input, target, opt);
        }
    }
}

const features::PersonWindow* find_person(const embedding::TrainWindow& win, int pid) {
    for (const auto& p : win.people)
        if (p.person_id == pid) return &p;
    return nullptr;
}

// Visual input for the orientation regressor: keypoints then box, scaled.
Mat pose_box_input(const features::PersonWindow& person, Scalar image_height) {
    const Index T = person.length();
    Mat input(T, 6);
    input.leftCols(4) = person.keypoints.points / image_height;
    input.rightCols(2) = person.box.sizes / image_height;
    return input;
}

}  // namespace

SeqRegressor train_orientation_regressor(const std::vector<embedding::TrainWindow>& data,
                                         const RegressorConfig& cfg,
                                         Scalar image_height) {
    SeqRegressor reg;
    reg.use_conv = false;
    reg.lstm = nn::LstmParams(6, cfg.hidden_dim);
    reg.head = nn::DenseParams(cfg.hidden_dim, 3);
    std::mt19937_64 init_rng(cfg.seed);
    reg.lstm.init(init_rng);
    reg.head.init(init_rng);

    // (window, target) pairs where the target has both modalities.
    std::vector<std::pair<std::size_t, int>> samples;
    for (std::size_t w = 0; w < data.size(); ++w)
        for (const auto& [pid, imu] : data[w].imu_features)
            if (find_person(data[w], pid)) samples.emplace_back(w, pid);

    train_regressor(reg, samples.size(), cfg,
                    [&](std::size_t idx, Mat& input, Mat& target) {
                        const auto& [w, pid] = samples[idx];
                        const auto* person = find_person(data[w], pid);
                        input = pose_box_input(*person, image_height);
                        // Gyro rows resampled to one value per video frame.
                        const Mat& imu = data[w].imu_features.at(pid);
                        target = resample_columns(imu.bottomRows(3), input.rows())
                                     .transpose();
                        return true;
                    });
    return reg;
}

SeqRegressor train_flow_regressor(const std::vector<embedding::TrainWindow>& data,
                                  const RegressorConfig& cfg) {
    SeqRegressor reg;
    reg.use_conv = true;
    reg.conv = nn::Conv1dParams(6, 8, features::kImuPerFrame, features::kImuPerFrame);
    reg.lstm = nn::LstmParams(8, cfg.hidden_dim);
    reg.head = nn::DenseParams(cfg.hidden_dim, 2);
    std::mt19937_64 init_rng(cfg.seed);
    reg.conv.init(init_rng);
    reg.lstm.init(init_rng);
    reg.head.init(init_rng);

    // One sample per (window, target, part track of the target).
    std::vector<std::tuple<std::size_t, int, std::size_t>> samples;
    for (std::size_t w = 0; w < data.size(); ++w)
        for (const auto& [pid, imu] : data[w].imu_features)
            if (const auto* person = find_person(data[w], pid))
                for (std::size_t part = 0; part < person->parts.size(); ++part)
                    samples.emplace_back(w, pid, part);

    train_regressor(reg, samples.size(), cfg,
                    [&](std::size_t idx, Mat& input, Mat& target) {
                        const auto& [w, pid, part] = samples[idx];
                        const Mat& imu = data[w].imu_features.at(pid);
                        if (imu.rows() != 6) return false;
                        input = imu;
                        target = find_person(data[w], pid)->parts[part].flow;
                        return true;
                    });
    return reg;
}

namespace {

Vec flatten(const Mat& m) {
    return Eigen::Map<const Vec>(m.data(), m.size());
}

}  // namespace

BaselineMatchResult baseline_match(BaselineKind kind,
                                   const std::vector<features::PersonWindow>& candidates,
                                   const features::ImuWindow& query,
                                   const BaselineContext& ctx) {
    require_dim(!candidates.empty(), "baseline_match: no candidates");
    const Index T = candidates.front().length();

    // Query-side feature, computed once.
    Vec query_seq;         // kinds 1-4
    Mat query_pred;        // kind 6: predicted T x 2 flow
    Mat query_gyro;        // kind 5: T x 3 angular velocity
    switch (kind) {
        case BaselineKind::VelMag:
        case BaselineKind::VelMagHist: {
            const Mat vel = integrate_velocity(query);
            Vec mag(vel.cols());
            for (Index t = 0; t < vel.cols(); ++t) mag[t] = vel.col(t).norm();
            query_seq = flatten(resample_columns(mag.transpose(), T));
            break;
        }
        case BaselineKind::AccelMag:
        case BaselineKind::AccelMagHist: {
            Vec mag(query.length());
            for (Index t = 0; t < query.length(); ++t)
                mag[t] = query.samples.col(t).head(3).norm();
            query_seq = flatten(resample_columns(mag.transpose(), T));
            break;
        }
        case BaselineKind::Orientation3D:
            query_gyro = resample_columns(query.samples.bottomRows(3), T).transpose();
            break;
        case BaselineKind::Flow2D:
            query_pred = ctx.flow.predict(query.samples);
            break;
    }

    BaselineMatchResult result;
    for (const auto& person : candidates) {
        if (person.parts.empty()) continue;
        Scalar dist = 0.0;
        switch (kind) {
            case BaselineKind::VelMag:
            case BaselineKind::AccelMag: {
                Scalar sum = 0.0;
                for (const auto& part : person.parts) {
                    const Vec mag = (kind == BaselineKind::VelMag)
                                        ? flow_magnitude(part)
                                        : flow_gradient_magnitude(part);
                    sum += cosine_distance(mag, query_seq);
                }
                dist = sum / static_cast<Scalar>(person.parts.size());
                break;
            }
            case BaselineKind::VelMagHist:
            case BaselineKind::AccelMagHist: {
                const bool vel = kind == BaselineKind::VelMagHist;
                const double hi = vel ? ctx.vel_hist_max : ctx.acc_hist_max;
                const Vec query_hist = histogram(query_seq, kHistogramBins, 0.0, hi);
                Scalar sum = 0.0;
                for (const auto& part : person.parts) {
                    const Vec mag = vel ? flow_magnitude(part)
                                        : flow_gradient_magnitude(part);
                    sum += cosine_distance(histogram(mag, kHistogramBins, 0.0, hi),
                                           query_hist);
                }
                dist = sum / static_cast<Scalar>(person.parts.size());
                break;
            }
            case BaselineKind::Orientation3D: {
                const Mat pred = ctx.orientation.predict(
                    pose_box_input(person, ctx.image_height));
                dist = cosine_distance(flatten(pred), flatten(query_gyro));
                break;
            }
            case BaselineKind::Flow2D: {
                Scalar sum = 0.0;
                for (const auto& part : person.parts)
                    sum += cosine_distance(flatten(query_pred), flatten(part.flow));
                dist = sum / static_cast<Scalar>(person.parts.size());
                break;
            }
        }
        result.distances.emplace_back(person.person_id, dist);
    }
    if (result.distances.empty())
        throw DimensionError("baseline_match: every candidate lacked part tracks");

    std::sort(result.distances.begin(), result.distances.end());
    auto best = result.distances.front();
    for (const auto& [pid, d] : result.distances)
        if (d < best.second) best = {pid, d};
    result.predicted_person = best.first;
    return result;
}

}  // namespace vilo::baselines
