#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "vilo/baselines/baselines.hpp"

using namespace vilo;

namespace {

features::ImuWindow imu_from_accel_x(const Vec& accel_x) {
    features::ImuWindow w;
    w.samples = Mat::Zero(6, accel_x.size());
    w.samples.row(0) = accel_x.transpose();
    for (Index i = 0; i < accel_x.size(); ++i) w.timestamps_ns.push_back(i);
    return w;
}

// IMU window whose integrated velocity magnitude is exactly `target` (the
// acceleration is the discrete derivative of the target sequence).
features::ImuWindow imu_with_velocity(const Vec& target, double dt = 1.0 / 90.0) {
    Vec accel(target.size());
    double prev = 0.0;
    for (Index i = 0; i < target.size(); ++i) {
        accel[i] = (target[i] - prev) / dt;
        prev = target[i];
    }
    return imu_from_accel_x(accel);
}

features::PersonWindow person_with_flow_x(int id, const Vec& flow_x) {
    features::PersonWindow w;
    w.person_id = id;
    features::PartTrack part;
    part.person_id = id;
    part.part_id = 0;
    part.flow = Mat::Zero(flow_x.size(), 2);
    part.flow.col(0) = flow_x;
    w.parts.push_back(std::move(part));
    w.box.person_id = id;
    w.box.sizes = Mat::Constant(flow_x.size(), 2, 100.0);
    w.keypoints.person_id = id;
    w.keypoints.points = Mat::Constant(flow_x.size(), 4, 5.0);
    w.pad_mask.assign(static_cast<std::size_t>(flow_x.size()), false);
    return w;
}

baselines::BaselineContext plain_context() {
    baselines::BaselineContext ctx;
    ctx.vel_hist_max = 10.0;
    ctx.acc_hist_max = 10.0;
    return ctx;
}

}  // namespace

TEST_CASE("integrate_velocity: zero accel stays at rest") {
    const auto w = imu_from_accel_x(Vec::Zero(50));
    CHECK(baselines::integrate_velocity(w).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("integrate_velocity: constant 1 m/s^2 for 1 s reaches 1 m/s") {
    const auto w = imu_from_accel_x(Vec::Ones(100));
    const Mat v = baselines::integrate_velocity(w, 0.01);
    CHECK(v(0, 99) == doctest::Approx(1.0).epsilon(0.011));  // within one step
    // rectangle rule exactly: v_t - v_{t-1} = a_t * dt
    for (Index t = 1; t < 100; ++t)
        CHECK(v(0, t) - v(0, t - 1) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("integrate_velocity is linear in the acceleration") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> dist(0.0, 1.0);
    Vec a(60), b(60);
    for (Index i = 0; i < 60; ++i) {
        a[i] = dist(rng);
        b[i] = dist(rng);
    }
    const Mat va = baselines::integrate_velocity(imu_from_accel_x(a));
    const Mat vb = baselines::integrate_velocity(imu_from_accel_x(b));
    const Mat vsum = baselines::integrate_velocity(imu_from_accel_x(2.0 * a + 3.0 * b));
    CHECK((vsum - (2.0 * va + 3.0 * vb)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("integrate_velocity drift grows over nested windows") {
    // Noisy oscillation: integration error accumulates, so the velocity
    // spread increases with window length.
    std::mt19937_64 rng(2);
    std::normal_distribution<double> noise(0.0, 0.3);
    Vec a(900);
    for (Index i = 0; i < 900; ++i) a[i] = std::sin(0.07 * i) + 0.05 + noise(rng);
    const Mat v = baselines::integrate_velocity(imu_from_accel_x(a));
    auto spread = [&](Index len) {
        const auto seg = v.row(0).head(len);
        return std::sqrt((seg.array() - seg.mean()).square().mean());
    };
    CHECK(spread(300) < spread(600));
    CHECK(spread(600) < spread(900));
}

TEST_CASE("histogram uses 150 bins, normalizes, and clamps outliers") {
    CHECK(baselines::kHistogramBins == 150);
    const Vec constant = Vec::Constant(40, 3.0);
    const Vec h = baselines::histogram(constant, 150, 0.0, 10.0);
    REQUIRE(h.size() == 150);
    CHECK(h.maxCoeff() == doctest::Approx(1.0));
    CHECK(h.sum() == doctest::Approx(1.0));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5.0, 15.0);  // outliers included
    Vec random(500);
    for (Index i = 0; i < 500; ++i) random[i] = u(rng);
    const Vec hr = baselines::histogram(random, 150, 0.0, 10.0);
    CHECK(hr.sum() == doctest::Approx(1.0));
    CHECK(hr.minCoeff() >= 0.0);

    Vec ramp(1500);
    for (Index i = 0; i < 1500; ++i) ramp[i] = 10.0 * i / 1499.0;
    const Vec hramp = baselines::histogram(ramp, 150, 0.0, 10.0);
    CHECK(hramp.maxCoeff() <= 2.0 / 150.0 + 1e-9);

    CHECK_THROWS_AS(baselines::histogram(Vec(), 150, 0.0, 1.0), DimensionError);
}

TEST_CASE("cosine distance: scale invariance and zero-norm convention") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> dist(0.0, 1.0);
    Vec u(20), v(20);
    for (Index i = 0; i < 20; ++i) {
        u[i] = dist(rng);
        v[i] = dist(rng);
    }
    const Scalar d = baselines::cosine_distance(u, v);
    CHECK(baselines::cosine_distance(3.7 * u, v) == doctest::Approx(d).epsilon(1e-12));
    CHECK(baselines::cosine_distance(u, 0.001 * v) == doctest::Approx(d).epsilon(1e-12));
    CHECK(baselines::cosine_distance(u, u) == doctest::Approx(0.0));
    CHECK(baselines::cosine_distance(u, -u) == doctest::Approx(2.0));
    CHECK(baselines::cosine_distance(Vec::Zero(20), v) == 2.0);
}

TEST_CASE("resample_columns nearest-index resampling") {
    Mat seq(1, 6);
    seq << 0, 1, 2, 3, 4, 5;
    const Mat out = baselines::resample_columns(seq, 3);
    REQUIRE(out.cols() == 3);
    // endpoints map to endpoints
    CHECK(out(0, 0) == 0.0);
    CHECK(out(0, 2) == 5.0);
    const Mat same = baselines::resample_columns(seq, 6);
    CHECK(same == seq);
}

TEST_CASE("velocity-magnitude baseline separates walker from stander") {
    const Index T = 30, Tp = 3 * T;
    Vec vel(Tp);
    for (Index i = 0; i < Tp; ++i) vel[i] = 1.0 + 0.5 * std::sin(0.2 * i);
    const auto query = imu_with_velocity(vel);

    Vec walker_flow(T), still_flow(T);
    for (Index t = 0; t < T; ++t) {
        walker_flow[t] = 1.0 + 0.5 * std::sin(0.6 * t);
        still_flow[t] = 0.01;
    }
    std::vector<features::PersonWindow> candidates{
        person_with_flow_x(0, still_flow), person_with_flow_x(1, walker_flow)};
    const auto r = baselines::baseline_match(baselines::BaselineKind::VelMag,
                                             candidates, query, plain_context());
    CHECK(r.predicted_person == 1);
}

TEST_CASE("identical candidates tie-break to the smallest person_id") {
    const Index T = 20;
    Vec flow(T);
    for (Index t = 0; t < T; ++t) flow[t] = 0.5 + 0.1 * t;
    std::vector<features::PersonWindow> candidates{person_with_flow_x(2, flow),
                                                   person_with_flow_x(5, flow)};
    Vec vel(3 * T);
    for (Index i = 0; i < 3 * T; ++i) vel[i] = 1.0 + 0.01 * i;
    const auto query = imu_with_velocity(vel);
    for (auto kind : {baselines::BaselineKind::VelMag,
                      baselines::BaselineKind::VelMagHist,
                      baselines::BaselineKind::AccelMag,
                      baselines::BaselineKind::AccelMagHist}) {
        const auto r = baselines::baseline_match(kind, candidates, query, plain_context());
        CHECK(r.predicted_person == 2);
    }
}

TEST_CASE("temporal reordering flips sequence matching but not histograms") {
    const Index T = 24, Tp = 3 * T;
    std::mt19937_64 rng(6);
    // Distinct positive values; candidate 1 carries a permuted copy of
    // candidate 0's flow sequence.
    Vec base(T);
    for (Index t = 0; t < T; ++t) base[t] = 0.2 + 0.13 * t;
    Vec permuted = base;
    std::shuffle(permuted.data(), permuted.data() + T, rng);
    std::vector<features::PersonWindow> candidates{person_with_flow_x(0, base),
                                                   person_with_flow_x(1, permuted)};

    // Query A follows candidate 0's ordering, query B candidate 1's.
    auto stretch = [&](const Vec& v) {
        Vec out(Tp);
        for (Index i = 0; i < Tp; ++i) out[i] = v[std::min<Index>(T - 1, i / 3)];
        return out;
    };
    const auto query_a = imu_with_velocity(stretch(base));
    const auto query_b = imu_with_velocity(stretch(permuted));

    const auto ctx = plain_context();
    using BK = baselines::BaselineKind;
    const auto seq_a = baselines::baseline_match(BK::VelMag, candidates, query_a, ctx);
    const auto seq_b = baselines::baseline_match(BK::VelMag, candidates, query_b, ctx);
    CHECK(seq_a.predicted_person == 0);
    CHECK(seq_b.predicted_person == 1);  // sequence matching is order-sensitive

    const auto hist_a = baselines::baseline_match(BK::VelMagHist, candidates, query_a, ctx);
    const auto hist_b = baselines::baseline_match(BK::VelMagHist, candidates, query_b, ctx);
    // Histograms of a permutation are identical, so both queries resolve the
    // same way (tie-break to person 0).
    CHECK(hist_a.predicted_person == hist_b.predicted_person);
    CHECK(hist_a.predicted_person == 0);
    CHECK(std::abs(hist_a.distances[0].second - hist_a.distances[1].second) < 1e-9);
}

TEST_CASE("supervised baselines train and predict with the right shapes") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> dist(0.0, 1.0);
    const Index T = 15;
    std::vector<embedding::TrainWindow> data;
    for (int w = 0; w < 3; ++w) {
        embedding::TrainWindow window;
        for (int p = 0; p < 2; ++p) {
            Vec flow(T);
            for (Index t = 0; t < T; ++t) flow[t] = dist(rng);
            window.people.push_back(person_with_flow_x(p, flow));
            Mat imu(6, 3 * T);
            for (Index i = 0; i < imu.size(); ++i) imu.data()[i] = dist(rng);
            window.imu_features[p] = std::move(imu);
        }
        data.push_back(std::move(window));
    }
    baselines::RegressorConfig cfg;
    cfg.epochs = 1;
    cfg.hidden_dim = 4;

    const auto orient = baselines::train_orientation_regressor(data, cfg);
    const Mat pose_in = Mat::Random(T, 6);
    const Mat orient_out = orient.predict(pose_in);
    CHECK(orient_out.rows() == T);
    CHECK(orient_out.cols() == 3);

    const auto flow_reg = baselines::train_flow_regressor(data, cfg);
    const Mat imu_in = Mat::Random(6, 3 * T);
    const Mat flow_out = flow_reg.predict(imu_in);
    CHECK(flow_out.rows() == T);
    CHECK(flow_out.cols() == 2);

    // Matching with the trained context must run for kinds 5 and 6.
    baselines::BaselineContext ctx = plain_context();
    ctx.orientation = orient;
    ctx.flow = flow_reg;
    const auto query = data[0].imu_features.begin()->second;
    features::ImuWindow qw;
    qw.samples = query;
    for (Index i = 0; i < query.cols(); ++i) qw.timestamps_ns.push_back(i);
    for (auto kind : {baselines::BaselineKind::Orientation3D,
                      baselines::BaselineKind::Flow2D}) {
        const auto r = baselines::baseline_match(kind, data[0].people, qw, ctx);
        CHECK((r.predicted_person == 0 || r.predicted_person == 1));
        CHECK(r.distances.size() == 2);
    }
}

TEST_CASE("baseline names are stable") {
    using BK = baselines::BaselineKind;
    CHECK(std::string(baselines::baseline_name(BK::VelMag)) == "velocity_magnitude");
    CHECK(std::string(baselines::baseline_name(BK::VelMagHist)) ==
          "velocity_magnitude_histogram");
    CHECK(std::string(baselines::baseline_name(BK::AccelMag)) ==
          "acceleration_magnitude");
    CHECK(std::string(baselines::baseline_name(BK::AccelMagHist)) ==
          "acceleration_magnitude_histogram");
    CHECK(std::string(baselines::baseline_name(BK::Orientation3D)) == "orientation_3d");
    CHECK(std::string(baselines::baseline_name(BK::Flow2D)) == "flow_2d");
}
