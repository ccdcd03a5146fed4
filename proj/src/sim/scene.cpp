#include "vilo/sim/scene.hpp"

#include <cmath>

namespace vilo::sim {

namespace {

constexpr double kDt = 1.0 / AgentTrajectory::kInternalRate;
constexpr double kGroundY = 1.0;       // camera is 1 m above the ground
constexpr double kTorsoY = 0.1;        // torso center 0.9 m above ground
constexpr double kSpeedRampMps2 = 2.5;  // human-scale accel/decel limit

double wrap_angle(double a) {
    while (a > M_PI) a -= 2.0 * M_PI;
    while (a <= -M_PI) a += 2.0 * M_PI;
    return a;
}

Eigen::Vector3d dir_of(double heading) {
    return {std::sin(heading), 0.0, std::cos(heading)};
}

Eigen::Vector3d right_of(double heading) {
    return {std::cos(heading), 0.0, -std::sin(heading)};
}

}  // namespace

Eigen::Vector3d phone_position(const AgentTrajectory& traj, long step,
                               const SimParams& params) {
    const double h = traj.heading[static_cast<std::size_t>(step)];
    const double phase = traj.gait_phase[static_cast<std::size_t>(step)];
    Eigen::Vector3d p = traj.torso[static_cast<std::size_t>(step)];
    p += 0.22 * right_of(h);
    p.y() += 0.35;  // hand rides near the hip
    p += params.arm_swing_amp * std::sin(0.5 * phase) * dir_of(h);
    p.y() += params.bob_amp * std::sin(phase);
    return p;
}

namespace {

Eigen::Vector3d part_position(const AgentTrajectory& traj, long step, int part,
                              const SimParams& params) {
    const auto s = static_cast<std::size_t>(step);
    const double h = traj.heading[s];
    const double phase = traj.gait_phase[s];
    const Eigen::Vector3d torso = traj.torso[s];
    switch (part) {
        case kHead:
            return torso + Eigen::Vector3d(0, -0.65, 0);
        case kTorso:
            return torso;
        case kLegs:
            return torso + Eigen::Vector3d(0, 0.55, 0) +
                   params.leg_swing_amp * std::sin(phase) * dir_of(h);
        case kLeftHand:
            return torso - 0.22 * right_of(h) + Eigen::Vector3d(0, 0.35, 0) -
                   params.arm_swing_amp * std::sin(0.5 * phase) * dir_of(h);
        case kPhoneHand:
            return phone_position(traj, step, params);
        default:
            throw DimensionError("part_position: unknown part id");
    }
}

}  // namespace

features::PersonTimeline project_agent(const CameraModel& camera,
                                       const AgentTrajectory& traj,
                                       long n_frames, const SimParams& params) {
    features::PersonTimeline timeline;
    timeline.person_id = traj.agent_id;

    // Previous frame's projected part positions, for frame-difference flow.
    std::vector<Eigen::Vector2d> prev_parts(kNumParts);
    std::vector<bool> prev_ok(kNumParts, false);

    for (long f = 0; f < n_frames; ++f) {
        const long step = traj.frame_step(f);
        const auto s = static_cast<std::size_t>(step);
        const Eigen::Vector3d torso = traj.torso[s];
        const double h = traj.heading[s];

        double uc, vc;
        if (!camera.project(torso, uc, vc) || !camera.in_view(uc, vc)) {
            std::fill(prev_ok.begin(), prev_ok.end(), false);
            continue;
        }

        features::FrameObservation obs;
        double u_head, v_head, u_feet, v_feet;
        camera.project(torso + Eigen::Vector3d(0, -0.7 - kTorsoY, 0), u_head, v_head);
        camera.project(Eigen::Vector3d(torso.x(), kGroundY, torso.z()), u_feet, v_feet);
        obs.box_h = v_feet - v_head;
        // Image-plane half-extent of the body ellipse for the current heading.
        const double half = 0.225 * std::abs(std::cos(h)) +
                            0.125 * std::abs(std::sin(h)) + 0.05;
        obs.box_w = 2.0 * half * camera.focal / torso.z();
        obs.center_x = uc;
        obs.center_y = 0.5 * (v_head + v_feet);

        // Shoulders projected at the shoulder-line depth so their image
        // midpoint coincides with the projected center exactly.
        const Eigen::Vector3d shoulder_mid = torso + Eigen::Vector3d(0, -0.55, 0);
        double u_mid, v_mid;
        camera.project(shoulder_mid, u_mid, v_mid);
        const double spread = 0.2 * std::cos(h) * camera.focal / shoulder_mid.z();
        const double u_ls = u_mid - spread, v_ls = v_mid;
        const double u_rs = u_mid + spread, v_rs = v_mid;
        obs.ls_x = u_ls - obs.center_x;
        obs.ls_y = v_ls - obs.center_y;
        obs.rs_x = u_rs - obs.center_x;
        obs.rs_y = v_rs - obs.center_y;

        for (int part = 0; part < kNumParts; ++part) {
            double u, v;
            if (!camera.project(part_position(traj, step, part, params), u, v)) {
                prev_ok[static_cast<std::size_t>(part)] = false;
                continue;
            }
            if (prev_ok[static_cast<std::size_t>(part)]) {
                const Eigen::Vector2d flow =
                    Eigen::Vector2d(u, v) - prev_parts[static_cast<std::size_t>(part)];
                obs.part_flow[part] = {flow.x(), flow.y()};
            } else {
                obs.part_flow[part] = {0.0, 0.0};
            }
            prev_parts[static_cast<std::size_t>(part)] = {u, v};
            prev_ok[static_cast<std::size_t>(part)] = true;
        }
        timeline.frames[f] = std::move(obs);
    }
    return timeline;
}

features::RawImuStream synthesize_imu(const AgentTrajectory& traj, long n_frames,
                                      std::uint64_t seed, const SimParams& params) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ufreq(0.3, 1.2);
    std::uniform_real_distribution<double> uphase(0.0, 2.0 * M_PI);
    std::normal_distribution<double> noise(0.0, 1.0);

    // Smooth hand-held orientation wander: two seeded sinusoids per axis.
    struct Wobble {
        double f1, p1, f2, p2;
        double eval(double t, double amp) const {
            return amp * (std::sin(2.0 * M_PI * f1 * t + p1) +
                          0.5 * std::sin(2.0 * M_PI * f2 * t + p2));
        }
    };
    Wobble wob[3];
    for (auto& w : wob)
        w = {ufreq(rng), uphase(rng), ufreq(rng), uphase(rng)};

    auto rotation_at = [&](long step) {
        const auto s = static_cast<std::size_t>(step);
        const double t = (static_cast<double>(step) - traj.lead_steps) * kDt;
        const double yaw = traj.heading[s] + wob[0].eval(t, params.jitter_amp);
        const double pitch = wob[1].eval(t, params.jitter_amp);
        const double roll = wob[2].eval(t, params.jitter_amp);
        return Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY()) *
               Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitX()) *
               Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitZ());
    };

    const long steps = traj.internal_steps();
    features::RawImuStream stream;
    stream.person_id = traj.agent_id;

    std::vector<std::int64_t> ts;
    std::vector<Eigen::Matrix<Scalar, 6, 1>> samples;
    (void)n_frames;
    for (long k = 3; k + 3 < steps; k += 3) {
        const Eigen::Vector3d p_prev = phone_position(traj, k - 3, params);
        const Eigen::Vector3d p_cur = phone_position(traj, k, params);
        const Eigen::Vector3d p_next = phone_position(traj, k + 3, params);
        const Eigen::Vector3d accel_world = (p_next - 2.0 * p_cur + p_prev) * 1e4;

        const Eigen::Matrix3d r = rotation_at(k).toRotationMatrix();
        const Eigen::Matrix3d r_prev = rotation_at(k - 3).toRotationMatrix();
        const Eigen::Matrix3d r_next = rotation_at(k + 3).toRotationMatrix();
        const Eigen::Matrix3d omega_hat = r.transpose() * ((r_next - r_prev) / 0.02);
        const Eigen::Vector3d omega(omega_hat(2, 1), omega_hat(0, 2), omega_hat(1, 0));

        Eigen::Matrix<Scalar, 6, 1> sample;
        sample.head<3>() = r.transpose() * accel_world;
        sample.tail<3>() = omega;
        for (int i = 0; i < 3; ++i) sample[i] += params.noise_accel * noise(rng);
        for (int i = 3; i < 6; ++i) sample[i] += params.noise_gyro * noise(rng);

        const double t_rel = (static_cast<double>(k) - traj.lead_steps) * kDt;
        ts.push_back(kEpochBaseNs + static_cast<std::int64_t>(std::llround(t_rel * 1e9)));
        samples.push_back(sample);
    }
    stream.timestamps_ns = std::move(ts);
    stream.samples.resize(6, static_cast<Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i)
        stream.samples.col(static_cast<Index>(i)) = samples[i];
    return stream;
}

namespace {

struct AgentState {
    Eigen::Vector3d pos;  // torso center
    double heading = 0.0;
    double gait_phase = 0.0;
    double speed = 0.0;         // current, ramped toward the target
    double target_speed = 0.0;
    double heading_rate = 0.0;  // rad/s for the current behavior segment
    Behavior behavior = Behavior::Stand;
    long segment_left = 0;  // internal steps
};

constexpr double kXMin = -2.2, kXMax = 2.2, kZMin = 3.5, kZMax = 11.0;

}  // namespace

SceneRecording generate_scene(int n_agents, long length_frames, std::uint64_t seed,
                              const SimParams& params, const CameraModel& camera) {
    require_dim(n_agents >= 1 && n_agents <= 6, "generate_scene: n_agents must be 1..6");
    require_dim(length_frames >= 1, "generate_scene: length_frames must be positive");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(-1.8, 1.8);
    std::uniform_real_distribution<double> uz(4.5, 10.0);
    std::uniform_real_distribution<double> uang(-M_PI, M_PI);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    SceneRecording rec;
    rec.camera = camera;
    rec.n_frames = length_frames;
    rec.seed = seed;

    // Initial placement, pairwise at least 1.5 m, bounded retries.
    std::vector<Eigen::Vector2d> placed;
    for (int a = 0; a < n_agents; ++a) {
        bool ok = false;
        for (int attempt = 0; attempt < 200 && !ok; ++attempt) {
            Eigen::Vector2d cand(ux(rng), uz(rng));
            ok = true;
            for (const auto& p : placed)
                if ((p - cand).norm() < 1.5) ok = false;
            if (ok) placed.push_back(cand);
        }
        if (!ok) throw TrainingError("generate_scene: agent placement failed");
    }

    std::vector<AgentState> states(static_cast<std::size_t>(n_agents));
    std::vector<AgentTrajectory> trajs(static_cast<std::size_t>(n_agents));
    const long lead = 60;
    const long steps = lead + length_frames * 10 + lead;

    std::uniform_real_distribution<double> ustep(1.5, 2.2);
    std::uniform_real_distribution<double> uspeed(0.7, 1.3);

    auto next_segment = [&](AgentState& st, AgentTrajectory& tr, bool first) {
        const double r = u01(rng);
        Behavior b;
        if (first) {
            b = (r < 0.75) ? Behavior::Walk : Behavior::Stand;
        } else if (st.behavior == Behavior::Stand) {
            b = (r < 0.75) ? Behavior::Walk : Behavior::Turn;  // no stand twice
        } else if (r < params.stand_prob) {
            b = Behavior::Stand;
        } else if (r < params.stand_prob + params.walk_prob) {
            b = Behavior::Walk;
        } else {
            b = Behavior::Turn;
        }
        long frames;
        switch (b) {
            case Behavior::Stand:
                frames = static_cast<long>((7.0 + 8.0 * u01(rng)) * 30.0);
                st.target_speed = 0.0;
                st.heading_rate = 0.0;
                break;
            case Behavior::Walk:
                frames = static_cast<long>((2.0 + 4.0 * u01(rng)) * 30.0);
                st.target_speed = tr.walk_speed;
                st.heading_rate = -0.25 + 0.5 * u01(rng);  // slow wander
                break;
            default:
                frames = static_cast<long>((0.7 + 1.3 * u01(rng)) * 30.0);
                st.target_speed = 0.0;
                st.heading_rate = (u01(rng) < 0.5 ? -1.0 : 1.0) * (0.8 + 0.8 * u01(rng));
        }
        st.behavior = b;
        st.segment_left = frames * 10;
        tr.schedule.emplace_back(b, frames);
    };

    for (int a = 0; a < n_agents; ++a) {
        auto& tr = trajs[static_cast<std::size_t>(a)];
        auto& st = states[static_cast<std::size_t>(a)];
        tr.agent_id = a;
        tr.lead_steps = lead;
        tr.step_freq_hz = ustep(rng);
        tr.walk_speed = uspeed(rng);
        tr.torso.reserve(static_cast<std::size_t>(steps));
        tr.heading.reserve(static_cast<std::size_t>(steps));
        tr.gait_phase.reserve(static_cast<std::size_t>(steps));
        st.pos = {placed[static_cast<std::size_t>(a)].x(), kTorsoY,
                  placed[static_cast<std::size_t>(a)].y()};
        st.heading = uang(rng);
        next_segment(st, tr, true);
    }

    for (long k = 0; k < steps; ++k) {
        for (int a = 0; a < n_agents; ++a) {
            auto& st = states[static_cast<std::size_t>(a)];
            auto& tr = trajs[static_cast<std::size_t>(a)];
            if (st.segment_left <= 0) next_segment(st, tr, false);
            --st.segment_left;

            double steer = st.heading_rate;
            if (st.behavior == Behavior::Walk) {
                // Steer back toward the arena center near the boundary.
                const double margin = 0.6;
                if (st.pos.x() < kXMin + margin || st.pos.x() > kXMax - margin ||
                    st.pos.z() < kZMin + margin || st.pos.z() > kZMax - margin) {
                    const double to_center = std::atan2(0.0 - st.pos.x(), 7.0 - st.pos.z());
                    const double diff = wrap_angle(to_center - st.heading);
                    steer = std::clamp(diff / kDt, -3.0, 3.0);
                }
                // Mutual avoidance: steer away and slow down when close.
                for (int b2 = 0; b2 < n_agents; ++b2) {
                    if (b2 == a) continue;
                    const auto& other = states[static_cast<std::size_t>(b2)].pos;
                    const Eigen::Vector3d d = st.pos - other;
                    const double dist = std::hypot(d.x(), d.z());
                    if (dist < 1.2) {
                        const double away = std::atan2(d.x(), d.z());
                        const double diff = wrap_angle(away - st.heading);
                        steer += std::clamp(diff, -1.0, 1.0) * 4.0;
                    }
                }
            }

            double speed_scale = 1.0;
            for (int b2 = 0; b2 < n_agents; ++b2) {
                if (b2 == a) continue;
                const auto& other = states[static_cast<std::size_t>(b2)].pos;
                const double dist =
                    std::hypot(st.pos.x() - other.x(), st.pos.z() - other.z());
                speed_scale = std::min(speed_scale, std::clamp((dist - 0.5) / 0.7, 0.25, 1.0));
            }

            const double target = st.target_speed * speed_scale;
            if (st.speed < target)
                st.speed = std::min(target, st.speed + kSpeedRampMps2 * kDt);
            else
                st.speed = std::max(target, st.speed - kSpeedRampMps2 * kDt);

            st.heading = wrap_angle(st.heading + steer * kDt);
            st.pos += st.speed * kDt * dir_of(st.heading);
            st.pos.x() = std::clamp(st.pos.x(), kXMin, kXMax);
            st.pos.z() = std::clamp(st.pos.z(), kZMin, kZMax);
            // Gait cadence follows the actual speed so stops are smooth.
            const double cadence =
                2.0 * M_PI * tr.step_freq_hz * (tr.walk_speed > 0 ? st.speed / tr.walk_speed : 0.0);
            st.gait_phase += cadence * kDt;

            tr.torso.push_back(st.pos);
            tr.heading.push_back(st.heading);
            tr.gait_phase.push_back(st.gait_phase);
        }
    }

    std::uniform_int_distribution<std::uint64_t> useed;
    rec.tracks.n_frames = length_frames;
    for (int a = 0; a < n_agents; ++a) {
        auto& tr = trajs[static_cast<std::size_t>(a)];
        rec.tracks.people[a] = project_agent(camera, tr, length_frames, params);
        rec.tracks.people[a].person_id = a;
        rec.imu[a] = synthesize_imu(tr, length_frames, useed(rng), params);
    }
    rec.agents = std::move(trajs);
    return rec;
}

}  // namespace vilo::sim
