#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "vilo/features/imu.hpp"
#include "vilo/features/ingest.hpp"
#include "vilo/types.hpp"

namespace vilo::sim {

// World frame equals the camera frame: X right, Y down, Z forward.
// The camera sits one meter above the ground, so the ground plane is Y = 1.
struct CameraModel {
    double focal = 600.0;  // px
    double cx = 345.5, cy = 194.5;
    double width = 691.0, height = 389.0;

    // Projects a world point; returns false when behind the camera.
    bool project(const Eigen::Vector3d& p, double& u, double& v) const {
        if (p.z() < 0.5) return false;
        u = focal * p.x() / p.z() + cx;
        v = focal * p.y() / p.z() + cy;
        return true;
    }
    bool in_view(double u, double v) const {
        return u >= 0.0 && u < width && v >= 0.0 && v < height;
    }
};

enum class Behavior { Stand, Walk, Turn };

// Dense kinematic state at the internal simulation rate (300 Hz, a common
// multiple of the 30 Hz video and 100 Hz IMU rates). The state extends
// lead_steps before frame 0 and past the last frame so that IMU central
// differences and resampling have coverage at the boundaries.
struct AgentTrajectory {
    int agent_id = 0;
    double step_freq_hz = 1.8;   // gait phase rate while walking
    double walk_speed = 1.0;     // m/s
    long lead_steps = 60;        // 0.2 s of padding each side
    std::vector<Eigen::Vector3d> torso;  // ground-projected torso center
    std::vector<double> heading;         // rad, wrapped to (-pi, pi]
    std::vector<double> gait_phase;      // rad, frozen while not walking
    std::vector<std::pair<Behavior, long>> schedule;  // (behavior, frames)

    static constexpr double kInternalRate = 300.0;

    long internal_steps() const { return static_cast<long>(torso.size()); }
    // Internal index of video frame f.
    long frame_step(long f) const { return lead_steps + f * 10; }
};

struct SimParams {
    double arm_swing_amp = 0.10;  // m, forward-back at stride frequency
    double bob_amp = 0.03;        // m, vertical at step frequency
    double leg_swing_amp = 0.15;  // m
    double jitter_amp = 0.04;     // rad, hand-held orientation wander
    double noise_accel = 0.02;    // m/s^2
    double noise_gyro = 0.01;     // rad/s
    double stand_prob = 0.30;
    double walk_prob = 0.52;      // turn probability is the remainder
};

struct SceneRecording {
    CameraModel camera;
    long n_frames = 0;
    std::uint64_t seed = 0;
    std::vector<AgentTrajectory> agents;
    features::RecordingTracks tracks;
    std::map<int, features::RawImuStream> imu;
};

// Part ids of the synthetic body model.
enum PartId : int { kHead = 0, kTorso = 1, kLegs = 2, kLeftHand = 3, kPhoneHand = 4 };
constexpr int kNumParts = 5;

// Seeded behavior schedules and trajectories; agents keep at least 0.5 m
// apart. Throws TrainingError when placement fails after bounded retries.
SceneRecording generate_scene(int n_agents, long length_frames, std::uint64_t seed,
                              const SimParams& params = {},
                              const CameraModel& camera = {});

// Pinhole projection of the body model into per-frame track observations.
// Frames where the torso is out of view produce no observation.
features::PersonTimeline project_agent(const CameraModel& camera,
                                       const AgentTrajectory& traj,
                                       long n_frames, const SimParams& params = {});

// Hand-held phone kinematics -> 100 Hz gravity-removed accel + gyro stream.
features::RawImuStream synthesize_imu(const AgentTrajectory& traj, long n_frames,
                                      std::uint64_t seed,
                                      const SimParams& params = {});

// UTC base for synthetic timestamps (arbitrary fixed instant).
constexpr std::int64_t kEpochBaseNs = 1600000000000000000LL;

inline std::int64_t frame_time_ns(long frame) {
    return kEpochBaseNs + static_cast<std::int64_t>(frame * 1e9 / 30.0);
}

// Phone position in the world frame at one internal step; shared between
// projection (phone-hand part) and IMU synthesis so the two modalities stay
// coupled.
Eigen::Vector3d phone_position(const AgentTrajectory& traj, long step,
                               const SimParams& params);

}  // namespace vilo::sim
