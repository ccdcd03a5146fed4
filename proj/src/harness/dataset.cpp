#include "vilo/harness/dataset.hpp"

#include <filesystem>

#include "vilo/baselines/baselines.hpp"
#include "vilo/sim/export.hpp"

namespace vilo::harness {

Mat imu_repr_features(const features::ImuWindow& window, ImuRepr repr,
                      double lpf_cutoff_hz) {
    switch (repr) {
        case ImuRepr::AccGyro:
            return window.samples;
        case ImuRepr::AccGyroLpf:
            return features::low_pass_filter(window, lpf_cutoff_hz).samples;
        case ImuRepr::VelAccGyro: {
            Mat out(9, window.length());
            out.topRows(3) = baselines::integrate_velocity(window);
            out.bottomRows(6) = window.samples;
            return out;
        }
        case ImuRepr::VelGyro: {
            Mat out(6, window.length());
            out.topRows(3) = baselines::integrate_velocity(window);
            out.bottomRows(3) = window.samples.bottomRows(3);
            return out;
        }
    }
    throw DimensionError("imu_repr_features: unknown representation");
}

RecordingWindows build_recording_windows(
    int recording_id, int n_agents, const features::RecordingTracks& tracks,
    const std::map<int, features::RawImuStream>& streams,
    const ExperimentConfig& cfg) {
    RecordingWindows rec;
    rec.recording_id = recording_id;
    rec.n_agents = n_agents;

    features::IngestReport report;
    const auto person_windows =
        features::window_tracks(tracks, cfg.window, cfg.step, report);

    // Group person windows by window start frame.
    std::map<long, std::vector<features::PersonWindow>> by_start;
    for (const auto& pw : person_windows) by_start[pw.window_start_frame].push_back(pw);

    for (auto& [start, people] : by_start) {
        WindowBundle bundle;
        bundle.train.recording_id = recording_id;
        bundle.train.window_start = start;
        const std::int64_t start_ns = sim::frame_time_ns(start);
        for (const auto& pw : people) {
            auto it = streams.find(pw.person_id);
            if (it == streams.end()) continue;  // camera-only person
            features::ImuWindow imu;
            try {
                imu = features::resample_imu(it->second, start_ns, cfg.window);
            } catch (const IngestError& e) {
                rec.issues.push_back("recording " + std::to_string(recording_id) +
                                     " window " + std::to_string(start) + ": " + e.what());
                continue;
            }
            ++rec.targets_total;
            if (!features::motion_filter(imu, cfg.motion_threshold)) {
                ++rec.targets_filtered;
                continue;
            }
            // Gravity-removal plausibility: reported, not dropped.
            Scalar mean_mag = 0.0;
            for (Index k = 0; k < imu.length(); ++k)
                mean_mag += imu.samples.col(k).head(3).norm();
            mean_mag /= static_cast<Scalar>(imu.length());
            if (mean_mag >= 3.0)
                rec.issues.push_back("recording " + std::to_string(recording_id) +
                                     " person " + std::to_string(pw.person_id) +
                                     ": implausible mean accel magnitude " +
                                     std::to_string(mean_mag));
            bundle.raw_imu[pw.person_id] = imu;
            bundle.train.imu_features[pw.person_id] =
                imu_repr_features(imu, cfg.imu_repr, cfg.lpf_cutoff_hz);
        }
        bundle.train.people = people;
        rec.windows.push_back(std::move(bundle));
    }
    return rec;
}

namespace {

std::uint64_t recording_seed(std::uint64_t corpus_seed, int index) {
    // splitmix-style scramble so per-recording streams do not overlap
    std::uint64_t z = corpus_seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

void simulate_corpus(const ExperimentConfig& cfg, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<sim::ManifestEntry> manifest;
    int index = 0;
    for (int n : cfg.agent_counts) {
        for (int r = 0; r < cfg.recordings_per_count; ++r, ++index) {
            const std::uint64_t seed = recording_seed(cfg.seed, index);
            const sim::SceneRecording rec =
                sim::generate_scene(n, cfg.recording_frames, seed, cfg.sim);
            char name[64];
            std::snprintf(name, sizeof(name), "rec_%03d", index);
            sim::ManifestEntry entry;
            entry.track_file = std::string(name) + "_tracks.csv";
            entry.imu_file = std::string(name) + "_imu.csv";
            entry.n_agents = n;
            entry.n_frames = cfg.recording_frames;
            entry.seed = seed;
            sim::write_track_file(rec.tracks, out_dir + "/" + entry.track_file);
            sim::write_imu_file(rec.imu, out_dir + "/" + entry.imu_file);
            manifest.push_back(entry);
        }
    }
    sim::write_manifest(manifest, out_dir + "/manifest.txt");
}

Corpus load_corpus(const std::string& dir, const ExperimentConfig& cfg) {
    const auto manifest = sim::read_manifest(dir + "/manifest.txt");
    Corpus corpus;
    int id = 0;
    for (const auto& entry : manifest) {
        features::IngestReport report;
        const auto tracks = features::read_track_file(dir + "/" + entry.track_file, report);
        const auto streams = features::ingest_imu(dir + "/" + entry.imu_file);
        corpus.recordings.push_back(
            build_recording_windows(id++, entry.n_agents, tracks, streams, cfg));
    }
    return corpus;
}

}  // namespace vilo::harness
