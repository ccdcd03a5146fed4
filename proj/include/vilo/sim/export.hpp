#pragma once

#include <string>

#include "vilo/sim/scene.hpp"

namespace vilo::sim {

// Writers for the track/IMU file formats shared with the ingestion side.
// Values are printed with full round-trip precision so exported corpora
// re-ingest losslessly.
void write_track_file(const features::RecordingTracks& tracks, const std::string& path);
void write_imu_file(const std::map<int, features::RawImuStream>& streams,
                    const std::string& path);

struct ManifestEntry {
    std::string track_file;
    std::string imu_file;
    int n_agents = 0;
    long n_frames = 0;
    std::uint64_t seed = 0;
};

void write_manifest(const std::vector<ManifestEntry>& entries, const std::string& path);
std::vector<ManifestEntry> read_manifest(const std::string& path);

}  // namespace vilo::sim
