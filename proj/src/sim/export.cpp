#include "vilo/sim/export.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vilo::sim {

namespace {

std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_track_file(const features::RecordingTracks& tracks, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IngestError("cannot open " + path + " for writing");
    os << "frame_index,person_id,box_h,box_w,center_x,center_y,"
          "ls_x,ls_y,rs_x,rs_y,parts...\n";
    for (long f = 0; f < tracks.n_frames; ++f) {
        for (const auto& [pid, timeline] : tracks.people) {
            auto it = timeline.frames.find(f);
            if (it == timeline.frames.end()) continue;
            const auto& o = it->second;
            os << f << ',' << pid << ',' << fmt_real(o.box_h) << ',' << fmt_real(o.box_w)
               << ',' << fmt_real(o.center_x) << ',' << fmt_real(o.center_y) << ','
               << fmt_real(o.ls_x) << ',' << fmt_real(o.ls_y) << ',' << fmt_real(o.rs_x)
               << ',' << fmt_real(o.rs_y);
            for (const auto& [part, flow] : o.part_flow)
                os << ',' << part << ',' << fmt_real(flow.first) << ','
                   << fmt_real(flow.second);
            os << '\n';
        }
    }
    if (!os) throw IngestError("write failure on " + path);
}

void write_imu_file(const std::map<int, features::RawImuStream>& streams,
                    const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IngestError("cannot open " + path + " for writing");
    os << "timestamp_utc_ns,person_id,a_x,a_y,a_z,w_x,w_y,w_z\n";
    for (const auto& [pid, stream] : streams) {
        for (std::size_t i = 0; i < stream.timestamps_ns.size(); ++i) {
            os << stream.timestamps_ns[i] << ',' << pid;
            for (Index ch = 0; ch < 6; ++ch)
                os << ',' << fmt_real(stream.samples(ch, static_cast<Index>(i)));
            os << '\n';
        }
    }
    if (!os) throw IngestError("write failure on " + path);
}

void write_manifest(const std::vector<ManifestEntry>& entries, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IngestError("cannot open " + path + " for writing");
    os << "# track_file imu_file n_agents n_frames seed\n";
    for (const auto& e : entries)
        os << e.track_file << ' ' << e.imu_file << ' ' << e.n_agents << ' '
           << e.n_frames << ' ' << e.seed << '\n';
    if (!os) throw IngestError("write failure on " + path);
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IngestError("cannot open manifest " + path);
    std::vector<ManifestEntry> entries;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        ManifestEntry e;
        if (!(ss >> e.track_file >> e.imu_file >> e.n_agents >> e.n_frames >> e.seed))
            throw IngestError("malformed manifest line: " + line);
        entries.push_back(e);
    }
    return entries;
}

}  // namespace vilo::sim
