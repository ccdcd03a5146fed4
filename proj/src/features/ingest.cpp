#include "vilo/features/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace vilo::features {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

double parse_real(const std::string& s, long line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IngestError("line " + std::to_string(line_no) +
                          ": malformed numeric field '" + s + "'");
    }
}

long parse_long(const std::string& s, long line_no) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IngestError("line " + std::to_string(line_no) +
                          ": malformed integer field '" + s + "'");
    }
}

}  // namespace

RecordingTracks read_track_file(const std::string& path, IngestReport& report) {
    std::ifstream is(path);
    if (!is) throw IngestError("cannot open track file " + path);

    RecordingTracks tracks;
    std::string line;
    long line_no = 0;
    if (!std::getline(is, line))
        return tracks;  // empty file: zero people, zero errors
    ++line_no;
    if (line.rfind("frame_index,person_id", 0) != 0)
        throw IngestError("line 1: missing track file header");

    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() < 10 || (f.size() - 10) % 3 != 0)
            throw IngestError("line " + std::to_string(line_no) +
                              ": expected 10+3k fields, got " +
                              std::to_string(f.size()));
        const long frame = parse_long(f[0], line_no);
        const int person = static_cast<int>(parse_long(f[1], line_no));
        FrameObservation obs;
        obs.box_h = parse_real(f[2], line_no);
        obs.box_w = parse_real(f[3], line_no);
        obs.center_x = parse_real(f[4], line_no);
        obs.center_y = parse_real(f[5], line_no);
        obs.ls_x = parse_real(f[6], line_no);
        obs.ls_y = parse_real(f[7], line_no);
        obs.rs_x = parse_real(f[8], line_no);
        obs.rs_y = parse_real(f[9], line_no);
        if (obs.box_h < 0 || obs.box_w < 0)
            throw IngestError("line " + std::to_string(line_no) +
                              ": negative box extent");
        for (std::size_t i = 10; i + 2 < f.size(); i += 3) {
            const int part = static_cast<int>(parse_long(f[i], line_no));
            obs.part_flow[part] = {parse_real(f[i + 1], line_no),
                                   parse_real(f[i + 2], line_no)};
        }
        auto& timeline = tracks.people[person];
        timeline.person_id = person;
        timeline.frames[frame] = std::move(obs);
        tracks.n_frames = std::max(tracks.n_frames, frame + 1);
        ++report.records_parsed;
    }
    return tracks;
}

std::map<int, RawImuStream> ingest_imu(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IngestError("cannot open IMU file " + path);

    std::map<int, std::vector<std::pair<std::int64_t, Eigen::Matrix<Scalar, 6, 1>>>> rows;
    std::string line;
    long line_no = 0;
    if (!std::getline(is, line)) return {};
    ++line_no;
    if (line.rfind("timestamp_utc_ns,person_id", 0) != 0)
        throw IngestError("line 1: missing IMU file header");

    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 8)
            throw IngestError("line " + std::to_string(line_no) +
                              ": expected 8 fields, got " + std::to_string(f.size()));
        const auto ts = static_cast<std::int64_t>(parse_long(f[0], line_no));
        const int person = static_cast<int>(parse_long(f[1], line_no));
        Eigen::Matrix<Scalar, 6, 1> sample;
        for (int i = 0; i < 6; ++i) sample[i] = parse_real(f[2 + i], line_no);
        if (!sample.allFinite())
            throw IngestError("line " + std::to_string(line_no) + ": non-finite sample");
        rows[person].emplace_back(ts, sample);
    }

    std::map<int, RawImuStream> streams;
    for (auto& [person, samples] : rows) {
        std::sort(samples.begin(), samples.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        RawImuStream s;
        s.person_id = person;
        s.samples.resize(6, static_cast<Index>(samples.size()));
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (i > 0 && samples[i].first <= samples[i - 1].first)
                throw IngestError("duplicate IMU timestamp for person " +
                                  std::to_string(person));
            s.timestamps_ns.push_back(samples[i].first);
            s.samples.col(static_cast<Index>(i)) = samples[i].second;
        }
        streams[person] = std::move(s);
    }
    return streams;
}

namespace {

// Builds one gap-filled track matrix for a person over [start, start+W).
// extract pulls D values out of an observation.
template <typename Extract>
std::pair<Mat, std::vector<bool>> build_track(const PersonTimeline& timeline,
                                              long start, Index window, Index dims,
                                              Extract extract) {
    Mat values = Mat::Zero(window, dims);
    std::vector<bool> observed(static_cast<std::size_t>(window), false);
    for (Index t = 0; t < window; ++t) {
        auto it = timeline.frames.find(start + t);
        if (it == timeline.frames.end()) continue;
        if (extract(it->second, values, t)) observed[static_cast<std::size_t>(t)] = true;
    }
    interpolate_gaps(values, observed);
    for (Index t = 0; t < window; ++t)
        if (!observed[static_cast<std::size_t>(t)]) values.row(t).setZero();
    return {values, observed};
}

}  // namespace

std::vector<PersonWindow> window_tracks(const RecordingTracks& tracks,
                                        Index window, Index step,
                                        IngestReport& report) {
    std::vector<PersonWindow> out;
    const long n_windows = window_count(tracks.n_frames, window, step);
    for (long w = 0; w < n_windows; ++w) {
        const long start = w * step;
        for (const auto& [pid, timeline] : tracks.people) {
            long observed_count = 0;
            std::vector<int> part_ids;
            for (Index t = 0; t < window; ++t) {
                auto it = timeline.frames.find(start + t);
                if (it == timeline.frames.end()) continue;
                ++observed_count;
                for (const auto& [part, flow] : it->second.part_flow)
                    if (std::find(part_ids.begin(), part_ids.end(), part) == part_ids.end())
                        part_ids.push_back(part);
            }
            if (observed_count == 0) continue;
            if (observed_count < window / 2) {
                ++report.windows_skipped;
                continue;
            }

            PersonWindow pw;
            pw.person_id = pid;
            pw.window_start_frame = start;

            auto [box, box_mask] = build_track(
                timeline, start, window, 2,
                [](const FrameObservation& o, Mat& v, Index t) {
                    v(t, 0) = o.box_h;
                    v(t, 1) = o.box_w;
                    return true;
                });
            pw.box = BoxTrack{pid, box};
            auto [kp, kp_mask] = build_track(
                timeline, start, window, 4,
                [](const FrameObservation& o, Mat& v, Index t) {
                    v(t, 0) = o.ls_x;
                    v(t, 1) = o.ls_y;
                    v(t, 2) = o.rs_x;
                    v(t, 3) = o.rs_y;
                    return true;
                });
            pw.keypoints = KeypointTrack{pid, kp};

            std::sort(part_ids.begin(), part_ids.end());
            for (int part : part_ids) {
                auto [flow, mask] = build_track(
                    timeline, start, window, 2,
                    [part](const FrameObservation& o, Mat& v, Index t) {
                        auto it = o.part_flow.find(part);
                        if (it == o.part_flow.end()) return false;
                        v(t, 0) = it->second.first;
                        v(t, 1) = it->second.second;
                        return true;
                    });
                pw.parts.push_back(PartTrack{pid, part, flow});
            }

            pw.pad_mask.assign(static_cast<std::size_t>(window), false);
            for (Index t = 0; t < window; ++t)
                pw.pad_mask[static_cast<std::size_t>(t)] = !box_mask[static_cast<std::size_t>(t)];
            out.push_back(std::move(pw));
            ++report.windows_emitted;
        }
    }
    return out;
}

std::vector<PersonWindow> ingest_tracks(const std::string& path, Index window,
                                        Index step, IngestReport& report) {
    const RecordingTracks tracks = read_track_file(path, report);
    return window_tracks(tracks, window, step, report);
}

}  // namespace vilo::features
