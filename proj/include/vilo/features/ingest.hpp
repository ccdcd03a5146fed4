#pragma once

#include <map>
#include <string>
#include <vector>

#include "vilo/features/imu.hpp"
#include "vilo/features/tracks.hpp"

namespace vilo::features {

// One person's raw per-frame observations over a whole recording, before
// windowing. Missing frames (occlusion, out of view) are simply absent.
struct FrameObservation {
    double box_h = 0, box_w = 0;
    double center_x = 0, center_y = 0;
    double ls_x = 0, ls_y = 0, rs_x = 0, rs_y = 0;
    std::map<int, std::pair<double, double>> part_flow;  // part_id -> (dx, dy)
};

struct PersonTimeline {
    int person_id = 0;
    std::map<long, FrameObservation> frames;  // frame_index -> observation
};

struct RecordingTracks {
    long n_frames = 0;
    std::map<int, PersonTimeline> people;
};

struct IngestReport {
    long records_parsed = 0;
    long windows_emitted = 0;
    long windows_skipped = 0;  // person too sparsely observed in the window
    std::vector<std::string> issues;
};

// Line-delimited comma-separated track records, header line mandatory:
//   frame_index,person_id,box_h,box_w,center_x,center_y,ls_x,ls_y,rs_x,rs_y
//   followed by repeated part_id,dx,dy triples.
RecordingTracks read_track_file(const std::string& path, IngestReport& report);

// IMU records: timestamp_utc_ns,person_id,a_x,a_y,a_z,w_x,w_y,w_z.
std::map<int, RawImuStream> ingest_imu(const std::string& path);

// Slices a recording into sliding windows and builds gap-filled, padded
// PersonWindows. People observed in fewer than half the window's frames are
// skipped and counted in the report.
std::vector<PersonWindow> window_tracks(const RecordingTracks& tracks,
                                        Index window, Index step,
                                        IngestReport& report);

// read_track_file + window_tracks in one call.
std::vector<PersonWindow> ingest_tracks(const std::string& path, Index window,
                                        Index step, IngestReport& report);

}  // namespace vilo::features
