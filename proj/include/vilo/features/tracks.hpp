#pragma once

#include <vector>

#include "vilo/types.hpp"

namespace vilo::features {

// Per-frame 2D motion of one body part (average optical flow of one
// temporal super-pixel). flow is T x 2, columns (dx, dy) in pixels/frame.
struct PartTrack {
    int person_id = 0;
    int part_id = 0;
    Mat flow;
};

// Bounding-box extents per frame, T x 2 columns (h, w) in pixels.
struct BoxTrack {
    int person_id = 0;
    Mat sizes;
};

// Left/right shoulder offsets relative to the box center, T x 4 columns
// (ls_x, ls_y, rs_x, rs_y) in pixels.
struct KeypointTrack {
    int person_id = 0;
    Mat points;
};

// One person's full visual feature bundle over a T-frame window.
// pad_mask[t] is true for frames synthesized by zero padding; padded frames
// are excluded from distances and losses.
struct PersonWindow {
    int person_id = 0;
    long window_start_frame = 0;
    std::vector<PartTrack> parts;
    BoxTrack box;
    KeypointTrack keypoints;
    std::vector<bool> pad_mask;

    Index length() const { return box.sizes.rows(); }
};

// Fills interior runs of unobserved frames by per-coordinate linear
// interpolation between the enclosing observed frames. Boundary gaps are
// left unobserved (the zero-padding rule handles those). values is T x D.
void interpolate_gaps(Mat& values, std::vector<bool>& observed);

// Appends zero rows until the track has exactly window_length rows and
// returns the padding mask (true = padded).
std::vector<bool> pad_exit(Mat& values, Index window_length);

// Number of sliding windows of length window over an L-frame recording with
// the given step; 0 when L < window.
inline long window_count(long frames, long window, long step) {
    if (frames < window) return 0;
    return (frames - window) / step + 1;
}

}  // namespace vilo::features
