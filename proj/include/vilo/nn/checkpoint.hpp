#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vilo/types.hpp"

namespace vilo::nn {

// On-disk model snapshot: a magic string, a format version, a manifest of
// name/shape pairs, then the raw values as little-endian 64-bit reals in
// manifest order (column-major within each block). load(save(x)) is
// bit-identical.
struct Checkpoint {
    std::vector<std::pair<std::string, Mat>> entries;

    void add(const std::string& name, const Mat& value) {
        entries.emplace_back(name, value);
    }
    void add_scalar(const std::string& name, Scalar value) {
        Mat m(1, 1);
        m(0, 0) = value;
        entries.emplace_back(name, m);
    }

    const Mat& get(const std::string& name) const;
    Scalar get_scalar(const std::string& name) const { return get(name)(0, 0); }
    bool has(const std::string& name) const;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace vilo::nn
