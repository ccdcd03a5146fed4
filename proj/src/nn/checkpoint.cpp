#include "vilo/nn/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace vilo::nn {

namespace {

constexpr char kMagic[8] = {'V', 'I', 'L', 'O', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_raw(std::ostream& os, T value) {
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is) {
    T value{};
    is.read(reinterpret_cast<char*>(&value), sizeof(T));
    return value;
}

}  // namespace

const Mat& Checkpoint::get(const std::string& name) const {
    for (const auto& [n, m] : entries)
        if (n == name) return m;
    throw IngestError("checkpoint: missing entry " + name);
}

bool Checkpoint::has(const std::string& name) const {
    for (const auto& [n, m] : entries)
        if (n == name) return true;
    return false;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IngestError("checkpoint: cannot open " + path + " for writing");
    os.write(kMagic, sizeof(kMagic));
    write_raw<std::uint32_t>(os, kVersion);
    write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(ckpt.entries.size()));
    for (const auto& [name, m] : ckpt.entries) {
        write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_raw<std::uint64_t>(os, static_cast<std::uint64_t>(m.rows()));
        write_raw<std::uint64_t>(os, static_cast<std::uint64_t>(m.cols()));
    }
    for (const auto& [name, m] : ckpt.entries)
        os.write(reinterpret_cast<const char*>(m.data()),
                 static_cast<std::streamsize>(sizeof(Scalar) * m.size()));
    if (!os) throw IngestError("checkpoint: write failure on " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IngestError("checkpoint: cannot open " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw IngestError("checkpoint: bad magic in " + path);
    const auto version = read_raw<std::uint32_t>(is);
    if (version != kVersion)
        throw IngestError("checkpoint: unsupported format version " +
                          std::to_string(version));
    const auto count = read_raw<std::uint32_t>(is);
    Checkpoint ckpt;
    std::vector<std::pair<std::string, std::pair<Index, Index>>> manifest;
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto len = read_raw<std::uint32_t>(is);
        std::string name(len, '\0');
        is.read(name.data(), len);
        const auto rows = read_raw<std::uint64_t>(is);
        const auto cols = read_raw<std::uint64_t>(is);
        manifest.emplace_back(name, std::make_pair(static_cast<Index>(rows),
                                                   static_cast<Index>(cols)));
    }
    for (const auto& [name, shape] : manifest) {
        Mat m(shape.first, shape.second);
        is.read(reinterpret_cast<char*>(m.data()),
                static_cast<std::streamsize>(sizeof(Scalar) * m.size()));
        ckpt.entries.emplace_back(name, std::move(m));
    }
    if (!is) throw IngestError("checkpoint: truncated file " + path);
    return ckpt;
}

}  // namespace vilo::nn
