#include "vilo/harness/config.hpp"

#include <fstream>
#include <sstream>

namespace vilo::harness {

const char* imu_repr_name(ImuRepr repr) {
    switch (repr) {
        case ImuRepr::VelAccGyro: return "v_a_w";
        case ImuRepr::AccGyro: return "a_w";
        case ImuRepr::VelGyro: return "v_w";
        case ImuRepr::AccGyroLpf: return "a_lpf_w_lpf";
    }
    return "unknown";
}

Index imu_repr_channels(ImuRepr repr) {
    return repr == ImuRepr::VelAccGyro ? 9 : 6;
}

namespace {

ImuRepr parse_repr(const std::string& s) {
    if (s == "v_a_w") return ImuRepr::VelAccGyro;
    if (s == "a_w") return ImuRepr::AccGyro;
    if (s == "v_w") return ImuRepr::VelGyro;
    if (s == "a_lpf_w_lpf") return ImuRepr::AccGyroLpf;
    throw IngestError("config: unknown imu_repr '" + s + "'");
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

void apply_config_line(ExperimentConfig& cfg, const std::string& key,
                       const std::string& value) {
    if (key == "hidden_dim") cfg.model.hidden_dim = std::stol(value);
    else if (key == "conv_channels") cfg.model.conv_channels = std::stol(value);
    else if (key == "alpha") cfg.model.alpha = std::stod(value);
    else if (key == "beta") cfg.model.beta = std::stod(value);
    else if (key == "kappa") cfg.model.kappa = std::stod(value);
    else if (key == "image_height") cfg.model.image_height = std::stod(value);
    else if (key == "lr") cfg.lr = std::stod(value);
    else if (key == "epochs") cfg.epochs = std::stoi(value);
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "window") cfg.window = std::stol(value);
    else if (key == "step") cfg.step = std::stol(value);
    else if (key == "lpf_cutoff_hz") cfg.lpf_cutoff_hz = std::stod(value);
    else if (key == "motion_threshold") cfg.motion_threshold = std::stod(value);
    else if (key == "imu_repr") cfg.imu_repr = parse_repr(value);
    else if (key == "recordings_per_count") cfg.recordings_per_count = std::stoi(value);
    else if (key == "recording_frames") cfg.recording_frames = std::stol(value);
    else if (key == "max_triplets_per_epoch") cfg.max_triplets_per_epoch = std::stol(value);
    else if (key == "pair_loss_weight") cfg.pair_loss_weight = std::stod(value);
    else throw IngestError("config: unknown key '" + key + "'");
    cfg.model.imu_channels = imu_repr_channels(cfg.imu_repr);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IngestError("cannot open config " + path);
    ExperimentConfig cfg;
    std::string line;
    long line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw IngestError("config line " + std::to_string(line_no) +
                              ": expected key = value");
        apply_config_line(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return cfg;
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IngestError("cannot open " + path + " for writing");
    os << "hidden_dim = " << cfg.model.hidden_dim << '\n'
       << "conv_channels = " << cfg.model.conv_channels << '\n'
       << "alpha = " << cfg.model.alpha << '\n'
       << "beta = " << cfg.model.beta << '\n'
       << "kappa = " << cfg.model.kappa << '\n'
       << "image_height = " << cfg.model.image_height << '\n'
       << "lr = " << cfg.lr << '\n'
       << "epochs = " << cfg.epochs << '\n'
       << "seed = " << cfg.seed << '\n'
       << "window = " << cfg.window << '\n'
       << "step = " << cfg.step << '\n'
       << "lpf_cutoff_hz = " << cfg.lpf_cutoff_hz << '\n'
       << "motion_threshold = " << cfg.motion_threshold << '\n'
       << "imu_repr = " << imu_repr_name(cfg.imu_repr) << '\n'
       << "recordings_per_count = " << cfg.recordings_per_count << '\n'
       << "recording_frames = " << cfg.recording_frames << '\n'
       << "max_triplets_per_epoch = " << cfg.max_triplets_per_epoch << '\n'
       << "pair_loss_weight = " << cfg.pair_loss_weight << '\n';
}

}  // namespace vilo::harness
