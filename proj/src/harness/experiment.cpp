#include "vilo/harness/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "vilo/nn/checkpoint.hpp"

namespace vilo::harness {

namespace fs = std::filesystem;

void ResultTable::record(const std::string& method, int bucket, long correct,
                         long evaluated) {
    if (std::find(methods.begin(), methods.end(), method) == methods.end())
        methods.push_back(method);
    if (std::find(buckets.begin(), buckets.end(), bucket) == buckets.end()) {
        buckets.push_back(bucket);
        std::sort(buckets.begin(), buckets.end());
    }
    ResultCell cell;
    cell.correct = correct;
    cell.evaluated = evaluated;
    cell.available = evaluated > 0;
    cells[method][bucket] = cell;
}

const ResultCell* ResultTable::cell(const std::string& method, int bucket) const {
    auto mit = cells.find(method);
    if (mit == cells.end()) return nullptr;
    auto bit = mit->second.find(bucket);
    return bit == mit->second.end() ? nullptr : &bit->second;
}

double ResultTable::mean_rate(const std::string& method) const {
    double sum = 0.0;
    int n = 0;
    for (int b : buckets) {
        const ResultCell* c = cell(method, b);
        if (c && c->available) {
            sum += c->rate();
            ++n;
        }
    }
    return n > 0 ? sum / n : 0.0;
}

void write_report(const ResultTable& table, ReportFormat format,
                  const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IngestError("report: cannot open " + path + " for writing");
    switch (format) {
        case ReportFormat::Csv: {
            os << "method,n_candidates,rate,correct,evaluated\n";
            for (const auto& method : table.methods)
                for (int b : table.buckets) {
                    const ResultCell* c = table.cell(method, b);
                    if (!c || !c->available) continue;
                    os << method << ',' << b << ',' << std::fixed
                       << std::setprecision(3) << c->rate() << ',' << c->correct
                       << ',' << c->evaluated << '\n';
                }
            break;
        }
        case ReportFormat::Json: {
            nlohmann::json j;
            j["methods"] = table.methods;
            j["buckets"] = table.buckets;
            auto& rows = j["cells"];
            for (const auto& method : table.methods)
                for (int b : table.buckets) {
                    const ResultCell* c = table.cell(method, b);
                    if (!c) continue;
                    rows.push_back({{"method", method},
                                    {"n", b},
                                    {"correct", c->correct},
                                    {"evaluated", c->evaluated},
                                    {"available", c->available}});
                }
            os << j.dump(2) << '\n';
            break;
        }
        case ReportFormat::Text: {
            os << std::left << std::setw(36) << "Method";
            for (int b : table.buckets) os << "  N=" << std::setw(6) << b;
            os << '\n';
            for (const auto& method : table.methods) {
                os << std::left << std::setw(36) << method;
                for (int b : table.buckets) {
                    const ResultCell* c = table.cell(method, b);
                    if (c && c->available)
                        os << "  " << std::fixed << std::setprecision(3)
                           << std::setw(7) << c->rate();
                    else
                        os << "  " << std::setw(7) << "n/a";
                }
                os << '\n';
            }
            break;
        }
    }
    if (!os) throw IngestError("report: write failure on " + path);
}

ResultTable read_report_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IngestError("report: cannot open " + path);
    nlohmann::json j;
    is >> j;
    ResultTable table;
    table.methods = j["methods"].get<std::vector<std::string>>();
    table.buckets = j["buckets"].get<std::vector<int>>();
    for (const auto& row : j["cells"]) {
        ResultCell cell;
        cell.correct = row["correct"].get<long>();
        cell.evaluated = row["evaluated"].get<long>();
        cell.available = row["available"].get<bool>();
        table.cells[row["method"].get<std::string>()][row["n"].get<int>()] = cell;
    }
    return table;
}

CorpusSplit split_corpus(const Corpus& corpus) {
    std::map<int, std::vector<const RecordingWindows*>> groups;
    for (const auto& rec : corpus.recordings) groups[rec.n_agents].push_back(&rec);
    CorpusSplit split;
    for (auto& [n, recs] : groups) {
        if (recs.size() >= 3) {
            split.test.push_back(recs.back());
            split.val.push_back(recs[recs.size() - 2]);
            for (std::size_t i = 0; i + 2 < recs.size(); ++i)
                split.train.push_back(recs[i]);
        } else if (recs.size() == 2) {
            split.train.push_back(recs[0]);
            split.test.push_back(recs[1]);
        } else if (!recs.empty()) {
            split.train.push_back(recs[0]);
            split.test.push_back(recs[0]);
        }
    }
    return split;
}

namespace {

std::vector<embedding::TrainWindow> collect_train_windows(
    const std::vector<const RecordingWindows*>& recs, bool raw_imu) {
    std::vector<embedding::TrainWindow> out;
    for (const auto* rec : recs)
        for (const auto& bundle : rec->windows) {
            if (bundle.train.imu_features.empty()) continue;
            embedding::TrainWindow w = bundle.train;
            if (raw_imu) {
                w.imu_features.clear();
                for (const auto& [pid, imu] : bundle.raw_imu)
                    w.imu_features[pid] = imu.samples;
            }
            out.push_back(std::move(w));
        }
    return out;
}

// Per-window evaluation: candidate embeddings once, then one match per
// target with inertial coverage.
void evaluate_window_method(const embedding::EmbeddingModel& model,
                            const WindowBundle& bundle, long& correct,
                            long& evaluated) {
    if (bundle.train.people.size() < 2) return;
    for (const auto& [target, imu_feat] : bundle.train.imu_features) {
        const auto result = embedding::match(model, bundle.train.people, imu_feat);
        ++evaluated;
        if (result.predicted_person == target) ++correct;
    }
}

}  // namespace

std::map<int, ResultCell> evaluate_method(
    const embedding::EmbeddingModel& model,
    const std::vector<const RecordingWindows*>& recs) {
    std::map<int, ResultCell> out;
    for (const auto* rec : recs) {
        long correct = 0, evaluated = 0;
        for (const auto& bundle : rec->windows)
            evaluate_window_method(model, bundle, correct, evaluated);
        auto& cell = out[rec->n_agents];
        cell.correct += correct;
        cell.evaluated += evaluated;
        cell.available = cell.evaluated > 0;
    }
    return out;
}

embedding::EmbeddingModel train_method(const ExperimentConfig& cfg,
                                       const CorpusSplit& split,
                                       std::vector<std::string>* log) {
    embedding::ModelConfig model_cfg = cfg.model;
    model_cfg.imu_channels = imu_repr_channels(cfg.imu_repr);
    embedding::EmbeddingModel model(model_cfg);
    std::mt19937_64 rng(cfg.seed);
    model.init(rng);

    const auto train_windows = collect_train_windows(split.train, false);
    embedding::TrainConfig train_cfg;
    train_cfg.epochs = cfg.epochs;
    train_cfg.lr = cfg.lr;
    train_cfg.seed = cfg.seed;
    train_cfg.max_triplets_per_epoch = cfg.max_triplets_per_epoch;
    train_cfg.pair_loss_weight = cfg.pair_loss_weight;

    // Validation picks the epoch; ties keep the earlier epoch.
    embedding::EmbeddingModel best = model;
    double best_rate = -1.0;
    auto on_epoch = [&](int epoch, const embedding::EmbeddingModel& m) {
        long correct = 0, evaluated = 0;
        for (const auto* rec : split.val)
            for (const auto& bundle : rec->windows)
                evaluate_window_method(m, bundle, correct, evaluated);
        const double rate = evaluated > 0
                                ? static_cast<double>(correct) / evaluated
                                : 0.0;
        if (log) {
            std::ostringstream ss;
            ss << "epoch " << epoch << " val_rate " << std::fixed
               << std::setprecision(3) << rate;
            log->push_back(ss.str());
        }
        if (rate > best_rate) {
            best_rate = rate;
            best = m;
        }
    };

    embedding::EpochCallback callback;
    if (!split.val.empty()) callback = on_epoch;
    const auto stats = embedding::train(model, train_windows, train_cfg, callback);
    if (log)
        for (std::size_t e = 0; e < stats.epoch_mean_loss.size(); ++e) {
            std::ostringstream ss;
            ss << "epoch " << e << " mean_loss " << stats.epoch_mean_loss[e];
            log->push_back(ss.str());
        }
    return split.val.empty() ? model : best;
}

baselines::BaselineContext build_baseline_context(const ExperimentConfig& cfg,
                                                  const CorpusSplit& split) {
    baselines::BaselineContext ctx;
    ctx.image_height = cfg.model.image_height;

    // Histogram ranges: p99 of the pooled training magnitudes per kind.
    std::vector<Scalar> vel_values, acc_values;
    for (const auto* rec : split.train)
        for (const auto& bundle : rec->windows) {
            for (const auto& person : bundle.train.people)
                for (const auto& part : person.parts) {
                    const Vec vm = baselines::flow_magnitude(part);
                    const Vec am = baselines::flow_gradient_magnitude(part);
                    for (Index i = 0; i < vm.size(); i += 5) vel_values.push_back(vm[i]);
                    for (Index i = 0; i < am.size(); i += 5) acc_values.push_back(am[i]);
                }
            for (const auto& [pid, imu] : bundle.raw_imu) {
                const Mat vel = baselines::integrate_velocity(imu);
                for (Index t = 0; t < imu.length(); t += 5) {
                    vel_values.push_back(vel.col(t).norm());
                    acc_values.push_back(imu.samples.col(t).head(3).norm());
                }
            }
        }
    auto p99 = [](std::vector<Scalar>& v) -> double {
        if (v.empty()) return 1.0;
        std::sort(v.begin(), v.end());
        const auto idx = static_cast<std::size_t>(0.99 * (v.size() - 1));
        return std::max(v[idx], Scalar(1e-9));
    };
    ctx.vel_hist_max = p99(vel_values);
    ctx.acc_hist_max = p99(acc_values);

    const auto raw_windows = collect_train_windows(split.train, true);
    baselines::RegressorConfig reg_cfg;
    reg_cfg.seed = cfg.seed + 101;
    ctx.orientation = baselines::train_orientation_regressor(raw_windows, reg_cfg,
                                                             cfg.model.image_height);
    reg_cfg.seed = cfg.seed + 202;
    ctx.flow = baselines::train_flow_regressor(raw_windows, reg_cfg);
    return ctx;
}

std::map<int, ResultCell> evaluate_baseline(
    baselines::BaselineKind kind, const baselines::BaselineContext& ctx,
    const std::vector<const RecordingWindows*>& recs) {
    std::map<int, ResultCell> out;
    for (const auto* rec : recs) {
        auto& cell = out[rec->n_agents];
        for (const auto& bundle : rec->windows) {
            if (bundle.train.people.size() < 2) continue;
            for (const auto& [target, imu] : bundle.raw_imu) {
                const auto result =
                    baselines::baseline_match(kind, bundle.train.people, imu, ctx);
                ++cell.evaluated;
                if (result.predicted_person == target) ++cell.correct;
            }
        }
        cell.available = cell.evaluated > 0;
    }
    return out;
}

namespace {

void merge_row(ResultTable& table, const std::string& method,
               const std::map<int, ResultCell>& row) {
    for (const auto& [bucket, cell] : row)
        table.record(method, bucket, cell.correct, cell.evaluated);
}

void ensure_corpus(const ExperimentConfig& cfg, const std::string& corpus_dir) {
    if (!fs::exists(corpus_dir + "/manifest.txt")) simulate_corpus(cfg, corpus_dir);
}

void write_failure(const std::string& work_dir, const std::string& stage,
                   const std::string& what) {
    std::ofstream os(work_dir + "/failure.txt");
    os << "stage: " << stage << "\nerror: " << what << '\n';
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& cfg, const std::string& work_dir) {
    fs::create_directories(work_dir);
    const std::string corpus_dir = work_dir + "/corpus";
    std::string stage = "simulate";
    try {
        ensure_corpus(cfg, corpus_dir);

        stage = "load";
        const Corpus corpus = load_corpus(corpus_dir, cfg);
        const CorpusSplit split = split_corpus(corpus);

        stage = "train";
        std::vector<std::string> log;
        const embedding::EmbeddingModel model = train_method(cfg, split, &log);
        nn::save_checkpoint(model.to_checkpoint(), work_dir + "/model.ckpt");
        {
            std::ofstream os(work_dir + "/train_log.txt");
            for (const auto& line : log) os << line << '\n';
        }

        stage = "baselines";
        const baselines::BaselineContext ctx = build_baseline_context(cfg, split);

        stage = "evaluate";
        ResultTable table;
        // Random-guess reference: rate exactly 1/N by construction (the
        // counts are scaled so correct/evaluated reduces to 1/N).
        const auto method_row = evaluate_method(model, split.test);
        for (const auto& [bucket, cell] : method_row)
            table.record("random_guess", bucket, cell.evaluated,
                         cell.evaluated * bucket);
        using BK = baselines::BaselineKind;
        for (BK kind : {BK::VelMag, BK::VelMagHist, BK::AccelMag, BK::AccelMagHist,
                        BK::Orientation3D, BK::Flow2D})
            merge_row(table, baselines::baseline_name(kind),
                      evaluate_baseline(kind, ctx, split.test));
        merge_row(table, "ours", method_row);

        stage = "report";
        write_report(table, ReportFormat::Csv, work_dir + "/results.csv");
        write_report(table, ReportFormat::Json, work_dir + "/results.json");
        write_report(table, ReportFormat::Text, work_dir + "/results.txt");
        return table;
    } catch (const std::exception& e) {
        write_failure(work_dir, stage, e.what());
        throw;
    }
}

namespace {

// Shared helper for ablations: train + evaluate one configuration on the
// corpus already present under work_dir/corpus.
std::map<int, ResultCell> ablation_cell(const ExperimentConfig& cfg,
                                        const std::string& corpus_dir) {
    const Corpus corpus = load_corpus(corpus_dir, cfg);
    const CorpusSplit split = split_corpus(corpus);
    const embedding::EmbeddingModel model = train_method(cfg, split, nullptr);
    return evaluate_method(model, split.test);
}

}  // namespace

ResultTable ablate_window(const ExperimentConfig& cfg, const std::string& work_dir,
                          const std::vector<Index>& lengths) {
    fs::create_directories(work_dir);
    const std::string corpus_dir = work_dir + "/corpus";
    ensure_corpus(cfg, corpus_dir);
    ResultTable table;
    for (Index length : lengths) {
        ExperimentConfig c = cfg;
        c.window = length;
        merge_row(table, "window_" + std::to_string(length),
                  ablation_cell(c, corpus_dir));
    }
    return table;
}

ResultTable ablate_imu_repr(const ExperimentConfig& cfg, const std::string& work_dir,
                            const std::vector<ImuRepr>& variants) {
    fs::create_directories(work_dir);
    const std::string corpus_dir = work_dir + "/corpus";
    ensure_corpus(cfg, corpus_dir);
    ResultTable table;
    for (ImuRepr repr : variants) {
        ExperimentConfig c = cfg;
        c.imu_repr = repr;
        c.model.imu_channels = imu_repr_channels(repr);
        merge_row(table, imu_repr_name(repr), ablation_cell(c, corpus_dir));
    }
    return table;
}

ResultTable ablate_weights(const ExperimentConfig& cfg, const std::string& work_dir,
                           const std::vector<Scalar>& grid) {
    fs::create_directories(work_dir);
    const std::string corpus_dir = work_dir + "/corpus";
    ensure_corpus(cfg, corpus_dir);
    ResultTable table;
    for (Scalar alpha : grid) {
        ExperimentConfig c = cfg;
        c.model.alpha = alpha;
        c.model.beta = 0.2;
        std::ostringstream name;
        name << "alpha_" << std::fixed << std::setprecision(1) << alpha;
        merge_row(table, name.str(), ablation_cell(c, corpus_dir));
    }
    for (Scalar beta : grid) {
        ExperimentConfig c = cfg;
        c.model.alpha = 0.5;
        c.model.beta = beta;
        std::ostringstream name;
        name << "beta_" << std::fixed << std::setprecision(1) << beta;
        merge_row(table, name.str(), ablation_cell(c, corpus_dir));
    }
    return table;
}

}  // namespace vilo::harness
