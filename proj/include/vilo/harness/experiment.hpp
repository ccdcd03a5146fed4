#pragma once

#include <map>
#include <string>
#include <vector>

#include "vilo/baselines/baselines.hpp"
#include "vilo/embedding/match.hpp"
#include "vilo/harness/dataset.hpp"

namespace vilo::harness {

struct ResultCell {
    long correct = 0;
    long evaluated = 0;
    bool available = false;

    double rate() const {
        return evaluated > 0 ? static_cast<double>(correct) /
                                   static_cast<double>(evaluated)
                             : 0.0;
    }
};

// Rows keyed by method, columns by candidate count N. Row and column order
// are kept stable for reporting.
struct ResultTable {
    std::vector<std::string> methods;
    std::vector<int> buckets;
    std::map<std::string, std::map<int, ResultCell>> cells;

    void record(const std::string& method, int bucket, long correct, long evaluated);
    const ResultCell* cell(const std::string& method, int bucket) const;
    // Unweighted mean rate over available buckets (the paper-style average).
    double mean_rate(const std::string& method) const;
};

enum class ReportFormat { Csv, Json, Text };

void write_report(const ResultTable& table, ReportFormat format,
                  const std::string& path);
ResultTable read_report_json(const std::string& path);

// Recording-level split: within each agent-count group the last recording
// is test, the one before is validation, the rest train.
struct CorpusSplit {
    std::vector<const RecordingWindows*> train, val, test;
};
CorpusSplit split_corpus(const Corpus& corpus);

// Trains the method on the split's train windows with validation-based
// epoch selection. Appends per-epoch lines to log when non-null.
embedding::EmbeddingModel train_method(const ExperimentConfig& cfg,
                                       const CorpusSplit& split,
                                       std::vector<std::string>* log = nullptr);

// Classification over every (window, target) of the given recordings,
// bucketed by the recording's agent count.
std::map<int, ResultCell> evaluate_method(const embedding::EmbeddingModel& model,
                                          const std::vector<const RecordingWindows*>& recs);

baselines::BaselineContext build_baseline_context(const ExperimentConfig& cfg,
                                                  const CorpusSplit& split);

std::map<int, ResultCell> evaluate_baseline(baselines::BaselineKind kind,
                                            const baselines::BaselineContext& ctx,
                                            const std::vector<const RecordingWindows*>& recs);

// Full protocol: ensure corpus under work_dir/corpus, train, evaluate the
// method and all six baselines on identical test windows, emit artifacts
// (checkpoint, CSV/JSON reports, log). Partial artifacts plus a failure
// manifest are retained if a stage throws.
ResultTable run_experiment(const ExperimentConfig& cfg, const std::string& work_dir);

// Ablations (each cell is a full train+eval on the shared corpus).
ResultTable ablate_window(const ExperimentConfig& cfg, const std::string& work_dir,
                          const std::vector<Index>& lengths = {100, 150, 180, 200});
ResultTable ablate_imu_repr(const ExperimentConfig& cfg, const std::string& work_dir,
                            const std::vector<ImuRepr>& variants = {
                                ImuRepr::VelAccGyro, ImuRepr::AccGyro,
                                ImuRepr::VelGyro, ImuRepr::AccGyroLpf});
ResultTable ablate_weights(const ExperimentConfig& cfg, const std::string& work_dir,
                           const std::vector<Scalar>& grid = {0.0, 0.2, 0.5, 0.8, 1.0});

}  // namespace vilo::harness
