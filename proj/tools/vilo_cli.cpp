// Command-line front end: corpus simulation, external-track extraction,
// training, evaluation, baselines, ablations and report conversion.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vilo/features/ingest.hpp"
#include "vilo/harness/experiment.hpp"
#include "vilo/nn/checkpoint.hpp"

namespace {

using vilo::harness::ExperimentConfig;
using vilo::harness::ReportFormat;
using vilo::harness::ResultTable;

struct ConfigArgs {
    std::string config_file;
    std::vector<std::string> sets;  // key=value overrides
};

void add_config_options(CLI::App* app, ConfigArgs& args) {
    app->add_option("--config", args.config_file, "key = value config file");
    app->add_option("--set", args.sets,
                    "override a config key, e.g. --set window=100 (repeatable; "
                    "keys: hidden_dim conv_channels alpha beta kappa image_height "
                    "lr epochs seed window step lpf_cutoff_hz motion_threshold "
                    "imu_repr recordings_per_count recording_frames "
                    "max_triplets_per_epoch pair_loss_weight)");
}

ExperimentConfig resolve_config(const ConfigArgs& args) {
    ExperimentConfig cfg;
    if (!args.config_file.empty()) cfg = vilo::harness::load_config(args.config_file);
    for (const auto& kv : args.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw vilo::IngestError("--set expects key=value, got '" + kv + "'");
        vilo::harness::apply_config_line(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

ReportFormat parse_format(const std::string& s) {
    if (s == "csv") return ReportFormat::Csv;
    if (s == "json") return ReportFormat::Json;
    if (s == "text") return ReportFormat::Text;
    throw vilo::IngestError("unknown report format '" + s + "'");
}

void print_table(const ResultTable& table) {
    for (const auto& method : table.methods) {
        std::printf("%-28s", method.c_str());
        for (int b : table.buckets) {
            const auto* c = table.cell(method, b);
            if (c && c->available)
                std::printf("  N=%d %.3f", b, c->rate());
            else
                std::printf("  N=%d  n/a", b);
        }
        std::printf("  mean %.3f\n", table.mean_rate(method));
    }
}

// --check assertions shared by eval/baseline: the method must beat the
// random-guess floor in every bucket and every baseline in the mean.
int check_table(const ResultTable& table) {
    int failures = 0;
    for (int b : table.buckets) {
        const auto* c = table.cell("ours", b);
        if (!c || !c->available) continue;
        const double floor = 1.0 / b;
        const bool ok = c->rate() > floor;
        std::printf("[%s] ours N=%d rate %.3f > random %.3f\n",
                    ok ? "pass" : "FAIL", b, c->rate(), floor);
        if (!ok) ++failures;
    }
    const double ours_mean = table.mean_rate("ours");
    for (const auto& method : table.methods) {
        if (method == "ours" || method == "random_guess") continue;
        const bool ok = ours_mean > table.mean_rate(method);
        std::printf("[%s] ours mean %.3f > %s mean %.3f\n", ok ? "pass" : "FAIL",
                    ours_mean, method.c_str(), table.mean_rate(method));
        if (!ok) ++failures;
    }
    return failures;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"visual-inertial person localization"};
    app.require_subcommand(1);

    ConfigArgs cfg_args;
    std::uint64_t seed = 0;
    std::string corpus_dir, work_dir = "work", out_path, model_path;
    std::string format_name = "text";
    std::string tracks_path, imu_path;
    std::string ablation_axis;
    bool check = false;

    auto* cmd_simulate = app.add_subcommand("simulate", "generate a synthetic corpus");
    add_config_options(cmd_simulate, cfg_args);
    cmd_simulate->add_option("--seed", seed, "corpus seed")->required();
    cmd_simulate->add_option("--out", corpus_dir, "output corpus directory")->required();

    auto* cmd_extract = app.add_subcommand(
        "extract", "ingest external track/IMU files and report window stats");
    add_config_options(cmd_extract, cfg_args);
    cmd_extract->add_option("--tracks", tracks_path, "track CSV")->required();
    cmd_extract->add_option("--imu", imu_path, "IMU CSV")->required();

    auto* cmd_train = app.add_subcommand("train", "train the embedding model");
    add_config_options(cmd_train, cfg_args);
    cmd_train->add_option("--seed", seed, "training seed")->required();
    cmd_train->add_option("--corpus", corpus_dir, "corpus directory")->required();
    cmd_train->add_option("--out", model_path, "checkpoint path")->required();

    auto* cmd_eval = app.add_subcommand("eval", "evaluate a trained model");
    add_config_options(cmd_eval, cfg_args);
    cmd_eval->add_option("--corpus", corpus_dir, "corpus directory")->required();
    cmd_eval->add_option("--model", model_path, "checkpoint path")->required();
    cmd_eval->add_option("--out", out_path, "report path");
    cmd_eval->add_option("--format", format_name, "csv|json|text");
    cmd_eval->add_flag("--check", check, "exit nonzero if assertions fail");

    auto* cmd_baseline = app.add_subcommand("baseline", "run the six baselines");
    add_config_options(cmd_baseline, cfg_args);
    cmd_baseline->add_option("--corpus", corpus_dir, "corpus directory")->required();
    cmd_baseline->add_option("--out", out_path, "report path");
    cmd_baseline->add_option("--format", format_name, "csv|json|text");

    auto* cmd_ablate = app.add_subcommand("ablate", "run an ablation study");
    add_config_options(cmd_ablate, cfg_args);
    cmd_ablate->add_option("axis", ablation_axis, "window|imu|weights")->required();
    cmd_ablate->add_option("--work", work_dir, "working directory");
    cmd_ablate->add_option("--out", out_path, "report path");
    cmd_ablate->add_option("--format", format_name, "csv|json|text");
    cmd_ablate->add_flag("--check", check, "exit nonzero if assertions fail");

    auto* cmd_run = app.add_subcommand("run", "full protocol: simulate+train+eval");
    add_config_options(cmd_run, cfg_args);
    cmd_run->add_option("--work", work_dir, "working directory");
    cmd_run->add_flag("--check", check, "exit nonzero if assertions fail");

    auto* cmd_report = app.add_subcommand("report", "convert a JSON report");
    cmd_report->add_option("--in", model_path, "input results.json")->required();
    cmd_report->add_option("--out", out_path, "output path")->required();
    cmd_report->add_option("--format", format_name, "csv|json|text");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_simulate->parsed()) {
            ExperimentConfig cfg = resolve_config(cfg_args);
            cfg.seed = seed;
            vilo::harness::simulate_corpus(cfg, corpus_dir);
            std::printf("corpus written to %s\n", corpus_dir.c_str());
        } else if (cmd_extract->parsed()) {
            const ExperimentConfig cfg = resolve_config(cfg_args);
            vilo::features::IngestReport report;
            const auto tracks = vilo::features::read_track_file(tracks_path, report);
            const auto streams = vilo::features::ingest_imu(imu_path);
            const auto rec = vilo::harness::build_recording_windows(
                0, static_cast<int>(tracks.people.size()), tracks, streams, cfg);
            std::printf("people %zu windows %zu targets %ld filtered %ld skipped %ld\n",
                        tracks.people.size(), rec.windows.size(), rec.targets_total,
                        rec.targets_filtered, report.windows_skipped);
            for (const auto& issue : rec.issues)
                std::printf("issue: %s\n", issue.c_str());
        } else if (cmd_train->parsed()) {
            ExperimentConfig cfg = resolve_config(cfg_args);
            cfg.seed = seed;
            const auto corpus = vilo::harness::load_corpus(corpus_dir, cfg);
            const auto split = vilo::harness::split_corpus(corpus);
            std::vector<std::string> log;
            const auto model = vilo::harness::train_method(cfg, split, &log);
            vilo::nn::save_checkpoint(model.to_checkpoint(), model_path);
            for (const auto& line : log) std::printf("%s\n", line.c_str());
            std::printf("checkpoint written to %s\n", model_path.c_str());
        } else if (cmd_eval->parsed()) {
            const ExperimentConfig cfg = resolve_config(cfg_args);
            const auto model = vilo::embedding::EmbeddingModel::from_checkpoint(
                vilo::nn::load_checkpoint(model_path));
            const auto corpus = vilo::harness::load_corpus(corpus_dir, cfg);
            const auto split = vilo::harness::split_corpus(corpus);
            ResultTable table;
            for (const auto& [bucket, cell] :
                 vilo::harness::evaluate_method(model, split.test))
                table.record("ours", bucket, cell.correct, cell.evaluated);
            print_table(table);
            if (!out_path.empty())
                vilo::harness::write_report(table, parse_format(format_name), out_path);
            if (check) return check_table(table) == 0 ? 0 : 1;
        } else if (cmd_baseline->parsed()) {
            const ExperimentConfig cfg = resolve_config(cfg_args);
            const auto corpus = vilo::harness::load_corpus(corpus_dir, cfg);
            const auto split = vilo::harness::split_corpus(corpus);
            const auto ctx = vilo::harness::build_baseline_context(cfg, split);
            ResultTable table;
            using BK = vilo::baselines::BaselineKind;
            for (BK kind : {BK::VelMag, BK::VelMagHist, BK::AccelMag,
                            BK::AccelMagHist, BK::Orientation3D, BK::Flow2D})
                for (const auto& [bucket, cell] :
                     vilo::harness::evaluate_baseline(kind, ctx, split.test))
                    table.record(vilo::baselines::baseline_name(kind), bucket,
                                 cell.correct, cell.evaluated);
            print_table(table);
            if (!out_path.empty())
                vilo::harness::write_report(table, parse_format(format_name), out_path);
        } else if (cmd_ablate->parsed()) {
            const ExperimentConfig cfg = resolve_config(cfg_args);
            ResultTable table;
            if (ablation_axis == "window")
                table = vilo::harness::ablate_window(cfg, work_dir);
            else if (ablation_axis == "imu")
                table = vilo::harness::ablate_imu_repr(cfg, work_dir);
            else if (ablation_axis == "weights")
                table = vilo::harness::ablate_weights(cfg, work_dir);
            else
                throw vilo::IngestError("unknown ablation axis '" + ablation_axis + "'");
            print_table(table);
            if (!out_path.empty())
                vilo::harness::write_report(table, parse_format(format_name), out_path);
            if (check && ablation_axis == "imu") {
                const bool ok = table.mean_rate("a_lpf_w_lpf") >= table.mean_rate("a_w");
                std::printf("[%s] a_lpf_w_lpf mean %.3f >= a_w mean %.3f\n",
                            ok ? "pass" : "FAIL", table.mean_rate("a_lpf_w_lpf"),
                            table.mean_rate("a_w"));
                if (!ok) return 1;
            }
        } else if (cmd_run->parsed()) {
            const ExperimentConfig cfg = resolve_config(cfg_args);
            const ResultTable table = vilo::harness::run_experiment(cfg, work_dir);
            print_table(table);
            if (check) return check_table(table) == 0 ? 0 : 1;
        } else if (cmd_report->parsed()) {
            const ResultTable table = vilo::harness::read_report_json(model_path);
            vilo::harness::write_report(table, parse_format(format_name), out_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
