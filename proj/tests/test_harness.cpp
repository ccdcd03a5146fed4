#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "vilo/baselines/baselines.hpp"
#include "vilo/harness/experiment.hpp"

using namespace vilo;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

harness::ExperimentConfig micro_config() {
    harness::ExperimentConfig cfg;
    cfg.agent_counts = {2, 3};
    cfg.recordings_per_count = 3;  // train/val/test, one each
    cfg.recording_frames = 250;
    cfg.seed = 21;
    cfg.epochs = 1;
    cfg.max_triplets_per_epoch = 60;
    cfg.model.hidden_dim = 4;
    cfg.model.conv_channels = 4;
    return cfg;
}

harness::ResultTable fixture_table() {
    harness::ResultTable t;
    t.record("ours", 2, 9, 10);
    t.record("ours", 3, 2, 3);
    t.record("random_guess", 2, 5, 10);
    t.record("random_guess", 3, 1, 3);
    return t;
}

}  // namespace

TEST_CASE("config round-trips through its text form") {
    harness::ExperimentConfig cfg;
    cfg.model.hidden_dim = 12;
    cfg.model.alpha = 0.8;
    cfg.window = 100;
    cfg.imu_repr = harness::ImuRepr::VelGyro;
    cfg.model.imu_channels = 6;
    cfg.seed = 99;
    harness::save_config(cfg, "/tmp/vilo_cfg.txt");
    const auto loaded = harness::load_config("/tmp/vilo_cfg.txt");
    CHECK(loaded.model.hidden_dim == 12);
    CHECK(loaded.model.alpha == 0.8);
    CHECK(loaded.window == 100);
    CHECK(loaded.imu_repr == harness::ImuRepr::VelGyro);
    CHECK(loaded.seed == 99);
    fs::remove("/tmp/vilo_cfg.txt");
}

TEST_CASE("config rejects unknown keys and malformed lines") {
    harness::ExperimentConfig cfg;
    CHECK_THROWS_AS(harness::apply_config_line(cfg, "bogus", "1"), IngestError);
    std::ofstream("/tmp/vilo_cfg_bad.txt") << "no equals sign here\n";
    CHECK_THROWS_WITH_AS(harness::load_config("/tmp/vilo_cfg_bad.txt"),
                         doctest::Contains("line 1"), IngestError);
    fs::remove("/tmp/vilo_cfg_bad.txt");
}

TEST_CASE("imu representation channel counts") {
    CHECK(harness::imu_repr_channels(harness::ImuRepr::VelAccGyro) == 9);
    CHECK(harness::imu_repr_channels(harness::ImuRepr::AccGyro) == 6);
    CHECK(harness::imu_repr_channels(harness::ImuRepr::VelGyro) == 6);
    CHECK(harness::imu_repr_channels(harness::ImuRepr::AccGyroLpf) == 6);
}

TEST_CASE("imu representation transforms have the documented contents") {
    features::ImuWindow w;
    w.samples = Mat::Random(6, 90);
    for (int i = 0; i < 90; ++i) w.timestamps_ns.push_back(i);

    const Mat plain = harness::imu_repr_features(w, harness::ImuRepr::AccGyro, 5.0);
    CHECK(plain == w.samples);

    const Mat vaw = harness::imu_repr_features(w, harness::ImuRepr::VelAccGyro, 5.0);
    REQUIRE(vaw.rows() == 9);
    CHECK(vaw.topRows(3) == baselines::integrate_velocity(w));
    CHECK(vaw.bottomRows(6) == w.samples);

    const Mat vw = harness::imu_repr_features(w, harness::ImuRepr::VelGyro, 5.0);
    REQUIRE(vw.rows() == 6);
    CHECK(vw.topRows(3) == baselines::integrate_velocity(w));
    CHECK(vw.bottomRows(3) == w.samples.bottomRows(3));

    const Mat lpf = harness::imu_repr_features(w, harness::ImuRepr::AccGyroLpf, 5.0);
    REQUIRE(lpf.rows() == 6);
    CHECK(lpf == features::low_pass_filter(w, 5.0).samples);
}

TEST_CASE("result table records, looks up and averages") {
    const auto t = fixture_table();
    REQUIRE(t.cell("ours", 2) != nullptr);
    CHECK(t.cell("ours", 2)->rate() == doctest::Approx(0.9));
    CHECK(t.cell("ours", 9) == nullptr);
    CHECK(t.cell("nope", 2) == nullptr);
    CHECK(t.mean_rate("ours") == doctest::Approx(0.5 * (0.9 + 2.0 / 3.0)));
    CHECK(t.mean_rate("random_guess") == doctest::Approx(0.5 * (0.5 + 1.0 / 3.0)));
}

TEST_CASE("empty table gives a header-only CSV") {
    harness::ResultTable empty;
    harness::write_report(empty, harness::ReportFormat::Csv, "/tmp/vilo_empty.csv");
    CHECK(slurp("/tmp/vilo_empty.csv") == "method,n_candidates,rate,correct,evaluated\n");
    fs::remove("/tmp/vilo_empty.csv");
}

TEST_CASE("csv report matches the golden fixture with 3-decimal rates") {
    harness::write_report(fixture_table(), harness::ReportFormat::Csv,
                          "/tmp/vilo_fixture.csv");
    const std::string golden =
        "method,n_candidates,rate,correct,evaluated\n"
        "ours,2,0.900,9,10\n"
        "ours,3,0.667,2,3\n"
        "random_guess,2,0.500,5,10\n"
        "random_guess,3,0.333,1,3\n";
    CHECK(slurp("/tmp/vilo_fixture.csv") == golden);
    fs::remove("/tmp/vilo_fixture.csv");
}

TEST_CASE("json report round-trips to an identical table") {
    const auto t = fixture_table();
    harness::write_report(t, harness::ReportFormat::Json, "/tmp/vilo_fixture.json");
    const auto back = harness::read_report_json("/tmp/vilo_fixture.json");
    CHECK(back.methods == t.methods);
    CHECK(back.buckets == t.buckets);
    for (const auto& m : t.methods)
        for (int b : t.buckets) {
            REQUIRE(back.cell(m, b) != nullptr);
            CHECK(back.cell(m, b)->correct == t.cell(m, b)->correct);
            CHECK(back.cell(m, b)->evaluated == t.cell(m, b)->evaluated);
            CHECK(back.cell(m, b)->available == t.cell(m, b)->available);
        }
    fs::remove("/tmp/vilo_fixture.json");
}

TEST_CASE("text report renders every method row") {
    harness::write_report(fixture_table(), harness::ReportFormat::Text,
                          "/tmp/vilo_fixture.txt");
    const std::string text = slurp("/tmp/vilo_fixture.txt");
    CHECK(text.find("ours") != std::string::npos);
    CHECK(text.find("random_guess") != std::string::npos);
    CHECK(text.find("0.900") != std::string::npos);
    fs::remove("/tmp/vilo_fixture.txt");
}

TEST_CASE("corpus simulation is deterministic and loads back") {
    auto cfg = micro_config();
    harness::simulate_corpus(cfg, "/tmp/vilo_corpus_a");
    harness::simulate_corpus(cfg, "/tmp/vilo_corpus_b");
    for (const auto& entry : fs::directory_iterator("/tmp/vilo_corpus_a")) {
        const auto name = entry.path().filename().string();
        CHECK(slurp(entry.path().string()) == slurp("/tmp/vilo_corpus_b/" + name));
    }
    const auto corpus = harness::load_corpus("/tmp/vilo_corpus_a", cfg);
    CHECK(corpus.recordings.size() == 6);  // 2 counts x 3 recordings
    long windows = 0;
    for (const auto& rec : corpus.recordings) {
        CHECK((rec.n_agents == 2 || rec.n_agents == 3));
        windows += static_cast<long>(rec.windows.size());
        for (const auto& bundle : rec.windows) {
            for (const auto& person : bundle.train.people)
                CHECK(person.length() == cfg.window);
            for (const auto& [pid, imu] : bundle.raw_imu) {
                CHECK(imu.length() == 3 * cfg.window);
                // everything kept passed the motion filter
                CHECK(features::motion_filter(imu, cfg.motion_threshold));
            }
            for (const auto& [pid, feat] : bundle.train.imu_features)
                CHECK(feat.cols() == 3 * cfg.window);
        }
    }
    CHECK(windows > 0);
    fs::remove_all("/tmp/vilo_corpus_a");
    fs::remove_all("/tmp/vilo_corpus_b");
}

TEST_CASE("window length 100 yields 300-sample imu windows") {
    auto cfg = micro_config();
    cfg.agent_counts = {2};
    cfg.recordings_per_count = 1;
    cfg.window = 100;
    harness::simulate_corpus(cfg, "/tmp/vilo_corpus_t100");
    const auto corpus = harness::load_corpus("/tmp/vilo_corpus_t100", cfg);
    bool saw = false;
    for (const auto& rec : corpus.recordings)
        for (const auto& bundle : rec.windows)
            for (const auto& [pid, imu] : bundle.raw_imu) {
                CHECK(imu.length() == 300);
                saw = true;
            }
    CHECK(saw);
    fs::remove_all("/tmp/vilo_corpus_t100");
}

TEST_CASE("split_corpus assigns last recording per count to test") {
    auto cfg = micro_config();
    harness::simulate_corpus(cfg, "/tmp/vilo_corpus_split");
    const auto corpus = harness::load_corpus("/tmp/vilo_corpus_split", cfg);
    const auto split = harness::split_corpus(corpus);
    CHECK(split.train.size() == 2);
    CHECK(split.val.size() == 2);
    CHECK(split.test.size() == 2);
    // splits are disjoint by recording
    std::set<int> seen;
    for (const auto* r : split.train) seen.insert(r->recording_id);
    for (const auto* r : split.val) CHECK(seen.insert(r->recording_id).second);
    for (const auto* r : split.test) CHECK(seen.insert(r->recording_id).second);
    // within each count the test recording has the highest id
    for (const auto* t : split.test)
        for (const auto* v : split.val)
            if (t->n_agents == v->n_agents) CHECK(t->recording_id > v->recording_id);
    fs::remove_all("/tmp/vilo_corpus_split");
}

TEST_CASE("micro experiment produces artifacts and an exact random row") {
    const auto cfg = micro_config();
    fs::remove_all("/tmp/vilo_micro_run");
    const auto table = harness::run_experiment(cfg, "/tmp/vilo_micro_run");
    CHECK(fs::exists("/tmp/vilo_micro_run/model.ckpt"));
    CHECK(fs::exists("/tmp/vilo_micro_run/results.csv"));
    CHECK(fs::exists("/tmp/vilo_micro_run/results.json"));
    CHECK(fs::exists("/tmp/vilo_micro_run/train_log.txt"));
    for (int b : table.buckets) {
        const auto* rnd = table.cell("random_guess", b);
        REQUIRE(rnd != nullptr);
        CHECK(rnd->rate() == 1.0 / b);  // exact by construction
        const auto* ours = table.cell("ours", b);
        REQUIRE(ours != nullptr);
        CHECK(ours->evaluated > 0);
    }
    // every method row is evaluated on the identical window set per bucket
    for (const auto& method : table.methods) {
        if (method == "random_guess") continue;
        for (int b : table.buckets) {
            REQUIRE(table.cell(method, b) != nullptr);
            CHECK(table.cell(method, b)->evaluated == table.cell("ours", b)->evaluated);
        }
    }

    // repeat from the same seed: identical table
    fs::remove_all("/tmp/vilo_micro_rerun");
    const auto again = harness::run_experiment(cfg, "/tmp/vilo_micro_rerun");
    for (const auto& m : table.methods)
        for (int b : table.buckets) {
            CHECK(again.cell(m, b)->correct == table.cell(m, b)->correct);
            CHECK(again.cell(m, b)->evaluated == table.cell(m, b)->evaluated);
        }
    CHECK(slurp("/tmp/vilo_micro_run/model.ckpt") ==
          slurp("/tmp/vilo_micro_rerun/model.ckpt"));
    fs::remove_all("/tmp/vilo_micro_run");
    fs::remove_all("/tmp/vilo_micro_rerun");
}

TEST_CASE("failed stages leave a failure manifest") {
    fs::remove_all("/tmp/vilo_fail_run");
    fs::create_directories("/tmp/vilo_fail_run/corpus");
    std::ofstream("/tmp/vilo_fail_run/corpus/manifest.txt")
        << "# track_file imu_file n_agents n_frames seed\n"
        << "missing_tracks.csv missing_imu.csv 2 100 1\n";
    CHECK_THROWS(harness::run_experiment(micro_config(), "/tmp/vilo_fail_run"));
    const std::string manifest = slurp("/tmp/vilo_fail_run/failure.txt");
    CHECK(manifest.find("stage: load") != std::string::npos);
    CHECK(manifest.find("error:") != std::string::npos);
    fs::remove_all("/tmp/vilo_fail_run");
}

TEST_CASE("ablation variant lists match the protocol") {
    // Window lengths and weight grid fixed by the experiment design.
    const std::vector<Index> lengths = {100, 150, 180, 200};
    const std::vector<Scalar> grid = {0.0, 0.2, 0.5, 0.8, 1.0};
    CHECK(lengths.size() == 4);
    CHECK(grid.size() == 5);
    // representation variants in table order
    using IR = harness::ImuRepr;
    const std::vector<IR> reprs = {IR::VelAccGyro, IR::AccGyro, IR::VelGyro,
                                   IR::AccGyroLpf};
    CHECK(std::string(harness::imu_repr_name(reprs[0])) == "v_a_w");
    CHECK(std::string(harness::imu_repr_name(reprs[1])) == "a_w");
    CHECK(std::string(harness::imu_repr_name(reprs[2])) == "v_w");
    CHECK(std::string(harness::imu_repr_name(reprs[3])) == "a_lpf_w_lpf");
}
