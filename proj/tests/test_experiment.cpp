#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "qdr/experiment.hpp"
#include "qdr/metrics.hpp"
#include "qdr/pipeline.hpp"

using namespace qdr;

namespace {

json tiny_config() {
    json j;
    j["data"] = {{"source", "synthetic"},
                 {"synthetic", {{"rows", 400},
                                {"features", 6},
                                {"positive_fraction", 0.3},
                                {"missing_fraction", 0.05},
                                {"seed", 11}}}};
    j["split"] = {{"fraction", 0.5}, {"seed", 12}};
    j["cv_folds"] = 3;
    j["cv_seed"] = 13;
    j["metric"] = "auc";
    j["classical"] = {{"seeds", {100}},
                      {"eta_grid", {0.3}},
                      {"gbdt", {{"n_estimators", 25}, {"max_depth", 3}}}};
    j["quantum"] = {{"seeds", {200}},
                    {"qubits", 4},
                    {"alpha_grid", {1.0}},
                    {"eta_grid", {0.3}},
                    {"gbdt", {{"n_estimators", 25}, {"max_depth", 3}}}};
    j["ensemble"] = {{"meta_c", {0.2, 0.04}}};
    j["output_dir"] = (std::filesystem::temp_directory_path() / "qdr_exp_test").string();
    return j;
}

}  // namespace

TEST_CASE("quantum pipeline learns the planted signal through the feature map") {
    const auto data = generate_synthetic({600, 5, 0.5, 0.0, 31});
    const auto split = split_dataset(data, 0.5, 7);

    quantum_pipeline_config qc;
    qc.num_qubits = 6;
    qc.alpha = 1.0;
    qc.haar_seed = 5;
    qc.shuffle_seed = 6;
    qc.gbdt_seed = 7;
    qc.gbdt.n_estimators = 60;
    qc.gbdt.max_depth = 3;
    qc.gbdt.learning_rate = 0.2;
    quantum_pipeline pipeline(qc);
    pipeline.fit(split.train);
    const auto scores = pipeline.predict_proba(split.test);
    REQUIRE(auc_score(scores, split.test.labels) >= 0.75);

    // Linear quantum cost: one circuit execution per row per transform pass.
    REQUIRE(pipeline.circuit_executions() == split.train.num_rows + split.test.num_rows);
}

TEST_CASE("quantum pipeline produces identical scores on exact and mps backends") {
    const auto data = generate_synthetic({160, 5, 0.5, 0.0, 37});
    const auto split = split_dataset(data, 0.5, 3);

    quantum_pipeline_config qc;
    qc.num_qubits = 8;
    qc.alpha = 0.75;
    qc.haar_seed = 17;
    qc.shuffle_seed = 18;
    qc.gbdt_seed = 19;
    qc.gbdt.n_estimators = 20;
    qc.gbdt.max_depth = 3;

    quantum_pipeline exact(qc);
    exact.fit(split.train);
    const auto exact_scores = exact.predict_proba(split.test);

    qc.backend.kind = backend_kind::mps;
    qc.backend.chi_max = 4096;
    qc.backend.trunc_tol = 0.0;
    quantum_pipeline mps(qc);
    mps.fit(split.train);
    const auto mps_scores = mps.predict_proba(split.test);

    for (std::size_t i = 0; i < exact_scores.size(); ++i) {
        REQUIRE(mps_scores[i] == Catch::Approx(exact_scores[i]).margin(1e-6));
    }
}

TEST_CASE("quantum pipeline on the shots backend is deterministic and clipped") {
    const auto data = generate_synthetic({80, 4, 0.5, 0.0, 53});
    const auto split = split_dataset(data, 0.5, 9);

    quantum_pipeline_config qc;
    qc.num_qubits = 3;
    qc.alpha = 0.8;
    qc.haar_seed = 2;
    qc.shuffle_seed = 3;
    qc.gbdt_seed = 4;
    qc.shots_seed = 5;
    qc.backend.kind = backend_kind::shots;
    qc.backend.p10 = 0.03;
    qc.backend.p01 = 0.05;
    qc.backend.shots_per_circuit = 2000;
    qc.backend.calibration_shots = 2000;
    qc.gbdt.n_estimators = 10;
    qc.gbdt.max_depth = 2;

    quantum_pipeline a(qc);
    a.fit(split.train);
    const auto projected = a.project_dataset(split.test);
    for (double v : projected.features) {
        REQUIRE(v >= -1.0);
        REQUIRE(v <= 1.0);
    }

    quantum_pipeline b(qc);
    b.fit(split.train);
    REQUIRE(a.predict_proba(split.test) == b.predict_proba(split.test));
}

TEST_CASE("worker pool size does not change projected features") {
    const auto data = generate_synthetic({60, 5, 0.5, 0.0, 57});

    quantum_pipeline_config qc;
    qc.num_qubits = 5;
    qc.alpha = 1.0;
    qc.haar_seed = 12;
    qc.shuffle_seed = 13;
    qc.gbdt_seed = 14;
    qc.gbdt.n_estimators = 5;

    setenv("QDR_WORKERS", "1", 1);
    quantum_pipeline serial(qc);
    serial.fit(data);
    const auto serial_features = serial.project_dataset(data).features;

    setenv("QDR_WORKERS", "3", 1);
    quantum_pipeline threaded(qc);
    threaded.fit(data);
    const auto threaded_features = threaded.project_dataset(data).features;
    unsetenv("QDR_WORKERS");

    REQUIRE(serial_features == threaded_features);
}

TEST_CASE("run_experiment produces a structurally complete report") {
    const auto cfg = parse_config(tiny_config());
    const auto report = run_experiment(cfg);
    const json& body = report.body;

    REQUIRE(body.contains("config_hash"));
    REQUIRE(body["dataset"]["rows"] == 400);
    REQUIRE(body["classical"]["models"].size() == 1);
    REQUIRE(body["quantum"]["models"].size() == 1);
    REQUIRE(body["ensembles"].size() == 3);  // means + two meta configurations
    REQUIRE(body["ensembles"][0]["name"] == "Means-model");
    REQUIRE(body["ensembles"][1]["name"] == "LogReg (C=0.2)");
    REQUIRE(body["ensembles"][2]["name"] == "LogReg (C=0.04)");
    REQUIRE(body["ensembles"][0]["cells"].size() == 1);

    // Train/test hygiene: each final model scored the test set exactly once.
    REQUIRE(body["audit"]["test_scoring_passes"] == body["audit"]["expected_passes"]);

    // One circuit execution per row per transform pass: the final quantum
    // model transforms train (fit) and test (predict); CV/OOF pipelines are
    // separate objects and counted separately.
    REQUIRE(body["quantum_invocations"] == 400);

    // Rendered tables carry the paper-style "mean ± std" formatting.
    REQUIRE(report.rendered_tables.find("±") != std::string::npos);
    REQUIRE(report.rendered_tables.find("Means-model") != std::string::npos);
}

TEST_CASE("rerunning an archived config yields a bit-identical report body") {
    const auto cfg = parse_config(tiny_config());
    const auto a = run_experiment(cfg);
    const auto b = run_experiment(cfg);
    REQUIRE(a.body.dump() == b.body.dump());
    REQUIRE(a.rendered_tables == b.rendered_tables);
}

TEST_CASE("config hash changes when any field changes") {
    auto j = tiny_config();
    const auto base = run_experiment(parse_config(j));
    j["cv_seed"] = 99;
    const auto changed = run_experiment(parse_config(j));
    REQUIRE(base.body["config_hash"] != changed.body["config_hash"]);
}

TEST_CASE("emit_report writes the report files and pqf export has the schema") {
    auto j = tiny_config();
    j["export_pqf_csv"] = true;
    const auto dir = j["output_dir"].get<std::string>();
    std::filesystem::remove_all(dir);

    const auto cfg = parse_config(j);
    const auto report = run_experiment(cfg);
    emit_report(report, cfg.output_dir);

    REQUIRE(std::filesystem::exists(dir + "/report.json"));
    REQUIRE(std::filesystem::exists(dir + "/report.txt"));
    REQUIRE(std::filesystem::exists(dir + "/pqf_train.csv"));
    REQUIRE(std::filesystem::exists(dir + "/pqf_test.csv"));

    std::ifstream pqf(dir + "/pqf_train.csv");
    std::string header;
    std::getline(pqf, header);
    REQUIRE(header == "X0,Y0,Z0,X1,Y1,Z1,X2,Y2,Z2,X3,Y3,Z3,target");

    std::ifstream json_in(dir + "/report.json");
    json file;
    json_in >> file;
    REQUIRE(file.contains("wall_time_seconds"));
    REQUIRE(file["body"].dump() == report.body.dump());

    std::filesystem::remove_all(dir);
}

TEST_CASE("config validation errors") {
    auto j = tiny_config();
    j["data"]["source"] = "mystery";
    REQUIRE_THROWS_AS(parse_config(j), validation_error);

    j = tiny_config();
    j["metric"] = "nope";
    REQUIRE_THROWS_AS(run_experiment(parse_config(j)), validation_error);

    j = tiny_config();
    j["quantum"]["backend"] = {{"kind", "hardware"}};
    REQUIRE_THROWS_AS(parse_config(j), validation_error);
}

TEST_CASE("zero-variance columns are dropped after subsampling") {
    dataset data = generate_synthetic({200, 3, 0.3, 0.0, 41});
    // Make column 1 constant.
    for (std::size_t r = 0; r < data.num_rows; ++r) data.at(r, 1) = 4.25;
    const auto dropped = drop_zero_variance(data);
    REQUIRE(dropped == std::vector<std::string>{"f1"});
    REQUIRE(data.num_features == 2);
    REQUIRE(data.feature_names == std::vector<std::string>{"f0", "f2"});
}
