#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "qdr/dataset.hpp"

using namespace qdr;

namespace {

struct temp_file {
    std::string path;
    explicit temp_file(const std::string& name) {
        path = (std::filesystem::temp_directory_path() / name).string();
    }
    ~temp_file() { std::remove(path.c_str()); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

}  // namespace

TEST_CASE("csv loading drops configured and zero-variance columns") {
    temp_file f("qdr_test_basic.csv");
    write_file(f.path,
               "customer_ID,S_2,D_1,R_2,const_col,target\n"
               "a,2017-03-01,0.5,1.5,7,0\n"
               "b,2017-03-02,0.25,,7,1\n"
               "c,2017-03-03,0.125,2.5,7,0\n");
    csv_load_options options;
    options.id_column = "customer_ID";
    options.date_column = "S_2";
    csv_load_info info;
    const auto data = load_csv(f.path, options, &info);

    REQUIRE(data.num_rows == 3);
    REQUIRE(data.feature_names == std::vector<std::string>{"D_1", "R_2"});
    REQUIRE(info.dropped_zero_variance == std::vector<std::string>{"const_col"});
    REQUIRE(data.at(0, 0) == 0.5);
    REQUIRE(is_missing(data.at(1, 1)));
    REQUIRE(data.labels == std::vector<int>{0, 1, 0});
    REQUIRE(data.weights == std::vector<double>{20.0, 1.0, 20.0});
}

TEST_CASE("csv loading keeps the latest record per customer") {
    temp_file f("qdr_test_latest.csv");
    write_file(f.path,
               "customer_ID,S_2,D_1,target\n"
               "a,2017-01-01,1,0\n"
               "a,2017-03-01,2,0\n"
               "b,2017-02-01,3,1\n"
               "a,2017-02-01,4,0\n");
    csv_load_options options;
    options.id_column = "customer_ID";
    options.date_column = "S_2";
    const auto data = load_csv(f.path, options);
    REQUIRE(data.num_rows == 2);
    // Row order preserved by original position of the kept record.
    REQUIRE(data.at(0, 0) == 2.0);
    REQUIRE(data.at(1, 0) == 3.0);
}

TEST_CASE("csv loading error paths") {
    temp_file header_only("qdr_test_header.csv");
    write_file(header_only.path, "a,b,target\n");
    REQUIRE_THROWS_AS(load_csv(header_only.path), validation_error);

    temp_file bad_label("qdr_test_label.csv");
    write_file(bad_label.path, "a,target\n1.0,2\n");
    REQUIRE_THROWS_AS(load_csv(bad_label.path), validation_error);

    temp_file bad_cell("qdr_test_cell.csv");
    write_file(bad_cell.path, "a,target\nnot_a_number,1\n");
    REQUIRE_THROWS_AS(load_csv(bad_cell.path), validation_error);

    temp_file ragged("qdr_test_ragged.csv");
    write_file(ragged.path, "a,b,target\n1,0\n");
    REQUIRE_THROWS_AS(load_csv(ragged.path), validation_error);

    REQUIRE_THROWS_AS(load_csv("/nonexistent/path.csv"), validation_error);
}

TEST_CASE("csv round-trip preserves features bit-exactly") {
    auto data = generate_synthetic({50, 5, 0.3, 0.1, 77});
    temp_file f("qdr_test_roundtrip.csv");
    save_csv(data, f.path);
    const auto loaded = load_csv(f.path);
    REQUIRE(loaded.num_rows == data.num_rows);
    REQUIRE(loaded.num_features == data.num_features);
    for (std::size_t i = 0; i < data.features.size(); ++i) {
        if (is_missing(data.features[i])) {
            REQUIRE(is_missing(loaded.features[i]));
        } else {
            REQUIRE(loaded.features[i] == data.features[i]);
        }
    }
    REQUIRE(loaded.labels == data.labels);
}

TEST_CASE("synthetic generator plants exact class counts") {
    const auto data = generate_synthetic({10000, 8, 0.2, 0.0, 3});
    REQUIRE(data.num_rows == 10000);
    REQUIRE(data.positives() == 2000);
    for (double v : data.features) REQUIRE_FALSE(is_missing(v));  // dense when fraction 0

    const auto sparse = generate_synthetic({2000, 8, 0.2, 0.15, 3});
    std::size_t missing = 0;
    for (double v : sparse.features) missing += is_missing(v);
    const double frac = static_cast<double>(missing) / sparse.features.size();
    REQUIRE(frac > 0.12);
    REQUIRE(frac < 0.18);
}

TEST_CASE("synthetic generator is deterministic and shuffles labels") {
    const auto a = generate_synthetic({500, 4, 0.2, 0.05, 9});
    const auto b = generate_synthetic({500, 4, 0.2, 0.05, 9});
    REQUIRE(a.labels == b.labels);
    for (std::size_t i = 0; i < a.features.size(); ++i) {
        if (!is_missing(a.features[i])) REQUIRE(a.features[i] == b.features[i]);
    }
    // Labels are not front-loaded: first 100 rows should mix classes.
    int first_block = 0;
    for (int i = 0; i < 100; ++i) first_block += a.labels[i];
    REQUIRE(first_block > 0);
    REQUIRE(first_block < 100);
}

TEST_CASE("balanced subsample takes equal class counts") {
    const auto data = generate_synthetic({5000, 4, 0.3, 0.0, 21});
    const auto sub = subsample(data, subsample_policy::balanced, 1000, 5);
    REQUIRE(sub.num_rows == 1000);
    REQUIRE(sub.positives() == 500);
}

TEST_CASE("stratified subsample preserves the class ratio") {
    const auto data = generate_synthetic({50000, 4, 0.2, 0.0, 22});
    const auto sub = subsample(data, subsample_policy::stratified, 10000, 5);
    REQUIRE(sub.num_rows == 10000);
    REQUIRE(sub.positives() == 2000);
}

TEST_CASE("subsample determinism and capacity errors") {
    const auto data = generate_synthetic({1000, 4, 0.2, 0.0, 23});
    const auto a = subsample(data, subsample_policy::balanced, 300, 9);
    const auto b = subsample(data, subsample_policy::balanced, 300, 9);
    REQUIRE(a.features == b.features);
    REQUIRE(a.labels == b.labels);
    REQUIRE_THROWS_AS(subsample(data, subsample_policy::balanced, 600, 9), validation_error);
}

TEST_CASE("train/test split partitions the rows") {
    const auto data = generate_synthetic({1000, 4, 0.2, 0.0, 31});
    const auto split = split_dataset(data, 0.5, 11);
    REQUIRE(split.train.num_rows == 500);
    REQUIRE(split.test.num_rows == 500);
    REQUIRE(split.train.positives() + split.test.positives() == data.positives());
    REQUIRE_THROWS_AS(split_dataset(data, 0.0, 1), validation_error);
}
