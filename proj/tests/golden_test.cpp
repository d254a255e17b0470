#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

// Set MAGNET_UPDATE_GOLDEN=1 to rewrite tests/golden/hashes.json from the current build.
const fs::path kGoldenFile = fs::path(MAGNET_SOURCE_DIR) / "tests" / "golden" / "hashes.json";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string command_for(const std::string& name) {
    if (name.rfind("fig", 0) == 0 || name.rfind("scenario1", 0) == 0) return "crlb-map";
    if (name.rfind("table2", 0) == 0) return "resilience";
    return "montecarlo";
}

std::vector<std::string> config_names() {
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(fs::path(MAGNET_SOURCE_DIR) / "configs")) {
        if (e.path().extension() == ".json") out.push_back(e.path().stem().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

json run_and_hash(const std::string& command, const std::string& name, const fs::path& out,
                  const std::string& threads) {
    std::vector<std::string> args = {
        command, "--config", (fs::path(MAGNET_SOURCE_DIR) / "configs" / (name + ".json")).string(),
        "--out", out.string(), "--threads", threads};
    if (command == "montecarlo" || command == "resilience") {
        args.insert(args.end(), {"--runs", "2"});
    }
    std::ostringstream so;
    std::ostringstream se;
    const int code = magnet::cli::run(args, so, se);
    EXPECT_EQ(code, 0) << name << ": " << se.str();
    const json manifest = json::parse(slurp(out / "manifest.json"));
    json hashes = json::object();
    for (const auto& entry : manifest["outputs"]) {
        const std::string file = entry["file"];
        EXPECT_EQ(entry["sha256"], magnet::cli::sha256_hex(slurp(out / file))) << file;
        hashes[file] = entry["sha256"];
    }
    return hashes;
}

class GoldenOutputs : public ::testing::Test {
protected:
    void SetUp() override {
        root_ = fs::temp_directory_path() / "magnet_golden";
        fs::remove_all(root_);
    }
    void TearDown() override { fs::remove_all(root_); }
    fs::path root_;
};

TEST_F(GoldenOutputs, CannedConfigsReproduceCommittedHashes) {
    json actual = json::object();
    for (const std::string& name : config_names()) {
        const std::string command = command_for(name);
        actual[name] = {{"command", command},
                        {"outputs", run_and_hash(command, name, root_ / name, "1")}};
    }
    actual["track:scenario2_200m_32pT_vector"] = {
        {"command", "track"},
        {"outputs", run_and_hash("track", "scenario2_200m_32pT_vector", root_ / "track", "1")}};

    const char* update = std::getenv("MAGNET_UPDATE_GOLDEN");
    if (update != nullptr && std::string(update) == "1") {
        fs::create_directories(kGoldenFile.parent_path());
        std::ofstream(kGoldenFile) << actual.dump(2) << "\n";
        GTEST_SKIP() << "golden hashes rewritten";
    }
    ASSERT_TRUE(fs::exists(kGoldenFile)) << "run with MAGNET_UPDATE_GOLDEN=1 to create it";
    const json expected = json::parse(slurp(kGoldenFile));
    ASSERT_EQ(expected.size(), actual.size());
    for (const auto& [key, value] : expected.items()) {
        ASSERT_TRUE(actual.contains(key)) << key;
        EXPECT_EQ(actual[key], value) << key;
    }
}

TEST_F(GoldenOutputs, ThreadCountDoesNotChangeBytes) {
    for (const char* name : {"scenario2_300m_160pT_scalar", "table2_caseII", "fig4b_demo"}) {
        const std::string command = command_for(name);
        const json one = run_and_hash(command, name, root_ / (std::string(name) + "_1"), "1");
        const json four = run_and_hash(command, name, root_ / (std::string(name) + "_4"), "4");
        EXPECT_EQ(one, four) << name;
    }
}

}  // namespace
