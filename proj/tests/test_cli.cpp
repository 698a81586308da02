#include "cli/cli.hpp"

#include <nlohmann/json.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using ergobound::cli::run;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

nlohmann::json json_of(const Run& r) { return nlohmann::json::parse(r.out); }

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

// CSV without comment lines.
std::string body_of(const std::string& csv) {
    std::istringstream is(csv);
    std::string line, out;
    while (std::getline(is, line)) {
        if (line.rfind('#', 0) != 0) out += line + "\n";
    }
    return out;
}

class CliFiles : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("ergobound_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    fs::path dir_;
};

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

} // namespace

TEST(CliBound, ValidCell) {
    const auto r = call({"bound", "--t", "100", "--eps", "0.5", "--f-norm", "1", "--q-norm", "4"});
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(r.err.empty());
    const auto j = json_of(r);
    EXPECT_NEAR(j["bound"].get<double>(), 0.64970, 5e-6);
    EXPECT_EQ(j["valid"], true);
    EXPECT_EQ(j["schema_version"], 1);
}

TEST(CliBound, BelowThreshold) {
    const auto r = call({"bound", "--t", "10", "--eps", "0.5", "--f-norm", "1", "--q-norm", "4"});
    EXPECT_EQ(r.code, 3);
    const auto j = json_of(r);
    EXPECT_EQ(j["valid"], false);
    EXPECT_EQ(j["threshold"], 16.0);
}

TEST(CliBound, MalformedFlags) {
    EXPECT_EQ(call({"bound", "--t", "-1", "--eps", "0.5", "--f-norm", "1", "--q-norm", "4"}).code, 2);
    EXPECT_EQ(call({"bound", "--t", "abc", "--eps", "0.5", "--f-norm", "1", "--q-norm", "4"}).code, 2);
    EXPECT_EQ(call({"bound", "--t", "100"}).code, 2);
    EXPECT_EQ(call({"frobnicate"}).code, 2);
    EXPECT_EQ(call({}).code, 2);
}

TEST(CliBound, CsvRow) {
    const auto r = call({"bound", "--t", "100", "--eps", "0.5", "--f-norm", "1", "--q-norm", "4", "--format", "csv"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("# schema_version=1\n# seed=12345\n"), std::string::npos);
    EXPECT_NE(r.out.find("bound,bound_effective,exponent,theta_star,threshold,valid\n"), std::string::npos);
}

TEST(CliBound, JacobiAndTanOU) {
    const auto j = json_of(call({"jacobi-bound", "--t", "100", "--eps", "0.5", "--t-av", "1"}));
    EXPECT_NEAR(j["exponent"].get<double>(), -4232.0 / 2525.0, 1e-12);
    const auto from_spectrum = json_of(call({"jacobi-bound", "--t", "100", "--eps", "0.5", "--b", "2", "--sigma2", "2"}));
    EXPECT_NEAR(from_spectrum["t_av"].get<double>(), 1.0, 1e-9);
    EXPECT_EQ(call({"jacobi-bound", "--t", "100", "--eps", "0.5"}).code, 2);

    const auto c = json_of(call({"tanou-bound", "--t", "1000", "--eps", "1", "--u", "1"}));
    const auto p = json_of(call({"tanou-bound", "--t", "1000", "--eps", "1", "--u", "1", "--paper-constant"}));
    EXPECT_NEAR(c["centering_rate"].get<double>(), 1.2545892, 1e-7);
    EXPECT_NEAR(p["centering_rate"].get<double>(), 2.5091785, 1e-7);
    EXPECT_EQ(c["t_av"], 2.0);
}

TEST(CliModels, TavCheckPi) {
    const auto tav = call({"tav", "--model", "tanou", "--rho", "0.5"});
    EXPECT_EQ(tav.code, 0);
    EXPECT_NEAR(json_of(tav)["t_av"].get<double>(), 2.0, 1e-9);

    const auto check = json_of(call({"check", "--model", "maoclass", "--gamma", "3"}));
    EXPECT_EQ(check["verdict"], "uniformly_ergodic");
    EXPECT_NEAR(check["integral_value"].get<double>(), 0.5, 1e-6);

    const auto pi = json_of(call({"pi", "--model", "tanou", "--rho", "0.5", "--f", "exp", "--u", "0"}));
    EXPECT_NEAR(pi["pi_f"].get<double>(), 1.0, 1e-12);

    EXPECT_EQ(call({"tav", "--model", "maoclass"}).code, 2);
    EXPECT_EQ(call({"check", "--model", "maoclass", "--gamma", "2"}).code, 2);
}

TEST_F(CliFiles, CustomModelFile) {
    const fs::path model = dir_ / "mao2.json";
    write_file(model, R"({"model":"custom","params":{"lower":0,"upper":"inf","lower_boundary":"reflecting",
        "drift":0,"diffusion_sq":{"mul":[2,{"pow":[{"poly":[1,1]},2]}]}}})");
    const auto r = call({"check", "--model-file", model.string()});
    EXPECT_EQ(r.code, 0);
    const auto j = json_of(r);
    EXPECT_EQ(j["verdict"], "not_uniformly_ergodic");
    EXPECT_EQ(j["integral_value"]["divergent"], true);
    EXPECT_EQ(call({"check", "--model-file", (dir_ / "missing.json").string()}).code, 2);
}

TEST_F(CliFiles, SimulationFailureExitCode) {
    const fs::path model = dir_ / "bm.json";
    write_file(model, R"({"model":"custom","params":{"lower":0,"upper":1,"drift":0,"diffusion_sq":1}})");
    const auto r = call({"simulate", "--model-file", model.string(), "--f", "const", "--t", "10", "--paths", "3",
                         "--clamp", "0"});
    EXPECT_EQ(r.code, 5);
    EXPECT_FALSE(r.err.empty());
}

TEST(CliSimulate, Summary) {
    const auto r = call({"simulate", "--model", "jacobi", "--f", "const", "--c", "0.25", "--t", "1", "--paths", "10"});
    EXPECT_EQ(r.code, 0);
    const auto j = json_of(r);
    EXPECT_EQ(j["mean"], 0.25);
    EXPECT_EQ(j["std_error"], 0.0);
    EXPECT_EQ(j["n_paths"], 10);
}

TEST(CliVerify, AllCellsBelowThresholdAreVacuous) {
    const auto r = call({"verify", "--t-grid", "1,2", "--eps-grid", "0.1", "--paths", "20"});
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(r.err.empty());
    const auto body = body_of(r.out);
    EXPECT_EQ(body.rfind("t,eps,threshold,bound,k,n,p_hat,ci_upper,dominated\n", 0), 0u);
    EXPECT_NE(body.find("1,0.1,39.9999999800007,vacuous,"), std::string::npos);
    EXPECT_NE(body.find("2,0.1,39.9999999800007,vacuous,"), std::string::npos);
    EXPECT_NE(r.out.find("# seed=12345"), std::string::npos);
}

TEST(CliVerify, CorruptedBoundIsCaught) {
    const auto r = call({"verify", "--t-grid", "100", "--eps-grid", "0.2", "--paths", "50", "--bound-scale", "0.001"});
    EXPECT_EQ(r.code, 4);
    EXPECT_NE(r.out.find(",false\n"), std::string::npos);
    EXPECT_FALSE(r.err.empty());
}

TEST(CliVerify, ThreadCountDoesNotChangeOutput) {
    const std::vector<std::string> base = {"verify", "--t-grid", "5,10", "--eps-grid", "0.05,0.1", "--paths", "64",
                                           "--seed", "9"};
    auto one = base, three = base;
    one.insert(one.end(), {"--threads", "1"});
    three.insert(three.end(), {"--threads", "3"});
    const auto a = call(one);
    const auto b = call(three);
    EXPECT_EQ(a.code, b.code);
    EXPECT_EQ(body_of(a.out), body_of(b.out));
    EXPECT_EQ(a.out, b.out);
}

TEST(CliVerify, ConfigErrors) {
    EXPECT_EQ(call({"verify", "--t-grid", "1,x", "--paths", "2"}).code, 2);
    EXPECT_EQ(call({"verify", "--model", "maoclass", "--f", "const", "--paths", "2"}).code, 2);
    EXPECT_EQ(call({"verify", "--paper-constant", "--paths", "2"}).code, 2);
}

TEST_F(CliFiles, ManifestReplayIsByteIdentical) {
    const fs::path out = dir_ / "run.csv";
    const auto r = call({"verify", "--t-grid", "3", "--eps-grid", "0.1", "--paths", "16", "--seed", "77", "--out",
                         out.string()});
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    ASSERT_TRUE(fs::exists(out));
    const fs::path manifest = dir_ / "run.csv.manifest.json";
    ASSERT_TRUE(fs::exists(manifest));
    const auto m = nlohmann::json::parse(slurp(manifest));
    EXPECT_EQ(m["command"], "verify");
    EXPECT_EQ(m["seed"], 77);
    EXPECT_EQ(m["artifact_version"], "1.0.0");
    EXPECT_EQ(m["outputs"][0], out.string());
    EXPECT_EQ(m["flags"]["--paths"], "16");
    EXPECT_TRUE(m.contains("timestamp"));

    const fs::path again = dir_ / "again.csv";
    const auto rr = call({"replay", manifest.string(), "--out", again.string()});
    EXPECT_EQ(rr.code, 0);
    EXPECT_EQ(slurp(out), slurp(again));
    EXPECT_TRUE(fs::exists(dir_ / "again.csv.manifest.json"));
}

TEST_F(CliFiles, ReplayOfJsonCommand) {
    const fs::path out = dir_ / "tav.json";
    EXPECT_EQ(call({"tav", "--model", "jacobi", "--b", "3", "--out", out.string()}).code, 0);
    const fs::path again = dir_ / "tav2.json";
    EXPECT_EQ(call({"replay", (dir_ / "tav.json.manifest.json").string(), "--out", again.string()}).code, 0);
    EXPECT_EQ(slurp(out), slurp(again));
    EXPECT_EQ(call({"replay", (dir_ / "nope.json").string()}).code, 2);
}
