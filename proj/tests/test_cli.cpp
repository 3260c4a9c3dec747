#include <doctest.h>

#include "whitwave/io.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;
using whitwave::io::read_file;

namespace {

const fs::path kCli = WHITWAVE_CLI;
const fs::path kModels = WHITWAVE_MODELS_DIR;

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("whitwave_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args, const fs::path& dir) {
    const fs::path log = dir / "log.txt";
    const std::string cmd = "cd '" + dir.string() + "' && '" + kCli.string() + "' " + args + " > '" + log.string() + "' 2>&1";
    const int status = std::system(cmd.c_str());
    Run r{WIFEXITED(status) ? WEXITSTATUS(status) : -1, fs::exists(log) ? read_file(log) : ""};
    return r;
}

} // namespace

TEST_CASE("cli verify") {
    const fs::path d = scratch_dir("verify");
    Run r = run("verify --model '" + (kModels / "whitham.json").string() + "' --out w", d);
    CHECK(r.code == 0);
    const json rep = json::parse(read_file(d / "w_verify.json"));
    CHECK(rep["passed"] == true);
    CHECK(std::fabs(rep["gamma"].get<double>() - 6.0) <= 1e-6);
    CHECK(fs::exists(d / "w_manifest.json"));

    r = run("verify --model '" + (kModels / "convex.json").string() + "' --out c", d);
    CHECK(r.code == 1);
    r = run("verify --model '" + (kModels / "whitham_table.json").string() + "' --out t", d);
    CHECK(r.code == 0);
    CHECK(r.out.find("assumed (tabulated)") != std::string::npos);
    r = run("verify --preset kdv --out k", d);
    CHECK(r.code == 0);

    r = run("verify --model /no/such/model.json", d);
    CHECK(r.code == 2);
    CHECK(r.out.find("/no/such/model.json") != std::string::npos);
}

TEST_CASE("cli usage errors") {
    const fs::path d = scratch_dir("usage");
    CHECK(run("", d).code == 2);
    CHECK(run("frobnicate", d).code == 2);
    CHECK(run("solve --eps abc", d).code == 2);
    CHECK(run("solve --eps 2.0 --modes 64", d).code == 2);
    CHECK(run("solve --modes 1023", d).code == 2);
    CHECK(run("continue --eps-ladder 0.1,0.05 --modes 64", d).code == 2);
    CHECK(run("continue --eps-ladder 0.1,x --modes 64", d).code == 2);
    CHECK(run("stability --solution nothing.json", d).code == 2);
    CHECK(run("verify --samples 10", d).code == 2);
    CHECK(run("verify --preset kdv --model x.json", d).code == 2);
    whitwave::io::write_atomic(d / "garbage.json", "{ nope");
    CHECK(run("verify --model garbage.json", d).code == 2);
    whitwave::io::write_atomic(d / "bad_kind.json", R"({"symbol":{"kind":"zzz"},"nonlinearity":{"kind":"quadratic"}})");
    CHECK(run("verify --model bad_kind.json", d).code == 2);
    const Run help = run("solve --help", d);
    CHECK(help.code == 0);
    CHECK(help.out.find("--half-period") != std::string::npos);
    CHECK(help.out.find("1024") != std::string::npos);
}

TEST_CASE("cli solve, stability and determinism") {
    const fs::path d = scratch_dir("solve");
    Run r = run("solve --eps 0.1 --mode solitary --half-period 40 --modes 512 --out a", d);
    REQUIRE(r.code == 0);
    for (const char* f : {"a_profile.csv", "a_meta.json", "a_manifest.json"}) CHECK(fs::exists(d / f));
    const json meta = json::parse(read_file(d / "a_meta.json"));
    CHECK(meta["residual"].get<double>() <= 1e-11);
    CHECK(meta["decay_check"].get<double>() <= 1e-9);
    CHECK(meta["profile"] == "a_profile.csv");

    r = run("solve --eps 0.1 --mode solitary --half-period 40 --modes 512 --out b", d);
    REQUIRE(r.code == 0);
    CHECK(read_file(d / "a_profile.csv") == read_file(d / "b_profile.csv"));
    json mb = json::parse(read_file(d / "b_meta.json"));
    mb["profile"] = "a_profile.csv";
    CHECK(mb.dump() == meta.dump());

    // manifest checksums match the files
    const json man = json::parse(read_file(d / "a_manifest.json"));
    for (const auto& o : man["outputs"])
        CHECK(o["sha256"] == whitwave::io::sha256_file(d / o["path"].get<std::string>()));

    r = run("stability --solution a_meta.json --full-spectrum", d);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("spectrally_stable") != std::string::npos);
    const json st = json::parse(read_file(d / "a_stability.json"));
    CHECK(st["morse_index"] == 1);
    CHECK(st["kernel_dim"] == 1);
    CHECK(st["verdict"] == "spectrally_stable");
    CHECK(st["k_unstable_bound"] == 0);
    CHECK(st["full_spectrum"]["max_real"].get<double>() <= 1e-7);
    CHECK(fs::exists(d / "a_spectrum.csv"));
    CHECK(fs::exists(d / "a_full_spectrum.csv"));
    const std::string first = read_file(d / "a_stability.json");
    REQUIRE(run("stability --solution a_meta.json --full-spectrum", d).code == 0);
    CHECK(read_file(d / "a_stability.json") == first);

    // a short cell still solves but the decay diagnostic flags the truncation
    r = run("solve --eps 0.1 --half-period 5 --modes 128 --out short", d);
    CHECK(r.code == 0);
    CHECK(json::parse(read_file(d / "short_meta.json"))["decay_check"].get<double>() > 1e-9);
}

TEST_CASE("cli continue") {
    const fs::path d = scratch_dir("continue");
    Run r = run("continue --eps-ladder 0.05,0.1 --modes 512 --mode periodic --out p", d);
    REQUIRE(r.code == 0);
    const json meta = json::parse(read_file(d / "p_meta.json"));
    CHECK(meta["complete"] == true);
    CHECK(std::fabs(meta["slope"].get<double>() - 2.0) <= 0.2);
    CHECK(fs::exists(d / "p_eps0.05_profile.csv"));
    CHECK(fs::exists(d / "p_eps0.1_meta.json"));

    r = run("continue --eps-ladder 0.05 --modes 256 --out one", d);
    CHECK(r.code == 0);
    CHECK_FALSE(json::parse(read_file(d / "one_meta.json")).contains("slope"));
}

TEST_CASE("cli limit") {
    const fs::path d = scratch_dir("limit");
    Run r = run("limit --gamma 6 --modes 1024 --out s", d);
    REQUIRE(r.code == 0);
    const json j = json::parse(read_file(d / "s_limit.json"));
    CHECK(std::fabs(j["vk_closed_form"].get<double>() + 0.125) <= 1e-8);
    CHECK(std::fabs(j["eigenvalues"][0].get<double>() + 1.25) <= 1e-3);
    CHECK(std::fabs(j["eigenvalues"][1].get<double>()) <= 1e-3);
    CHECK(std::fabs(j["eigenvalues"][2].get<double>() - 0.75) <= 1e-3);
    CHECK(r.out.find("-0.125") != std::string::npos);

    r = run("limit --mode periodic --half-period 10 --modes 256 --out c", d);
    CHECK(r.code == 0);
    r = run("limit --mode periodic --half-period 3 --modes 128 --out bad", d);
    CHECK(r.code == 1);
    CHECK(r.out.find("constant") != std::string::npos);
    r = run("limit --preset convex", d);
    CHECK(r.code == 1);
}

TEST_CASE("cli reproduce, short ladder") {
    const fs::path d = scratch_dir("reproduce");
    Run r = run("reproduce --mode solitary --modes 512 --eps-ladder 0.05 --out r", d);
    CHECK(r.code == 0);
    const std::string table = read_file(d / "r_summary.csv");
    CHECK(table.rfind("mode,eps,nu,h1_deviation,lambda0,lambda1,lambda2,eps2_vk,verdict\n", 0) == 0);
    CHECK(table.find("spectrally_stable") != std::string::npos);
    CHECK(r.out.find("slope") == std::string::npos);
}

TEST_CASE("cli reproduce output does not depend on the thread count") {
    const fs::path d = scratch_dir("threads");
    REQUIRE(run("reproduce --mode periodic --modes 256 --eps-ladder 0.05,0.1 --out one", d).code == 0);
    REQUIRE(run("reproduce --mode periodic --modes 256 --eps-ladder 0.05,0.1 --out two", d).code == 0);
    CHECK(read_file(d / "one_summary.csv") == read_file(d / "two_summary.csv"));
    const std::string env = "WHITWAVE_THREADS=2 ";
    const std::string cmd = "cd '" + d.string() + "' && " + env + "'" + kCli.string() +
                            "' reproduce --mode periodic --modes 256 --eps-ladder 0.05,0.1 --out four > /dev/null 2>&1";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(read_file(d / "one_summary.csv") == read_file(d / "four_summary.csv"));
    CHECK(read_file(d / "one_periodic_eps0.1_stability.json") == read_file(d / "four_periodic_eps0.1_stability.json"));
    const std::string bad = "cd '" + d.string() + "' && WHITWAVE_THREADS=zero '" + kCli.string() +
                            "' reproduce --eps-ladder 0.05 --modes 64 > /dev/null 2>&1";
    const int status = std::system(bad.c_str());
    CHECK(WEXITSTATUS(status) == 2);
}
