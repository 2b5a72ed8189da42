#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <sys/wait.h>

#include "sslot/core.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

// Runs the CLI with stderr folded into stdout.
Run run(const std::string &args) {
    const std::string cmd = std::string("'") + SSLOT_CLI + "' " + args + " 2>&1";
    Run r;
    FILE *p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    while (std::fgets(buf, sizeof buf, p)) r.out += buf;
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string tmp(const std::string &name) {
    fs::create_directories(SSLOT_TMP_DIR);
    return (fs::path(SSLOT_TMP_DIR) / name).string();
}

const std::string kExample = std::string(SSLOT_DATA_DIR) + "/example4.json";

}  // namespace

TEST_CASE("missing instance file") {
    const auto r = run("sdp " + tmp("absent.json"));
    CHECK(r.code == 3);
    CHECK(r.out.find("absent.json") != std::string::npos);
}

TEST_CASE("usage errors") {
    CHECK(run("solve " + kExample + " --method sdp").code == 2);
    CHECK(run("simulate " + kExample + " policy.csv").code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("--help").code == 0);
}

TEST_CASE("sdp prints the optimal first-period parameters") {
    const auto policy = tmp("sdp_policy.csv");
    const auto r = run("sdp " + kExample + " --policy-out " + policy);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("\n1,14,70,") != std::string::npos);
    CHECK(r.out.find("expected cost C_1(0) = 362.5") != std::string::npos);
    const auto p = sslot::read_policy_csv(policy);
    CHECK(p.reorder_points[0] == 14.0);
    CHECK(p.order_up_to[0] == 70.0);
}

TEST_CASE("solve writes a policy and lp-export writes models") {
    const auto policy = tmp("bs_policy.csv");
    auto r = run("solve " + kExample + " --method bs --step 0.01 --out " + policy);
    REQUIRE(r.code == 0);
    const auto p = sslot::read_policy_csv(policy);
    CHECK(p.order_up_to[0] == doctest::Approx(70.2658).epsilon(1e-4));
    CHECK(std::abs(p.reorder_points[0] - 15.0) < 0.05);

    r = run("solve " + kExample + " --method mp");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("t,s_t,S_t,linked_cost") != std::string::npos);

    const auto dir = tmp("lp");
    fs::remove_all(dir);
    r = run("solve " + kExample + " --method mp --backend lp-export --out-dir " + dir);
    CHECK(r.code == 0);
    for (int k = 1; k <= 4; ++k) CHECK(fs::exists(fs::path(dir) / ("joint_" + std::to_string(k) + ".lp")));
}

TEST_CASE("simulate is deterministic for a seed") {
    const auto policy = tmp("sim_policy.csv");
    REQUIRE(run("sdp " + kExample + " --policy-out " + policy).code == 0);
    const std::string args = "simulate " + kExample + " " + policy + " --reps 5000 --seed 3 --oracle 362.58";
    const auto a = run(args);
    const auto b = run(args + " --threads 2");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("instance_id,method,mean,stderr,replications,seed,gap_pct\nexample4,", 0) == 0);
    const auto one = run("simulate " + kExample + " " + policy + " --reps 1 --seed 3");
    CHECK(one.code == 0);
    CHECK(one.out.find("standard error") != std::string::npos);
}

TEST_CASE("benchmark subset from the command line") {
    const auto detail = tmp("detail.csv");
    const auto summary = tmp("summary.csv");
    fs::remove(detail);
    const auto r = run("benchmark " + std::string(SSLOT_DATA_DIR) +
                       "/benchmark_8.json --seed 1 --patterns STA --K 200 --reps 500 --quiet"
                       " --detail " + detail + " --summary " + summary);
    REQUIRE(r.code == 0);
    const auto text = sslot::read_text_file(detail);
    int lines = 0;
    for (char ch : text) lines += ch == '\n';
    CHECK(lines == 1 + 9);
    CHECK(r.out.find("overall") != std::string::npos);
    const auto longrun = run("benchmark " + std::string(SSLOT_DATA_DIR) +
                             "/benchmark_25.json --seed 1 --detail " + detail);
    CHECK(longrun.code == 3);
}
