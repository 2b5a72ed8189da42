#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "sslot/core.hpp"

using namespace sslot;

namespace {

std::filesystem::path tmp(const std::string &name) {
    std::filesystem::create_directories(SSLOT_TMP_DIR);
    return std::filesystem::path(SSLOT_TMP_DIR) / name;
}

void write(const std::filesystem::path &p, const std::string &text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("worked example instance") {
    const auto inst = worked_example();
    CHECK(inst.horizon() == 4);
    CHECK(inst.costs.fixed_ordering == 100.0);
    CHECK(inst.costs.penalty == 10.0);
    CHECK(inst.demands[2].mean == 60.0);
    CHECK(inst.demands[2].std_dev == doctest::Approx(15.0));
    CHECK(inst.total_mean() == 160.0);
    CHECK(inst.summed_std_dev() == doctest::Approx(40.0));
    CHECK(inst.pooled_std_dev() == doctest::Approx(std::sqrt(25.0 + 100.0 + 225.0 + 100.0)));
    CHECK_NOTHROW(validate(inst));
}

TEST_CASE("suffix keeps costs and drops leading periods") {
    const auto inst = worked_example();
    const auto s = inst.suffix(2, 7.0);
    CHECK(s.horizon() == 2);
    CHECK(s.demands[0].mean == 60.0);
    CHECK(s.initial_inventory == 7.0);
    CHECK(s.costs == inst.costs);
    CHECK_THROWS_AS(inst.suffix(4, 0.0), ValidationError);
    CHECK_THROWS_AS(inst.suffix(-1, 0.0), ValidationError);
}

TEST_CASE("validation rejects broken instances") {
    auto inst = worked_example();
    inst.costs.penalty = 0.0;
    CHECK_THROWS_AS(validate(inst), ValidationError);
    inst = worked_example();
    inst.costs.fixed_ordering = -1.0;
    CHECK_THROWS_AS(validate(inst), ValidationError);
    inst = worked_example();
    inst.demands[1].std_dev = -1.0;
    CHECK_THROWS_AS(validate(inst), ValidationError);
    inst = worked_example();
    inst.demands.clear();
    CHECK_THROWS_AS(validate(inst), ValidationError);
    inst = worked_example();
    inst.demands[0].mean = std::nan("");
    CHECK_THROWS_AS(validate(inst), ValidationError);
}

TEST_CASE("zero std dev is a valid deterministic period") {
    auto inst = worked_example();
    inst.demands[3] = {0.0, 0.0};
    CHECK_NOTHROW(validate(inst));
}

TEST_CASE("instance JSON round trip") {
    const auto inst = worked_example();
    const auto back = parse_instance(format_instance(inst));
    CHECK(back == inst);
    const auto p = tmp("inst.json");
    write_instance(inst, p);
    CHECK(read_instance(p) == inst);
}

TEST_CASE("bundled example file is the worked example") {
    CHECK(read_instance(std::string(SSLOT_DATA_DIR) + "/example4.json") == worked_example());
}

TEST_CASE("instance parse errors") {
    CHECK_THROWS_AS(parse_instance("{"), ParseError);
    CHECK_THROWS_AS(parse_instance("[]"), ParseError);
    const std::string ok = format_instance(worked_example());
    auto bad_version = ok;
    bad_version.replace(bad_version.find("\"version\": 1"), 12, "\"version\": 2");
    CHECK_THROWS_AS(parse_instance(bad_version), ParseError);
    auto short_means = ok;
    short_means.replace(short_means.find("\"horizon\": 4"), 12, "\"horizon\": 5");
    CHECK_THROWS_AS(parse_instance(short_means), ParseError);
    try {
        read_instance(tmp("does_not_exist.json"));
        FAIL("expected ParseError");
    } catch (const ParseError &e) {
        CHECK(std::string(e.what()).find("does_not_exist.json") != std::string::npos);
    }
}

TEST_CASE("policy CSV round trip") {
    PolicyParameters policy{{15.0008, 29.0161, 58.1089, 29.0161}, {70.2658, 53.9768, 116.5531, 53.9768}};
    const auto p = tmp("policy.csv");
    write_policy_csv(policy, {366.1, 311.4, 193.3, 118.0}, p);
    CHECK(read_policy_csv(p) == policy);
}

TEST_CASE("policy CSV errors") {
    const auto p = tmp("bad_policy.csv");
    write(p, "a,b\n1,2,3\n");
    CHECK_THROWS_AS(read_policy_csv(p), ParseError);
    write(p, "t,s_t,S_t,linked_cost\n2,1,5,\n");
    CHECK_THROWS_AS(read_policy_csv(p), ParseError);
    write(p, "t,s_t,S_t,linked_cost\n1,x,5,\n");
    CHECK_THROWS_AS(read_policy_csv(p), ParseError);
    write(p, "t,s_t,S_t,linked_cost\n1,9,5,\n");
    CHECK_THROWS_AS(read_policy_csv(p), ValidationError);
}

TEST_CASE("policy validation") {
    CHECK_THROWS_AS(validate(PolicyParameters{{1.0}, {2.0, 3.0}}), ValidationError);
    CHECK_THROWS_AS(validate(PolicyParameters{{4.0}, {3.0}}), ValidationError);
    CHECK_NOTHROW(validate(PolicyParameters{{3.0}, {3.0}}));
}
