#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "sslot/testbed.hpp"

using namespace sslot;

namespace {

std::filesystem::path tmp(const std::string &name) {
    std::filesystem::create_directories(SSLOT_TMP_DIR);
    return std::filesystem::path(SSLOT_TMP_DIR) / name;
}

BenchmarkConfig tiny() {
    BenchmarkConfig c;
    c.patterns = {Pattern::STA, Pattern::EMP2};
    c.fixed_costs = {200.0};
    c.penalties = {10.0};
    c.cvs = {0.1, 0.3};
    c.methods = {Method::bs};
    c.replications = 2000;
    c.seed = 42;
    c.heuristic.step = 0.5;
    c.grid_step = 0.5;
    return c;
}

void strip_seconds(std::vector<DetailRow> &rows) {
    for (auto &r : rows) r.seconds = 0.0;
}

}  // namespace

TEST_CASE("tabulated demand means") {
    CHECK(demand_means(Pattern::STA, 8) == std::vector<double>(8, 10.0));
    CHECK(demand_means(Pattern::EMP4, 8) == std::vector<double>{18, 6, 22, 22, 51, 54, 22, 21});
    CHECK(demand_means(Pattern::LCY1, 8) == std::vector<double>{15, 16, 15, 14, 11, 7, 6, 3});
    CHECK(demand_means(Pattern::STA, 25) == std::vector<double>(25, 100.0));
    CHECK(demand_means(Pattern::LCY1, 25).front() == 11.0);
    CHECK_THROWS_AS(demand_means(Pattern::STA, 12), ValidationError);
}

TEST_CASE("pattern file agrees with the built-in tables") {
    const auto table = read_pattern_table(std::string(SSLOT_DATA_DIR) + "/demand_patterns_v1.csv");
    for (int horizon : {8, 25}) {
        for (Pattern p : all_patterns()) {
            CAPTURE(to_string(p));
            CHECK(table.at(horizon).at(p) == demand_means(p, horizon));
        }
    }
    const auto bad = tmp("patterns.csv");
    std::ofstream(bad) << "horizon,t,A\n";
    CHECK_THROWS_AS(read_pattern_table(bad), ParseError);
}

TEST_CASE("pattern names") {
    CHECK(all_patterns().size() == 10);
    CHECK(parse_pattern("rand") == Pattern::RAND);
    CHECK(std::string(to_string(Pattern::EMP3)) == "EMP3");
    CHECK_THROWS_AS(parse_pattern("EMP5"), ValidationError);
}

TEST_CASE("the standard grid has 270 instances") {
    const auto cfg = default_benchmark_config(8);
    const auto all = build_instances(cfg);
    CHECK(all.size() == 270);
    std::set<std::string> ids;
    std::map<Pattern, int> per;
    for (const auto &bi : all) {
        ids.insert(bi.id);
        ++per[bi.pattern];
        CHECK(bi.instance.horizon() == 8);
    }
    CHECK(ids.size() == 270);
    for (const auto &[p, n] : per) CHECK(n == 27);
    CHECK(all.front().id == "T8-LCY1-K200-b5-cv0.1");
    CHECK(all[1].id == "T8-LCY1-K200-b5-cv0.2");
    CHECK(all[1].instance.demands[0].std_dev == doctest::Approx(3.0));
    CHECK(instance_id(Pattern::RAND, 1500, 20, 0.3, 25) == "T25-RAND-K1500-b20-cv0.3");
}

TEST_CASE("long horizon must be asked for") {
    auto cfg = default_benchmark_config(25);
    CHECK(cfg.replications == 1000000);
    CHECK(cfg.fixed_costs == std::vector<double>{500, 1000, 1500});
    CHECK_THROWS_AS(validate(cfg), ValidationError);
    cfg.allow_long = true;
    CHECK_NOTHROW(validate(cfg));
    CHECK(build_instances(cfg).size() == 270);
}

TEST_CASE("config parsing") {
    const auto cfg = read_benchmark_config(std::string(SSLOT_DATA_DIR) + "/benchmark_8.json");
    CHECK(cfg.horizon == 8);
    CHECK(cfg.patterns == std::vector<Pattern>{Pattern::STA, Pattern::RAND});
    CHECK(cfg.heuristic.segments == 11);
    CHECK(cfg.heuristic.step == 0.1);
    CHECK(cfg.grid_step == 0.1);
    CHECK(build_instances(cfg).size() == 54);
    CHECK_THROWS_AS(parse_benchmark_config("{\"Kay\": [1]}"), ParseError);
    CHECK_THROWS_AS(parse_benchmark_config("{\"K\": 5}"), ParseError);
    CHECK_THROWS_AS(parse_benchmark_config("[1,2"), ParseError);
    CHECK_THROWS_AS(validate(parse_benchmark_config("{\"horizon\": 12}")), ValidationError);
    const auto long_cfg = parse_benchmark_config("{\"horizon\": 25, \"allow_long\": true}");
    CHECK(long_cfg.heuristic.long_suffixes == 15);
}

TEST_CASE("detail rows survive a round trip") {
    DetailRow row;
    row.instance_id = "T8-STA-K200-b5-cv0.1";
    row.pattern = "STA";
    row.horizon = 8;
    row.fixed_cost = 200;
    row.penalty = 5;
    row.cv = 0.1;
    row.method = "bs";
    row.ok = false;
    row.message = "suffix 3: binary search did not bracket, \"quoted\"";
    row.seed = 18446744073709551615ULL;
    row.replications = 10;
    const auto back = parse_detail_row(format_detail_row(row));
    // Commas would break the CSV.
    CHECK(back.message == "suffix 3: binary search did not bracket; \"quoted\"");
    CHECK(back.seed == row.seed);
    CHECK_FALSE(back.ok);
    CHECK_FALSE(back.gap_pct);
    CHECK_THROWS_AS(parse_detail_row("a,b,c"), ParseError);
}

TEST_CASE("summary groups") {
    std::vector<DetailRow> rows(3);
    rows[0] = {"a", "STA", 8, 200, 5, 0.1, "bs", true, 0, 0, 0, 100.0, 101, 0, 10, 1, 1.0};
    rows[1] = {"b", "STA", 8, 300, 5, 0.1, "bs", true, 0, 0, 0, 100.0, 103, 0, 10, 1, 3.0};
    rows[2] = {"c", "RAND", 8, 300, 5, 0.1, "bs", false};
    const auto s = summarize(rows);
    REQUIRE(!s.empty());
    CHECK(s.front().group == "pattern");
    CHECK(s.front().key == "STA");
    CHECK(*s.front().mean_gap_pct == doctest::Approx(2.0));
    CHECK(s.back().group == "overall");
    CHECK(s.back().instances == 3);
    CHECK(s.back().failures == 1);
    CHECK(*s.back().mean_gap_pct == doctest::Approx(2.0));
}

TEST_CASE("benchmark run and resume") {
    const auto detail = tmp("detail.csv");
    const auto summary = tmp("summary.csv");
    std::filesystem::remove(detail);
    auto first = run_benchmark(tiny(), detail, summary);
    REQUIRE(first.detail.size() == 4);
    CHECK(first.resumed == 0);
    for (const auto &r : first.detail) {
        CAPTURE(r.message);
        CHECK(r.ok);
        REQUIRE(r.gap_pct);
        CHECK(std::abs(*r.gap_pct) < 5.0);
        CHECK(r.seed == instance_seed(42, r.instance_id));
    }
    CHECK(read_text_file(summary).rfind("# horizon 8", 0) == 0);

    auto again = run_benchmark(tiny(), detail, summary);
    CHECK(again.resumed == 4);
    strip_seconds(first.detail);
    strip_seconds(again.detail);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(format_detail_row(first.detail[i]) == format_detail_row(again.detail[i]));
    }

    // A killed run: drop one row and cut the last line in half.
    auto text = read_text_file(detail);
    text.erase(text.rfind('\n', text.size() - 2) + 1);
    text.erase(text.rfind('\n', text.size() - 2) + 1);
    const auto cut = text.rfind('\n', text.size() - 2);
    const std::string partial = text.substr(cut + 1, 20);
    text.erase(cut + 1);
    std::ofstream(detail) << text << partial;
    auto resumed = run_benchmark(tiny(), detail, summary);
    CHECK(resumed.resumed == 1);
    strip_seconds(resumed.detail);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(format_detail_row(first.detail[i]) == format_detail_row(resumed.detail[i]));
    }

    auto other = tiny();
    other.seed = 43;
    CHECK_THROWS_AS(run_benchmark(other, detail, summary), ValidationError);
    std::ofstream(detail) << "something else\n";
    CHECK_THROWS_AS(run_benchmark(tiny(), detail, summary), ParseError);
}
