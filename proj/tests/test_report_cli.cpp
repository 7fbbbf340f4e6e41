#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqdist/cli.hpp"

using namespace seqdist;
using json = nlohmann::json;

namespace {

struct Result {
    int code = 0;
    std::string out, err;
};

Result call(std::vector<std::string> args) {
    args.insert(args.begin(), "seqdist");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Result r;
    r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::vector<json> rows(const std::string& jsonl) {
    std::vector<json> out;
    std::istringstream in(jsonl);
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) out.push_back(json::parse(line));
    return out;
}

std::vector<json> of(const std::vector<json>& all, const std::string& quantity) {
    std::vector<json> out;
    for (const auto& r : all)
        if (r["quantity"] == quantity) out.push_back(r);
    return out;
}

} // namespace

TEST_CASE("exit codes", "[cli]") {
    CHECK(call({"--help"}).code == 0);
    CHECK(call({}).code == 2);
    CHECK(call({"analyze", "--bogus"}).code == 2);
    CHECK(call({"analyze", "--fixture", "F9"}).code == 2);
    CHECK(call({"analyze", "--fixture", "F2", "--spec-file", "x.spec"}).code == 2);
    CHECK(call({"weights", "--fixture", "F2", "--horizon", "1000"}).code == 2);
    CHECK(call({"analyze", "--fixture", "F2", "--horizon", "1000", "--format", "xml"}).code == 2);
    CHECK(call({"analyze", "--fixture", "F2", "--horizon", "1000", "--meshes", "0.1,0.2"}).code == 2);

    ::setenv(cli::kMaxHorizonEnv, "500", 1);
    const auto capped = call({"analyze", "--fixture", "F2", "--horizon", "1000"});
    ::unsetenv(cli::kMaxHorizonEnv);
    CHECK(capped.code == 3);
    CHECK(capped.err.find("seqdist:") != std::string::npos);
}

TEST_CASE("analyze reports on the fixtures", "[cli]") {
    const auto f4 = call({"analyze", "--fixture", "F4", "--horizon", "30000", "--schedule", "48,2", "--format", "jsonl"});
    REQUIRE(f4.code == 0);
    const auto all = rows(f4.out);
    for (const auto& r : all) CHECK(r["schema"] == report::kSchema);
    const auto lor = of(all, "lorentz");
    REQUIRE(lor.size() == 1);
    CHECK(lor[0]["verdict"] == "almost-convergent");
    CHECK(std::abs(lor[0]["estimate"].get<double>() - 1.0 / 3.0) < 1e-12);
    const auto vw = of(all, "value_weight");
    REQUIRE(vw.size() == 2);
    CHECK(vw[1]["w_l_count"].get<std::int64_t>() * 3 == vw[1]["w_l_n"].get<std::int64_t>());
    const auto cv = of(all, "cross_validation");
    REQUIRE(cv.size() == 1);
    CHECK(cv[0]["consistent"] == true);
    CHECK(cv[0]["weight_path_method"] == "simple-sum");

    const auto f2 = rows(call({"analyze", "--fixture", "F2", "--horizon", "4096", "--format", "jsonl"}).out);
    CHECK(of(f2, "lorentz")[0]["estimate"] == 1.0);

    const auto f6 = rows(call({"analyze", "--fixture", "F6", "--horizon", "16384", "--schedule-limit", "2048",
                               "--format", "jsonl"})
                             .out);
    CHECK(of(f6, "lorentz")[0]["verdict"] == "not-almost-convergent");
    for (const auto& r : of(f6, "cesaro")) CHECK(r["gap"] == 1.0);
}

TEST_CASE("weights subcommand", "[cli]") {
    const auto f5 = rows(call({"weights", "--fixture", "F5", "--horizon", "100000", "--interval", "0,0.5",
                               "--format", "jsonl"})
                             .out);
    const auto w = of(f5, "weight");
    REQUIRE(w.size() == 1);
    CHECK(w[0]["label"] == "[0,0.5)");
    CHECK(std::abs(w[0]["point"].get<double>() - 0.5) < 0.01);
    CHECK(!of(f5, "window").empty());

    const auto f1 = rows(call({"weights", "--fixture", "F1", "--horizon", "10000", "--interval", "0.9,1.1",
                               "--format", "jsonl"})
                             .out);
    CHECK(of(f1, "weight")[0]["w_l"] == 0.0);
    for (const auto& r : of(f1, "window")) CHECK(r["max_count"] == 3);

    const auto f2 = rows(call({"weights", "--fixture", "F2", "--horizon", "1000", "--value", "1", "--format",
                               "jsonl"})
                             .out);
    CHECK(of(f2, "weight")[0]["w_l"] == 1.0);
    CHECK(of(f2, "weight")[0]["w_u"] == 1.0);
}

TEST_CASE("demo-nonmeasure", "[cli]") {
    const auto r = call({"demo-nonmeasure", "--format", "jsonl"});
    REQUIRE(r.code == 0);
    const auto all = rows(r.out);
    const auto nm = of(all, "nonmeasure");
    REQUIRE(nm.size() == 4);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(nm[i]["sequence"] == "F1");
        CHECK(nm[i]["w_l_count"] == 0);
        CHECK(nm[i]["limit"] == 0);
        CHECK(nm[i]["w_u_count"].get<std::int64_t>() <= nm[i]["n0"].get<std::int64_t>());
    }
    CHECK(nm[3]["sequence"] == "F2");
    CHECK(nm[3]["w_l"] == 1.0);
    CHECK(nm[3]["limit"] == 1);
    for (const auto& w : of(all, "window")) {
        const auto label = w["label"].get<std::string>();
        const auto n0 = std::stoll(label.substr(label.find('=') + 1));
        CHECK(w["max_count"].get<std::int64_t>() == std::min<std::int64_t>(n0, w["n"].get<std::int64_t>()));
        CHECK(w["min_count"] == 0);
    }
    CHECK(of(all, "note").size() == 1);

    // smaller horizon: the finite sets still weigh 0 from below and F2 still weighs 1
    const auto small = of(rows(call({"demo-nonmeasure", "--horizon", "1000", "--format", "jsonl"}).out), "nonmeasure");
    REQUIRE(small.size() == 4);
    for (std::size_t i = 0; i < 3; ++i) CHECK(small[i]["w_l_count"] == 0);
    CHECK(small[0]["limit"] == 0);
    CHECK(small[3]["w_l"] == 1.0);
    CHECK(small[3]["limit"] == 1);

    const auto table = call({"demo-nonmeasure"});
    CHECK(table.code == 0);
    CHECK(table.out.find("== nonmeasure ==") != std::string::npos);
}

TEST_CASE("output is deterministic and formats agree", "[cli]") {
    const std::vector<std::string> base{"analyze", "--fixture", "F5", "--horizon", "8192"};
    auto with = [&](const std::string& fmt) {
        auto a = base;
        a.insert(a.end(), {"--format", fmt});
        return call(a).out;
    };
    const auto j1 = with("jsonl"), j2 = with("jsonl");
    CHECK(j1 == j2);
    CHECK(with("table") == with("table"));

    const auto csv = with("csv");
    std::istringstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("schema,quantity", 0) == 0);
    std::size_t lines = 0;
    for (std::string l; std::getline(in, l);) ++lines;
    CHECK(lines == rows(j1).size());
}

TEST_CASE("--out and --spec-file", "[cli]") {
    const auto path = std::filesystem::temp_directory_path() / "seqdist_cli_out.jsonl";
    const auto spec = std::string(SEQDIST_SPECS_DIR) + "/one_in_three.spec";
    const auto r = call({"analyze", "--spec-file", spec, "--horizon", "3000", "--format", "jsonl", "--out",
                         path.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    const auto all = rows(ss.str());
    REQUIRE(!all.empty());
    CHECK(all[0]["source"] == spec);
    CHECK(all[0]["kind"] == "periodic");
    std::filesystem::remove(path);
}
