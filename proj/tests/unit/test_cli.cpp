#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "doctest.h"
#include "json.hpp"

#include "horizon/cli.hpp"
#include "horizon/config.hpp"
#include "horizon/csv.hpp"
#include "horizon/engine.hpp"
#include "horizon/service.hpp"
#include "oracles.hpp"

using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), {"horizon", "--config", oracle::data_file("config.json").string()});
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = horizon::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "horizon-cli-tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

std::string slurp(const std::filesystem::path& p) {
    return horizon::read_text_file(p);
}

}  // namespace

TEST_CASE("fit command") {
    const auto r = run({"fit", "--transform", "chinchilla", "--cluster", "family"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j.at("transform") == "chinchilla");
    CHECK(j.at("partial_r2").get<double>() > 0.9);

    const auto c = run({"fit", "--concave"});
    REQUIRE(c.code == 0);
    CHECK(json::parse(c.out).contains("rho"));

    const auto exact = scratch("exact.csv");
    write(exact,
          "family,model_id,benchmark,params,tokens,training_flop,horizon_minutes\n"
          "F,a,B,1e9,1e12,6e21,2\nF,b,B,2e9,1e12,1.2e22,2.8284271247461903\n"
          "F,c,B,4e9,1e12,2.4e22,4\nG,d,B,1e9,1e12,6e21,10\nG,e,B,4e9,1e12,2.4e22,20\n");
    const auto e = run({"fit", "--data", exact.string()});
    REQUIRE(e.code == 0);
    CHECK(json::parse(e.out).at("partial_r2").get<double>() == doctest::Approx(1.0).epsilon(1e-12));

    const auto missing = run({"fit", "--data", "/nonexistent/bench.csv"});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("/nonexistent/bench.csv") != std::string::npos);

    CHECK(run({"fit", "--transform", "cubic"}).code == 2);
    CHECK(run({"fit", "--cluster", "model"}).code == 2);
}

TEST_CASE("fit command recovers rho near zero on log-linear data") {
    const auto p = scratch("rho0.csv");
    std::string csv = "family,model_id,benchmark,params,tokens,training_flop,horizon_minutes\n";
    const std::vector<double> noise{0.01, -0.02, 0.015, -0.01, 0.0, 0.02, -0.015, 0.01};
    for (int g = 0; g < 2; ++g) {
        for (int i = 0; i < 8; ++i) {
            const double flop = 1e21 * std::pow(3.0, i);
            const double y = std::exp(g + 0.5 * std::log(flop / 1e21) + noise[(i + 3 * g) % 8]);
            csv += fmt::format("F{},m{}_{},B,{},{},{},{}\n", g, g, i, flop / 6e12, 1e12, flop, y);
        }
    }
    write(p, csv);
    const auto r = run({"fit", "--data", p.string(), "--concave"});
    REQUIRE(r.code == 0);
    CHECK(std::abs(json::parse(r.out).at("rho").get<double>()) < 0.05);
}

TEST_CASE("forecast command writes json and plot csv") {
    const auto out = scratch("fc.json");
    const auto csv = scratch("fc.csv");
    const auto r = run({"forecast", "--path", oracle::data_file("openai_compute_projection.csv").string(), "--out",
                        out.string(), "--csv", csv.string(), "--end-year", "2040"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(slurp(out));
    CHECK(j.at("milestones").size() == 4);
    CHECK(slurp(csv).rfind("year,trend_minutes,forecast_minutes\n", 0) == 0);

    const auto trend = run({"forecast", "--trend-continuation"});
    REQUIRE(trend.code == 0);
    for (const auto& m : json::parse(trend.out).at("milestones")) {
        CHECK(std::abs(m.at("delay_years").get<double>()) < 1e-9);
    }
}

TEST_CASE("forecast command: p80 delay at one work-month is at least p50's") {
    const auto path = oracle::data_file("openai_compute_projection.csv").string();
    const auto a = json::parse(run({"forecast", "--path", path, "--reliability", "p50"}).out);
    const auto b = json::parse(run({"forecast", "--path", path, "--reliability", "p80"}).out);
    CHECK(b["milestones"][3]["delay_years"].get<double>() >= a["milestones"][3]["delay_years"].get<double>());
}

TEST_CASE("forecast command errors") {
    CHECK(run({"forecast"}).code == 2);
    const auto missing = run({"forecast", "--path", "/nonexistent/path.csv"});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("/nonexistent/path.csv") != std::string::npos);
    const auto bad_json = scratch("bad.json");
    write(bad_json, "{not json");
    CHECK(run({"forecast", "--request", bad_json.string()}).code == 2);

    // A calibration window holding a single horizon point cannot be calibrated.
    const auto narrow = scratch("narrow.json");
    write(narrow, R"({"path": [{"year": 2025, "value": 1e26}, {"year": 2030, "value": 1e28}],
                      "calibration_window": [2019.0, 2019.5]})");
    const auto r = run({"forecast", "--request", narrow.string()});
    CHECK(r.code == 3);
}

TEST_CASE("cli and service produce byte-identical forecast json") {
    const horizon::Engine engine(horizon::load_config(oracle::data_file("config.json")));
    const std::vector<std::string> requests{
        R"({"path": [{"year": 2025, "value": 9e9}, {"year": 2027, "value": 3.7e10}, {"year": 2030, "value": 6.5e10}], "unit": "usd_2025"})",
        R"({"path": [{"year": 2025.5, "value": 3e26}, {"year": 2032, "value": 1e29}], "reliability": "p80", "model": "concave"})",
        R"({"path": [{"year": 2025, "value": 3e26}, {"year": 2028, "value": 1e27}], "thresholds_minutes": [120, 960]})",
    };
    for (std::size_t i = 0; i < requests.size(); ++i) {
        const auto req = scratch(fmt::format("req{}.json", i));
        const auto out = scratch(fmt::format("out{}.json", i));
        write(req, requests[i]);
        REQUIRE(run({"forecast", "--request", req.string(), "--out", out.string()}).code == 0);
        const auto reply = horizon::handle_forecast(engine, requests[i]);
        CHECK(reply.status == 200);
        CHECK(slurp(out) == reply.body);
    }
}

TEST_CASE("algprogress command") {
    CHECK(run({"algprogress"}).code == 2);
    const auto a = run({"algprogress", "--seed", "7", "--n", "2000"});
    const auto b = run({"algprogress", "--seed", "7", "--n", "2000", "--threads", "3"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto j = json::parse(a.out);
    CHECK(j.at("seed") == 7);
    CHECK(j.at("n") == 2000);
    CHECK(j.at("ci")[0].get<double>() <= j.at("point").get<double>());
}

TEST_CASE("simulate command") {
    const auto s = scratch("scenario.json");
    write(s, R"({"A0": 1, "k": 1, "beta": 1, "lambda": 1, "E0": 2, "gE": 0, "t0": 0, "t1": 3, "dt": 0.5})");
    const auto r = run({"simulate", "--scenario", s.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("t,A\n", 0) == 0);
    CHECK(r.out.find("\n3,7\n") != std::string::npos);
    CHECK(run({"simulate", "--scenario", "/nonexistent/s.json"}).code == 2);
}

TEST_CASE("chinchilla command") {
    const auto r = run({"chinchilla", "--params", "8e9", "--tokens", "1.5e13"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j.at("loss").get<double>() == doctest::Approx(1.949).epsilon(1e-3));
    CHECK(j.at("equivalent_optimal_compute").get<double>() <= 7.2e23);
    CHECK(run({"chinchilla", "--params", "-1", "--tokens", "1"}).code == 2);
}

TEST_CASE("missing config file exits with an input error") {
    std::vector<const char*> argv{"horizon", "--config", "/nonexistent/config.json", "fit"};
    std::ostringstream out;
    std::ostringstream err;
    CHECK(horizon::run_cli(4, argv.data(), out, err) == 2);
    CHECK(err.str().find("/nonexistent/config.json") != std::string::npos);
}
