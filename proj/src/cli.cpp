#include "horizon/cli.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "horizon/alg_progress.hpp"
#include "horizon/chinchilla.hpp"
#include "horizon/config.hpp"
#include "horizon/csv.hpp"
#include "horizon/engine.hpp"
#include "horizon/errors.hpp"
#include "horizon/growth_model.hpp"
#include "horizon/scaling_fit.hpp"
#include "horizon/service.hpp"

namespace horizon {

namespace {

using nlohmann::json;

constexpr int kExitInput = 2;
constexpr int kExitCompute = 3;

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError(fmt::format("cannot write {}", path));
    f << text;
    if (!f) throw InputError(fmt::format("failed writing {}", path));
}

// To `path` verbatim, or to `out` followed by a newline.
void emit(std::ostream& out, const std::string& path, const std::string& text) {
    if (path.empty()) {
        out << text;
        if (text.empty() || text.back() != '\n') out << '\n';
    } else {
        write_file(path, text);
    }
}

json read_json_file(const std::string& path) {
    const auto text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(fmt::format("{}: invalid JSON: {}", path, e.what()));
    }
}

std::filesystem::path existing_file(const std::string& path) {
    if (!std::filesystem::is_regular_file(path)) throw InputError(fmt::format("file not found: {}", path));
    return path;
}

struct Options {
    std::string config;

    std::string fit_data;
    std::string fit_transform = "raw";
    bool fit_concave = false;
    std::string fit_cluster = "family";

    std::string request;
    std::string path_csv;
    bool trend_continuation = false;
    std::string horizons;
    std::string unit;
    std::string reliability;
    std::string model;
    std::optional<double> end_year;
    std::string csv_out;

    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> resamples;
    unsigned threads = 0;
    std::optional<double> gamma;
    std::optional<double> gamma_se;

    std::string scenario;

    double n_params = 0.0;
    double n_tokens = 0.0;

    std::string host = "127.0.0.1";
    std::optional<int> port;

    std::string out;
};

Config load(const Options& o) {
    auto config = load_config(resolve_config_path(o.config));
    if (!o.horizons.empty()) config.data.horizons = existing_file(o.horizons);
    return config;
}

void cmd_fit(const Options& o, std::ostream& out) {
    const auto config = load(o);
    const auto path = o.fit_data.empty() ? config.data.family_benchmarks : existing_file(o.fit_data);
    const auto obs = parse_family_benchmarks_csv(read_text_file(path)).records;
    const auto transform = scaling::transform_from_string(o.fit_transform);
    const json report = o.fit_concave ? scaling::to_json(scaling::fit_concave(obs, transform, config.chinchilla))
                                      : scaling::to_json(scaling::fit_shared_slope(obs, transform, config.chinchilla));
    emit(out, o.out, report.dump(2));
}

json forecast_request_json(const Options& o, const Engine& engine) {
    json request = json::object();
    if (!o.request.empty()) {
        request = read_json_file(o.request);
        if (!request.is_object()) throw InputError(fmt::format("{}: request must be a JSON object", o.request));
    } else if (!o.path_csv.empty()) {
        const auto rows = parse_compute_spend_csv(read_text_file(o.path_csv)).records;
        if (rows.empty()) throw InputError(fmt::format("{}: no compute rows", o.path_csv));
        json path = json::array();
        for (const auto& r : rows) {
            if (r.unit != rows.front().unit) throw InputError(fmt::format("{}: mixed units", o.path_csv));
            path.push_back({{"year", r.year}, {"value", r.value}});
        }
        request["path"] = path;
        request["unit"] = rows.front().unit == SpendUnit::flop ? "flop" : "usd_2025";
    } else if (!o.trend_continuation) {
        throw InputError("forecast needs --request, --path or --trend-continuation");
    }

    if (!o.unit.empty()) {
        const std::string unit = o.unit == "usd" ? "usd_2025" : o.unit;
        if (!o.path_csv.empty() && request.at("unit") != unit) {
            throw InputError(fmt::format("--unit {} conflicts with the units in {}", o.unit, o.path_csv));
        }
        request["unit"] = unit;
    }
    if (!o.reliability.empty()) request["reliability"] = o.reliability;
    if (!o.model.empty()) request["model"] = o.model;

    if (o.trend_continuation) {
        // Two FLOP knots continuing the calibration-window compute growth from the anchor.
        const auto& config = engine.config();
        const auto rel = reliability_from_string(request.value("reliability", std::string("p50")));
        const auto cal = engine.calibrate(rel, config.calibration_window);
        const double end = o.end_year.value_or(config.forecast_end_year);
        const double l0 = engine.compute_history().log_interp(cal.t0);
        const double l1 = l0 + cal.past_gK * (end - cal.t0) / std::numbers::ln10;
        request["path"] = json::array({{{"year", cal.t0}, {"value", std::pow(10.0, l0)}},
                                       {{"year", end}, {"value", std::pow(10.0, l1)}}});
        request["unit"] = "flop";
    }
    return request;
}

void cmd_forecast(const Options& o, std::ostream& out) {
    const Engine engine(load(o));
    const auto request = forecast_request_json(o, engine);
    const auto req = parse_forecast_request(request, engine.config());
    const auto result = engine.forecast(req, o.end_year.value_or(engine.config().forecast_end_year));
    emit(out, o.out, to_json(result).dump());
    if (!o.csv_out.empty()) write_file(o.csv_out, forecast_csv(result));
}

void cmd_algprogress(const Options& o, std::ostream& out) {
    const Engine engine(load(o));
    const auto rel = reliability_from_string(o.reliability.empty() ? "p50" : o.reliability);
    alg::BootstrapOptions opts;
    opts.seed = *o.seed;
    opts.n = o.resamples.value_or(engine.config().bootstrap_resamples);
    opts.threads = o.threads;
    const auto sample = alg::paired_sample(engine.horizons(), rel);
    const double gamma = o.gamma.value_or(engine.shared_fit().gamma);
    const double se = o.gamma_se.value_or(engine.shared_fit().se_gamma_clustered);
    if (!std::isfinite(se)) {
        throw InsufficientDataError("clustered SE of gamma is undefined for this fixture; pass --gamma-se");
    }
    const auto est = alg::bootstrap_ci(sample, gamma, se, opts);
    auto report = alg::to_json(est);
    report["gamma"] = gamma;
    report["gamma_se"] = se;
    report["reliability"] = std::string(to_string(rel));
    report["n_obs"] = sample.size();
    emit(out, o.out, report.dump(2));
}

void cmd_simulate(const Options& o, std::ostream& out) {
    const auto scenario = growth::scenario_from_json(read_json_file(o.scenario));
    const auto series =
        growth::simulate_jones(scenario.a0, scenario.input(), scenario.params, scenario.t0, scenario.t1, scenario.dt);
    std::string csv = "t,A\n";
    for (const auto& p : series.points()) csv += fmt::format("{:.17g},{:.17g}\n", p.t, p.value);
    emit(out, o.out, csv);
}

void cmd_chinchilla(const Options& o, std::ostream& out) {
    const auto config = load(o);
    const auto& p = config.chinchilla;
    const double l = chinchilla::loss(p, o.n_params, o.n_tokens);
    const auto opt = chinchilla::optimal_compute_for_loss(p, l);
    const json report{
        {"n_params", o.n_params},
        {"n_tokens", o.n_tokens},
        {"loss", l},
        {"raw_compute", chinchilla::raw_compute(o.n_params, o.n_tokens)},
        {"equivalent_optimal_compute", opt.flop},
        {"optimal_n_params", opt.n_params},
        {"optimal_n_tokens", opt.n_tokens},
    };
    emit(out, o.out, report.dump(2));
}

void cmd_serve(const Options& o, std::ostream& out) {
    const Engine engine(load(o));
    const int port = o.port.value_or(engine.config().port);
    out << fmt::format("listening on http://{}:{}\n", o.host, port) << std::flush;
    serve(engine, o.host, port);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Compute-driven time-horizon forecasts"};
    app.require_subcommand(1);
    app.add_option("--config", o.config, "Config JSON (default: $HORIZON_CONFIG, then the bundled data/config.json)");

    auto* fit = app.add_subcommand("fit", "Fit the horizon-compute elasticity across model families");
    fit->add_option("--data", o.fit_data, "Family benchmarks CSV (default: from config)");
    fit->add_option("--transform", o.fit_transform, "Compute regressor")
        ->check(CLI::IsMember({"raw", "chinchilla"}));
    fit->add_flag("--concave", o.fit_concave, "Fit the Box-Cox (concave) variant");
    fit->add_option("--cluster", o.fit_cluster, "Cluster for standard errors")->check(CLI::IsMember({"family"}));
    fit->add_option("--out", o.out, "Write the JSON report here instead of stdout");

    auto* fc = app.add_subcommand("forecast", "Project time horizons along a compute path");
    auto* src_request = fc->add_option("--request", o.request, "Forecast request JSON (same schema as the service)");
    auto* src_path = fc->add_option("--path", o.path_csv, "Compute path CSV with year,value,unit");
    auto* src_trend = fc->add_flag("--trend-continuation", o.trend_continuation,
                                   "Continue past compute growth (delays are all zero)");
    src_request->excludes(src_path)->excludes(src_trend);
    src_path->excludes(src_trend);
    fc->add_option("--horizons", o.horizons, "Horizons CSV (default: from config)");
    fc->add_option("--unit", o.unit, "Path unit")->check(CLI::IsMember({"flop", "usd", "usd_2025"}));
    fc->add_option("--reliability", o.reliability, "p50 or p80")->check(CLI::IsMember({"p50", "p80"}));
    fc->add_option("--model", o.model, "linear or concave")->check(CLI::IsMember({"linear", "concave"}));
    fc->add_option("--end-year", o.end_year, "Last year of the projection");
    fc->add_option("--out", o.out, "Write the JSON result here instead of stdout");
    fc->add_option("--csv", o.csv_out, "Write plot data (year, trend_minutes, forecast_minutes)");

    auto* ap = app.add_subcommand("algprogress", "Algorithmic progress rate with a bootstrap interval");
    ap->add_option("--seed", o.seed, "Bootstrap seed")->required();
    ap->add_option("--n", o.resamples, "Number of resamples (default: from config)");
    ap->add_option("--threads", o.threads, "Worker threads (0: all cores); does not change the result");
    ap->add_option("--reliability", o.reliability, "p50 or p80")->check(CLI::IsMember({"p50", "p80"}));
    ap->add_option("--horizons", o.horizons, "Horizons CSV (default: from config)");
    ap->add_option("--gamma", o.gamma, "Elasticity (default: shared-slope fit)");
    ap->add_option("--gamma-se", o.gamma_se, "Standard error of the elasticity (default: clustered SE of the fit)");
    ap->add_option("--out", o.out, "Write the JSON report here instead of stdout");

    auto* sim = app.add_subcommand("simulate", "Integrate the ideas production function; prints t,A as CSV");
    sim->add_option("--scenario", o.scenario, "Scenario JSON")->required();
    sim->add_option("--out", o.out, "Write the CSV here instead of stdout");

    auto* ch = app.add_subcommand("chinchilla", "Loss and compute-optimal equivalent of an (N, D) allocation");
    ch->add_option("--params", o.n_params, "Parameter count N")->required()->check(CLI::PositiveNumber);
    ch->add_option("--tokens", o.n_tokens, "Training tokens D")->required()->check(CLI::PositiveNumber);
    ch->add_option("--out", o.out, "Write the JSON report here instead of stdout");

    auto* sv = app.add_subcommand("serve", "Run the JSON HTTP service");
    sv->add_option("--host", o.host, "Bind address");
    sv->add_option("--port", o.port, "Port (default: from config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (fit->parsed()) cmd_fit(o, out);
        if (fc->parsed()) cmd_forecast(o, out);
        if (ap->parsed()) cmd_algprogress(o, out);
        if (sim->parsed()) cmd_simulate(o, out);
        if (ch->parsed()) cmd_chinchilla(o, out);
        if (sv->parsed()) cmd_serve(o, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitCompute;
    }
    return 0;
}

}  // namespace horizon
