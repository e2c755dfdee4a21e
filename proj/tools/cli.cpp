#include "cli.hpp"

#include "flucast/config.hpp"
#include "flucast/diagnostics.hpp"
#include "flucast/forecast.hpp"
#include "flucast/io.hpp"
#include "flucast/series.hpp"
#include "flucast/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace flucast::cli
{

namespace fs = std::filesystem;

namespace
{

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConvergenceFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string require_file(const std::string& path, const char* what)
{
    if (fs::is_regular_file(path)) {
        return path;
    }
    if (!fs::path(path).is_absolute()) {
        if (const char* dir = std::getenv(config_dir_env)) {
            const auto candidate = fs::path(dir) / path;
            if (fs::is_regular_file(candidate)) {
                return candidate.string();
            }
        }
    }
    throw UsageError(std::string(what) + " file '" + path + "' not found");
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out << text;
}

template <class Fn>
void write_with(const fs::path& path, Fn&& fn)
{
    std::ostringstream ss;
    fn(ss);
    write_text(path, ss.str());
}

class Manifest
{
public:
    explicit Manifest(std::string command)
    {
        m_json["tool"]    = "flucast";
        m_json["version"] = FLUCAST_VERSION;
        m_json["command"] = std::move(command);
        m_json["inputs"]  = nlohmann::ordered_json::object();
        m_json["outputs"] = nlohmann::ordered_json::array();
    }

    void input(const std::string& role, const std::string& path)
    {
        m_json["inputs"][role] = {{"path", path}, {"fnv1a64", hex64(fnv1a64(read_file(path)))}};
    }

    void setting(const std::string& key, nlohmann::ordered_json value) { m_json[key] = std::move(value); }

    void effective_config(const KeyValueConfig& cfg)
    {
        const auto text        = cfg.canonical();
        m_json["config_hash"]  = hex64(fnv1a64(text));
        m_json["config"]       = cfg.values();
    }

    void output(const std::string& name) { m_json["outputs"].push_back(name); }

    void write(const fs::path& dir) const { write_text(dir / "manifest.json", m_json.dump(2) + "\n"); }

private:
    nlohmann::ordered_json m_json;
};

fs::path prepare_out_dir(const std::string& out)
{
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) {
        throw UsageError("cannot create output directory '" + out + "'");
    }
    return dir;
}

struct FitInputs {
    std::string data;
    std::string calendar;
    std::string config;
    std::string kernel;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::string cut_week;
    double threshold = 1.05;
};

void add_fit_options(CLI::App& cmd, FitInputs& in)
{
    cmd.add_option("--data", in.data, "Weekly admissions CSV (iso_year,iso_week,count)")->required();
    cmd.add_option("--calendar", in.calendar, "School holiday file (start_day,end_day per line)");
    cmd.add_option("--config", in.config, "Run configuration (key = value)");
    cmd.add_option("--kernel", in.kernel, "Delay kernel override, one weekly probability per line");
    cmd.add_option("--seed", in.seed, "Random seed (overrides the config)");
    cmd.add_option("--out", in.out, "Output directory")->capture_default_str();
    cmd.add_option("--psrf-threshold", in.threshold, "Flag parameters with PSRF above this")->capture_default_str();
}

int run_fit(const FitInputs& in, bool prospective)
{
    Manifest manifest(prospective ? "forecast" : "fit");
    KeyValueConfig cfg;
    if (!in.config.empty()) {
        const auto path = require_file(in.config, "config");
        cfg             = KeyValueConfig::load(path);
        manifest.input("config", path);
    }
    if (in.seed) {
        cfg.set("seed", std::to_string(*in.seed));
    }
    if (!in.kernel.empty()) {
        cfg.set("kernel.file", require_file(in.kernel, "kernel"));
        manifest.input("kernel", cfg.get("kernel.file").value());
    }
    const auto data_path = require_file(in.data, "data");
    const auto cal_path  = in.calendar.empty() ? std::string{} : require_file(in.calendar, "calendar");
    RunConfig rc         = run_config_from(cfg);
    manifest.effective_config(cfg);
    manifest.input("data", data_path);

    SurveillanceSeries series;
    try {
        series = load_series(data_path);
        if (!cal_path.empty()) {
            series.calendar = load_calendar(cal_path);
            manifest.input("calendar", cal_path);
        }
        series.calendar.check_within(static_cast<int>(7 * series.size()));
    }
    catch (const UsageError&) {
        throw;
    }
    catch (const std::exception& e) {
        throw DataError(e.what(), 0);
    }
    rc.model.calendar = series.calendar;

    std::size_t cut = series.size() - 1;
    if (prospective) {
        IsoWeek cut_week;
        try {
            cut_week = parse_iso_week(in.cut_week);
        }
        catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        const auto idx = series.index_of(cut_week);
        if (!idx) {
            throw UsageError("cut week " + in.cut_week + " is not part of the series");
        }
        cut = *idx;
        manifest.setting("cut_week", format_iso_week(cut_week));
    }
    manifest.setting("seed", rc.sampler.seed);
    manifest.setting("prior", std::string(scenario_name(rc.scenario)));

    std::cerr << "flucast: sampling " << rc.sampler.n_chains << " chains x " << rc.sampler.n_iter
              << " iterations on " << series.size() << " weeks\n";
    FitResult result;
    try {
        result = prospective ? prospective_run(series, cut, rc.prior, rc.model, rc.sampler)
                             : fit_season(series, rc.prior, rc.model, rc.sampler);
    }
    catch (const std::domain_error& e) {
        throw DataError(e.what(), 0);
    }

    const fs::path dir = prepare_out_dir(in.out);
    write_with(dir / "draws.csv", [&](std::ostream& os) { write_draws_csv(os, result.draws); });
    manifest.output("draws.csv");
    write_with(dir / "predictive.csv", [&](std::ostream& os) { write_summary_csv(os, result.summary); });
    manifest.output("predictive.csv");
    write_text(dir / "summary.json", posterior_summary_json(result.draws, rc.model.gamma));
    manifest.output("summary.json");

    bool converged = true;
    try {
        const auto report = diagnostics(result.draws, in.threshold);
        write_text(dir / "diagnostics.json", diagnostics_json(report));
        manifest.output("diagnostics.json");
        converged = report.converged();
        for (const auto& p : report.params) {
            if (p.flagged) {
                std::cerr << "flucast: " << p.name << " PSRF " << p.psrf << " exceeds " << in.threshold << "\n";
            }
        }
    }
    catch (const std::domain_error& e) {
        std::cerr << "flucast: diagnostics skipped: " << e.what() << "\n";
    }

    if (prospective) {
        const auto held_out = series.observed();
        try {
            const auto score = score_forecast(result.summary, held_out);
            nlohmann::ordered_json j = {{"weeks", score.n_weeks},
                                        {"coverage95", score.coverage95},
                                        {"coverage50", score.coverage50},
                                        {"mean_abs_error", score.mean_abs_error},
                                        {"median_abs_error", score.median_abs_error}};
            write_text(dir / "forecast_score.json", j.dump(2) + "\n");
            manifest.output("forecast_score.json");
        }
        catch (const std::domain_error&) {
            // nothing held out to score against
        }
    }
    manifest.write(dir);

    if (!converged) {
        throw ConvergenceFailure("posterior chains did not converge");
    }
    return success;
}

struct SimulateInputs {
    std::string scenario;
    std::string calendar;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::string mode;
};

int run_simulate(const SimulateInputs& in)
{
    Manifest manifest("simulate");
    KeyValueConfig cfg;
    if (!in.scenario.empty()) {
        const auto path = require_file(in.scenario, "scenario");
        cfg             = KeyValueConfig::load(path);
        manifest.input("scenario", path);
    }
    if (in.seed) {
        cfg.set("seed", std::to_string(*in.seed));
    }
    if (!in.mode.empty()) {
        cfg.set("mode", in.mode);
    }
    std::optional<HolidayCalendar> calendar;
    if (!in.calendar.empty()) {
        const auto path = require_file(in.calendar, "calendar");
        try {
            calendar = load_calendar(path);
        }
        catch (const std::exception& e) {
            throw DataError(e.what(), 0);
        }
        manifest.input("calendar", path);
    }
    Scenario sc = scenario_from(cfg);
    if (calendar) {
        sc.model.calendar = *calendar;
        try {
            sc.validate();
        }
        catch (const std::invalid_argument& e) {
            throw DataError(e.what(), 0);
        }
    }
    manifest.effective_config(cfg);
    manifest.setting("seed", sc.seed);
    manifest.setting("mode", std::string(mode_name(sc.mode)));

    const auto season  = simulate_series(sc);
    const fs::path dir = prepare_out_dir(in.out);
    write_with(dir / "series.csv", [&](std::ostream& os) { write_series(os, season.series); });
    manifest.output("series.csv");
    write_with(dir / "latent.csv", [&](std::ostream& os) { write_latent_csv(os, season); });
    manifest.output("latent.csv");
    manifest.write(dir);
    return success;
}

struct DiagnoseInputs {
    std::string draws;
    std::string out;
    double threshold = 1.05;
};

int run_diagnose(const DiagnoseInputs& in)
{
    const auto path = require_file(in.draws, "draws");
    PosteriorDraws draws;
    DiagnosticsReport report;
    try {
        std::ifstream f(path);
        draws  = read_draws_csv(f);
        report = diagnostics(draws, in.threshold);
    }
    catch (const std::exception& e) {
        throw DataError(e.what(), 0);
    }
    const auto text = diagnostics_json(report);
    if (in.out.empty()) {
        std::cout << text;
    }
    else {
        write_text(prepare_out_dir(in.out) / "diagnostics.json", text);
    }
    for (const auto& p : report.params) {
        if (p.flagged) {
            std::cerr << "flucast: " << p.name << " PSRF " << p.psrf << " exceeds " << in.threshold << "\n";
        }
    }
    if (!report.converged()) {
        throw ConvergenceFailure("posterior chains did not converge");
    }
    return success;
}

} // namespace

int run_command(const std::vector<std::string>& args)
{
    CLI::App app{"Seasonal influenza admissions: SEEIIR fitting and forecasting"};
    app.require_subcommand(1);

    FitInputs fit_in;
    auto* fit = app.add_subcommand("fit", "Retrospective fit of a whole season");
    add_fit_options(*fit, fit_in);

    FitInputs forecast_in;
    auto* forecast = app.add_subcommand("forecast", "Fit data up to a cut week and forecast the rest");
    add_fit_options(*forecast, forecast_in);
    forecast->add_option("--cut-week", forecast_in.cut_week, "Last training week, e.g. 2015-W08")->required();

    SimulateInputs sim_in;
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic season");
    simulate->add_option("--scenario", sim_in.scenario, "Scenario file (key = value)");
    simulate->add_option("--calendar", sim_in.calendar, "School holiday file");
    simulate->add_option("--mode", sim_in.mode, "seasonal-icu or pandemic-hospital");
    simulate->add_option("--seed", sim_in.seed, "Random seed (overrides the scenario)");
    simulate->add_option("--out", sim_in.out, "Output directory")->capture_default_str();

    DiagnoseInputs diag_in;
    auto* diagnose = app.add_subcommand("diagnose", "PSRF and ESS of a draws file");
    diagnose->add_option("--draws", diag_in.draws, "Draws CSV written by fit/forecast")->required();
    diagnose->add_option("--out", diag_in.out, "Output directory (default: stdout)");
    diagnose->add_option("--psrf-threshold", diag_in.threshold, "Flag parameters with PSRF above this")
        ->capture_default_str();

    std::vector<std::string> owned;
    owned.reserve(args.size() + 1);
    owned.emplace_back("flucast");
    owned.insert(owned.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : owned) {
        argv.push_back(a.data());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    }
    catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage_error;
    }

    try {
        if (fit->parsed()) {
            return run_fit(fit_in, false);
        }
        if (forecast->parsed()) {
            return run_fit(forecast_in, true);
        }
        if (simulate->parsed()) {
            return run_simulate(sim_in);
        }
        return run_diagnose(diag_in);
    }
    catch (const UsageError& e) {
        std::cerr << "flucast: " << e.what() << "\n";
        return usage_error;
    }
    catch (const ConfigError& e) {
        std::cerr << "flucast: " << e.what() << "\n";
        return usage_error;
    }
    catch (const DataError& e) {
        std::cerr << "flucast: data error: " << e.what() << "\n";
        return data_error;
    }
    catch (const SamplerError& e) {
        std::cerr << "flucast: sampler failure: " << e.what() << "\n";
        return convergence_error;
    }
    catch (const ConvergenceFailure& e) {
        std::cerr << "flucast: " << e.what() << "\n";
        return convergence_error;
    }
    catch (const std::exception& e) {
        std::cerr << "flucast: " << e.what() << "\n";
        return runtime_failure;
    }
}

} // namespace flucast::cli
