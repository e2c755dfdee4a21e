#include "flucast/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace flucast
{

namespace
{

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = text.find(sep, pos);
        out.push_back(trim(std::string_view(text).substr(pos, next - pos)));
        if (next == std::string::npos) {
            break;
        }
        pos = next + 1;
    }
    return out;
}

double to_double(const std::string& key, const std::string& text)
{
    try {
        std::size_t used = 0;
        const double v   = std::stod(text, &used);
        if (used != text.size()) {
            throw std::invalid_argument(text);
        }
        return v;
    }
    catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': '" + text + "' is not a number");
    }
}

template <class T>
T to_integer(const std::string& key, const std::string& text)
{
    T v{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec]  = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("config key '" + key + "': '" + text + "' is not a non-negative integer");
    }
    return v;
}

const std::set<std::string> run_keys = {"prior",        "chains",        "iterations",      "burn_in",
                                        "thin",         "seed",          "init_candidates", "threads",
                                        "blocks",       "proposal_sd",   "population",      "sigma",
                                        "gamma",        "step",          "kernel.mean_days", "kernel.shape",
                                        "kernel.max_week", "kernel.file", "optimize_evaluations", "rescue_gap", "ridge_move"};

} // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in)
{
    KeyValueConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const auto content = trim(line);
        if (content.empty()) {
            continue;
        }
        const auto eq = content.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const auto key = trim(std::string_view(content).substr(0, eq));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        }
        cfg.m_values[key] = trim(std::string_view(content).substr(eq + 1));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    return parse(in);
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const
{
    const auto it = m_values.find(key);
    if (it == m_values.end()) {
        return std::nullopt;
    }
    return it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const
{
    const auto v = get(key);
    return v ? to_double(key, *v) : fallback;
}

std::size_t KeyValueConfig::get_size(const std::string& key, std::size_t fallback) const
{
    const auto v = get(key);
    return v ? to_integer<std::size_t>(key, *v) : fallback;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const
{
    const auto v = get(key);
    return v ? to_integer<std::uint64_t>(key, *v) : fallback;
}

void KeyValueConfig::check_keys(const std::set<std::string>& known, const std::set<std::string>& prefixes) const
{
    for (const auto& [key, value] : m_values) {
        if (known.count(key)) {
            continue;
        }
        bool prefixed = false;
        for (const auto& p : prefixes) {
            prefixed = prefixed || key.rfind(p, 0) == 0;
        }
        if (!prefixed) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
}

std::string KeyValueConfig::canonical() const
{
    std::string out;
    for (const auto& [key, value] : m_values) {
        out += key;
        out += '=';
        out += value;
        out += '\n';
    }
    return out;
}

Prior parse_prior(const std::string& text)
{
    const auto open  = text.find('(');
    const auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        throw ConfigError("prior '" + text + "' must look like uniform(a,b) or lognormal(meanlog,sdlog)");
    }
    const auto kind = trim(std::string_view(text).substr(0, open));
    std::vector<double> args;
    for (const auto& a : split(text.substr(open + 1, close - open - 1), ',')) {
        args.push_back(to_double("prior", a));
    }
    try {
        if (kind == "uniform" && args.size() == 2) {
            return Prior::uniform(args[0], args[1]);
        }
        if (kind == "lognormal" && args.size() == 2) {
            return Prior::lognormal(args[0], args[1]);
        }
        if (kind == "lognormal" && args.size() == 4) {
            return Prior::lognormal(args[0], args[1], args[2], args[3]);
        }
    }
    catch (const std::invalid_argument& e) {
        throw ConfigError("prior '" + text + "': " + e.what());
    }
    throw ConfigError("prior '" + text + "' must look like uniform(a,b) or lognormal(meanlog,sdlog)");
}

std::vector<Block> parse_blocks(const std::string& text)
{
    std::vector<Block> blocks;
    for (const auto& group : split(text, ';')) {
        Block b;
        for (const auto& name : split(group, ',')) {
            try {
                b.push_back(static_cast<std::size_t>(param_from_name(name)));
            }
            catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
        blocks.push_back(std::move(b));
    }
    try {
        validate_blocks(blocks, n_params);
    }
    catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return blocks;
}

RunConfig run_config_from(const KeyValueConfig& cfg)
{
    cfg.check_keys(run_keys, {"prior."});
    RunConfig rc;
    try {
        rc.scenario = scenario_from_name(cfg.get("prior").value_or("informative"));
    }
    catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    rc.prior = PriorSpec::for_scenario(rc.scenario);
    for (std::size_t k = 0; k < n_params; ++k) {
        const auto key = "prior." + std::string(param_names[k]);
        if (const auto v = cfg.get(key)) {
            rc.prior.priors[k] = parse_prior(*v);
        }
    }

    auto& s           = rc.sampler;
    s.n_chains        = cfg.get_size("chains", s.n_chains);
    s.n_iter          = cfg.get_size("iterations", s.n_iter);
    s.burn_in         = cfg.get_size("burn_in", s.n_iter / 5);
    s.thin            = cfg.get_size("thin", s.thin);
    s.seed            = cfg.get_u64("seed", s.seed);
    s.init_candidates = cfg.get_size("init_candidates", s.init_candidates);
    s.threads         = cfg.get_size("threads", s.threads);
    s.initial_sd      = cfg.get_double("proposal_sd", s.initial_sd);
    s.optimize_evaluations = cfg.get_size("optimize_evaluations", s.optimize_evaluations);
    s.rescue_gap           = cfg.get_double("rescue_gap", s.rescue_gap);
    if (const auto v = cfg.get("ridge_move")) {
        if (*v == "on" || *v == "true" || *v == "1") {
            s.ridge_move = true;
        }
        else if (*v == "off" || *v == "false" || *v == "0") {
            s.ridge_move = false;
        }
        else {
            throw ConfigError("ridge_move must be on or off, got '" + *v + "'");
        }
    }
    if (const auto v = cfg.get("blocks")) {
        s.blocks = parse_blocks(*v);
    }
    try {
        s.validate(n_params);
    }
    catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    auto& m = rc.model;
    m.n_pop = cfg.get_double("population", m.n_pop);
    m.sigma = cfg.get_double("sigma", m.sigma);
    m.gamma = cfg.get_double("gamma", m.gamma);
    m.step  = cfg.get_double("step", m.step);
    if (!(m.n_pop > 0.0) || !(m.sigma > 0.0) || !(m.gamma > 0.0) || !(m.step > 0.0)) {
        throw ConfigError("population, sigma, gamma and step must be positive");
    }
    try {
        if (const auto path = cfg.get("kernel.file")) {
            m.kernel = load_kernel(*path);
        }
        else {
            m.kernel = default_delay_kernel(cfg.get_double("kernel.mean_days", 9.0), cfg.get_double("kernel.shape", 4.0),
                                            cfg.get_size("kernel.max_week", 4));
        }
    }
    catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("kernel: ") + e.what());
    }
    catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }
    return rc;
}

Scenario scenario_from(const KeyValueConfig& cfg)
{
    cfg.check_keys(run_keys, {"prior.", "true.", "mode", "weeks", "first_week"});
    ScenarioMode mode = ScenarioMode::seasonal_icu;
    try {
        mode = mode_from_name(cfg.get("mode").value_or("seasonal-icu"));
    }
    catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    Scenario sc = mode == ScenarioMode::pandemic_hospital ? Scenario::pandemic() : Scenario::seasonal();
    for (const auto& [key, value] : cfg.values()) {
        if (key.rfind("true.", 0) != 0) {
            continue;
        }
        auto name = key.substr(5);
        if (name == "p" || name == "p_hosp") {
            name = "p_icu";
        }
        try {
            sc.truth[param_from_name(name)] = to_double(key, value);
        }
        catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    sc.n_weeks = cfg.get_size("weeks", sc.n_weeks);
    sc.seed    = cfg.get_u64("seed", sc.seed);
    if (const auto v = cfg.get("first_week")) {
        try {
            sc.first_week = parse_iso_week(*v);
        }
        catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    sc.model.n_pop = cfg.get_double("population", sc.model.n_pop);
    sc.model.sigma = cfg.get_double("sigma", sc.model.sigma);
    sc.model.gamma = cfg.get_double("gamma", sc.model.gamma);
    sc.model.step  = cfg.get_double("step", sc.model.step);
    if (cfg.has("kernel.file") || cfg.has("kernel.mean_days") || cfg.has("kernel.shape") || cfg.has("kernel.max_week")) {
        const auto& fallback = sc.mode == ScenarioMode::pandemic_hospital ? 5.0 : 9.0;
        try {
            sc.model.kernel = cfg.has("kernel.file")
                                  ? load_kernel(*cfg.get("kernel.file"))
                                  : default_delay_kernel(cfg.get_double("kernel.mean_days", fallback),
                                                         cfg.get_double("kernel.shape", 4.0),
                                                         cfg.get_size("kernel.max_week", 4));
        }
        catch (const std::exception& e) {
            throw ConfigError(std::string("kernel: ") + e.what());
        }
    }
    try {
        sc.validate();
    }
    catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return sc;
}

std::uint64_t fnv1a64(std::string_view data)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t value)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int k = 15; k >= 0; --k) {
        out[static_cast<std::size_t>(k)] = digits[value & 0xf];
        value >>= 4;
    }
    return out;
}

} // namespace flucast
