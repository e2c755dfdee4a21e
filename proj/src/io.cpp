#include "flucast/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace flucast
{

namespace
{

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(',', pos);
        out.push_back(line.substr(pos, next - pos));
        if (next == std::string::npos) {
            break;
        }
        pos = next + 1;
    }
    return out;
}

double parse_double(const std::string& text, int line_no)
{
    double v        = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec]  = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        if (text == "-inf") {
            return -std::numeric_limits<double>::infinity();
        }
        throw std::runtime_error("draws line " + std::to_string(line_no) + ": '" + text + "' is not a number");
    }
    return v;
}

std::size_t parse_index(const std::string& text, int line_no)
{
    std::size_t v   = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec]  = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw std::runtime_error("draws line " + std::to_string(line_no) + ": '" + text + "' is not an index");
    }
    return v;
}

const char* draws_header = "chain,iteration,pi,i_tot0,beta,eta,p_icu,kappa,log_posterior";

} // namespace

std::string format_double(double x)
{
    if (std::isinf(x)) {
        return x < 0 ? "-inf" : "inf";
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

void write_draws_csv(std::ostream& out, const PosteriorDraws& draws)
{
    out << draws_header << '\n';
    for (std::size_t c = 0; c < draws.chains.size(); ++c) {
        const auto& chain = draws.chains[c];
        for (std::size_t k = 0; k < chain.draws.size(); ++k) {
            out << c << ',' << chain.iterations[k];
            for (std::size_t j = 0; j < n_params; ++j) {
                out << ',' << format_double(chain.draws[k][j]);
            }
            out << ',' << format_double(chain.log_posterior[k]) << '\n';
        }
    }
}

PosteriorDraws read_draws_csv(std::istream& in)
{
    PosteriorDraws draws;
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line) || (++line_no, line != draws_header)) {
        throw std::runtime_error("draws file must start with header '" + std::string(draws_header) + "'");
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != n_params + 3) {
            throw std::runtime_error("draws line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(n_params + 3) + " fields");
        }
        const std::size_t chain = parse_index(fields[0], line_no);
        if (chain + 1 < draws.chains.size() || chain > draws.chains.size()) {
            throw std::runtime_error("draws line " + std::to_string(line_no) + ": chains must be contiguous and ordered");
        }
        if (chain == draws.chains.size()) {
            draws.chains.emplace_back();
        }
        auto& c = draws.chains.back();
        c.iterations.push_back(parse_index(fields[1], line_no));
        ParamVector theta;
        for (std::size_t j = 0; j < n_params; ++j) {
            theta[j] = parse_double(fields[2 + j], line_no);
        }
        c.draws.push_back(theta);
        c.log_posterior.push_back(parse_double(fields[2 + n_params], line_no));
    }
    if (!draws.chains.empty() && draws.chains.front().iterations.size() > 1) {
        const auto& it = draws.chains.front().iterations;
        draws.thin     = it[1] - it[0];
        draws.n_iter   = it.back();
        draws.burn_in  = it.front() - draws.thin;
    }
    return draws;
}

void write_summary_csv(std::ostream& out, const PredictiveSummary& summary)
{
    out << "week,q2.5,q25,q50,q75,q97.5,phase\n";
    for (const auto& w : summary.weeks) {
        out << format_iso_week(w.week);
        for (double q : w.q) {
            out << ',' << format_double(q);
        }
        out << ',' << (w.phase == Phase::fitted ? "fitted" : "forecast") << '\n';
    }
}

void write_latent_csv(std::ostream& out, const SyntheticSeason& season)
{
    out << "week,s_end,incidence,expected,count\n";
    for (std::size_t w = 0; w < season.incidence.size(); ++w) {
        const auto& rec = season.series.records[w];
        out << format_iso_week(rec.week) << ',' << format_double(season.trajectory[7 * w + 7].s) << ','
            << format_double(season.incidence[w]) << ',' << format_double(season.expected[w]) << ',';
        if (rec.count) {
            out << *rec.count;
        }
        out << '\n';
    }
}

std::string diagnostics_json(const DiagnosticsReport& report)
{
    nlohmann::ordered_json j;
    j["psrf_threshold"] = report.threshold;
    j["converged"]      = report.converged();
    auto& params        = j["parameters"];
    params              = nlohmann::ordered_json::array();
    for (const auto& p : report.params) {
        nlohmann::ordered_json e;
        e["name"] = p.name;
        e["psrf"] = std::isfinite(p.psrf) ? nlohmann::ordered_json(p.psrf) : nlohmann::ordered_json("inf");
        e["ess"]  = p.ess;
        e["flagged"] = p.flagged;
        params.push_back(e);
    }
    return j.dump(2) + "\n";
}

std::string posterior_summary_json(const PosteriorDraws& draws, double gamma)
{
    nlohmann::ordered_json j;
    j["draws"] = draws.total_draws();
    auto& params = j["parameters"];
    params       = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < n_params; ++k) {
        const auto x = draws.marginal(static_cast<Param>(k));
        params[std::string(param_names[k])] = {
            {"median", quantile(x, 0.5)}, {"q2.5", quantile(x, 0.025)}, {"q97.5", quantile(x, 0.975)}};
    }
    const auto derived = derived_quantities(draws, gamma);
    std::vector<double> r0;
    std::vector<double> rn;
    for (const auto& r : derived.per_draw) {
        r0.push_back(r.r0);
        rn.push_back(r.rn);
    }
    j["R0"] = {{"median", quantile(r0, 0.5)}, {"q2.5", quantile(r0, 0.025)}, {"q97.5", quantile(r0, 0.975)}};
    j["Rn"] = {{"median", quantile(rn, 0.5)}, {"q2.5", quantile(rn, 0.025)}, {"q97.5", quantile(rn, 0.975)}};
    j["pr_kappa_above_one"] = derived.pr_kappa_above_one;

    nlohmann::ordered_json acc = nlohmann::ordered_json::array();
    for (const auto& c : draws.chains) {
        nlohmann::ordered_json rates = nlohmann::ordered_json::array();
        for (std::size_t b = 0; b < c.accepted.size(); ++b) {
            rates.push_back(c.proposed[b] ? static_cast<double>(c.accepted[b]) / static_cast<double>(c.proposed[b])
                                          : 0.0);
        }
        acc.push_back({{"seed", c.seed}, {"acceptance", rates}});
    }
    j["chains"] = acc;
    return j.dump(2) + "\n";
}

} // namespace flucast
