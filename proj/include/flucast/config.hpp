#pragma once

#include "flucast/posterior.hpp"
#include "flucast/priors.hpp"
#include "flucast/sampler.hpp"
#include "flucast/synth.hpp"

#include <istream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

namespace flucast
{

class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Flat `key = value` file; `#` starts a comment. Later keys override earlier ones.
class KeyValueConfig
{
public:
    static KeyValueConfig parse(std::istream& in);
    static KeyValueConfig load(const std::string& path);

    bool has(const std::string& key) const { return m_values.count(key) > 0; }
    std::optional<std::string> get(const std::string& key) const;
    void set(const std::string& key, std::string value) { m_values[key] = std::move(value); }

    double get_double(const std::string& key, double fallback) const;
    std::size_t get_size(const std::string& key, std::size_t fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;

    const std::map<std::string, std::string>& values() const { return m_values; }

    /// Throws ConfigError for keys outside `known` that do not start with one of `prefixes`.
    void check_keys(const std::set<std::string>& known, const std::set<std::string>& prefixes) const;

    /// Canonical `key=value` lines, sorted; stable across formatting differences.
    std::string canonical() const;

private:
    std::map<std::string, std::string> m_values;
};

/// `uniform(a,b)` or `lognormal(meanlog,sdlog[,lower,upper])`.
Prior parse_prior(const std::string& text);

struct RunConfig {
    PriorScenario scenario = PriorScenario::informative;
    PriorSpec prior        = PriorSpec::informative();
    SamplerSettings sampler;
    ModelSetup model; // calendar is supplied separately
};

/// Parses `pi,i_tot0,beta,kappa;p_icu,eta`.
std::vector<Block> parse_blocks(const std::string& text);

RunConfig run_config_from(const KeyValueConfig& cfg);
Scenario scenario_from(const KeyValueConfig& cfg);

/// 64-bit FNV-1a, used for content hashes in run manifests.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t value);

} // namespace flucast
