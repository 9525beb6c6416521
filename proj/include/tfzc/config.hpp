// Flat key=value run configuration with dotted sections.
//
// Precedence: built-in defaults, then a preset (desk/paper), then the config
// file, then explicit command-line overrides. Unknown keys are rejected by
// name. resolve() materializes every default (including the derived ones:
// carrier frequency, phase coupling, PDP decay, 1D pilot length, stacked
// roots) so the echoed config is complete and, re-fed as input, reproduces
// identical outputs.

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfzc/channel.hpp"
#include "tfzc/grid_io.hpp"
#include "tfzc/scenario.hpp"
#include "tfzc/zc.hpp"

namespace tfzc {

/// Configuration problem (bad key, bad value, invariant violation).
/// Mapped to CLI exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace cfgdetail {

inline const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "grid.delay_bins",
        "grid.doppler_bins",
        "grid.t_step_s",
        "grid.delta_f_hz",
        "channel.beta",
        "channel.normalize_nlos",
        "channel.one_sided_doppler",
        "channel.alpha",
        "channel.kappa",
        "channel.tau_los_s",
        "channel.nu_los_hz",
        "pilot.family",
        "pilot.m",
        "pilot.n",
        "pilot.r_f",
        "pilot.r_t",
        "pilot.l",
        "pilot.r",
        "pilot.roots",
        "scenario.bs_x_m",
        "scenario.bs_y_m",
        "scenario.center_x_m",
        "scenario.center_y_m",
        "scenario.radius_m",
        "scenario.omega_rad_s",
        "scenario.speed_kmph",
        "scenario.carrier_freq_hz",
        "scenario.num_instants",
        "scenario.trials",
        "scenario.master_seed",
        "scenario.kappa_list",
        "scenario.snr_db_list",
        "scenario.pilots",
        "scenario.snapped_truth",
        "scenario.threads",
    };
    return keys;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
    try {
        return parse_double(v);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
    }
}

inline int to_int(const std::string& key, const std::string& v) {
    const double d = to_double(key, v);
    const int i = static_cast<int>(d);
    if (static_cast<double>(i) != d)
        throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
    return i;
}

inline uint64_t to_u64(const std::string& key, const std::string& v) {
    uint64_t out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw ConfigError("config key '" + key + "': expected an unsigned integer, got '" + v +
                          "'");
    return out;
}

inline bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key '" + key + "': expected true/false, got '" + v + "'");
}

template <typename F>
inline auto to_list(const std::string& v, F&& item) {
    std::vector<decltype(item(std::string{}))> out;
    std::istringstream ss(v);
    std::string token;
    while (std::getline(ss, token, ',')) {
        token = trim(token);
        if (!token.empty()) out.push_back(item(token));
    }
    return out;
}

inline PilotFamily to_family(const std::string& key, const std::string& v) {
    if (v == "zc1d") return PilotFamily::zc1d;
    if (v == "separable") return PilotFamily::separable;
    if (v == "stacked") return PilotFamily::stacked;
    if (v == "stacked_t" || v == "stacked_transposed") return PilotFamily::stacked_transposed;
    throw ConfigError("config key '" + key + "': unknown pilot family '" + v + "'");
}

}  // namespace cfgdetail

/// Fully materialized configuration for one run.
struct ResolvedConfig {
    ScenarioConfig scenario;
    PilotSpec pilot;       // single-shot pilot (gen-pilot, acf, estimate)
    double kappa = 1.0;    // single-shot channel parameters (dump-channel)
    double tau_los = 0.0;
    double nu_los = 0.0;

    DDChannelConfig channel_config() const {
        DDChannelConfig c;
        c.delay_bins = scenario.delay_bins;
        c.doppler_bins = scenario.doppler_bins;
        c.one_sided_doppler = scenario.one_sided_doppler;
        c.t_step = scenario.t_step;
        c.delta_f = scenario.delta_f;
        c.tau_los = tau_los;
        c.nu_los = nu_los;
        c.kappa = kappa;
        c.beta = scenario.beta;
        c.normalize_nlos = scenario.normalize_nlos;
        c.alpha = PhaseCoupling{scenario.resolved_alpha()};
        return c;
    }

    /// Complete key=value text; valid as a config file input.
    std::string echo() const;
};

class RunConfig {
  public:
    RunConfig() = default;

    /// desk: reduced grid that runs in seconds; paper: full-size grid.
    void apply_preset(const std::string& name) {
        if (name == "desk") {
            set_all({{"grid.delay_bins", "40"},
                     {"grid.doppler_bins", "40"},
                     {"grid.t_step_s", "1.25e-06"},
                     {"grid.delta_f_hz", "37.5"},
                     {"pilot.m", "11"},
                     {"pilot.n", "7"},
                     {"channel.beta", "10000"},
                     {"scenario.trials", "100"}});
        } else if (name == "paper") {
            set_all({{"grid.delay_bins", "100"},
                     {"grid.doppler_bins", "150"},
                     {"grid.t_step_s", "5e-07"},
                     {"grid.delta_f_hz", "10"},
                     {"pilot.m", "23"},
                     {"pilot.n", "17"},
                     {"channel.beta", "10000"},
                     {"scenario.trials", "100"}});
        } else {
            throw ConfigError("unknown preset '" + name + "' (expected desk or paper)");
        }
    }

    void set(const std::string& key, const std::string& value) {
        bool known = false;
        for (const std::string& k : cfgdetail::known_keys())
            if (k == key) {
                known = true;
                break;
            }
        if (!known) throw ConfigError("unknown config key '" + key + "'");
        values_[key] = value;
    }

    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = cfgdetail::trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(path + ":" + std::to_string(lineno) +
                                  ": expected key=value, got '" + line + "'");
            set(cfgdetail::trim(line.substr(0, eq)), cfgdetail::trim(line.substr(eq + 1)));
        }
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    ResolvedConfig resolve() const;

  private:
    void set_all(std::initializer_list<std::pair<const char*, const char*>> kvs) {
        for (const auto& [k, v] : kvs) set(k, v);
    }

    std::string get(const std::string& key, const std::string& fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    std::map<std::string, std::string> values_;
};

inline ResolvedConfig RunConfig::resolve() const {
    using namespace cfgdetail;
    ResolvedConfig r;
    ScenarioConfig& s = r.scenario;

    s.delay_bins = to_int("grid.delay_bins", get("grid.delay_bins", "100"));
    s.doppler_bins = to_int("grid.doppler_bins", get("grid.doppler_bins", "150"));
    s.t_step = to_double("grid.t_step_s", get("grid.t_step_s", "5e-07"));
    s.delta_f = to_double("grid.delta_f_hz", get("grid.delta_f_hz", "10"));
    if (s.delay_bins < 1 || s.doppler_bins < 0)
        throw ConfigError("config key 'grid.delay_bins': grid dimensions must be positive");
    if (s.t_step <= 0.0 || s.delta_f <= 0.0)
        throw ConfigError("config key 'grid.t_step_s': bin sizes must be positive");

    // PDP decays to -20 dB at the maximum covered delay unless set explicitly
    if (has("channel.beta"))
        s.beta = to_double("channel.beta", get("channel.beta", ""));
    else
        s.beta = std::log(100.0) / (s.delay_bins * s.t_step);
    if (s.beta < 0.0) throw ConfigError("config key 'channel.beta': must be nonnegative");
    s.normalize_nlos = to_bool("channel.normalize_nlos", get("channel.normalize_nlos", "true"));
    s.one_sided_doppler =
        to_bool("channel.one_sided_doppler", get("channel.one_sided_doppler", "false"));
    s.alpha = has("channel.alpha") ? to_double("channel.alpha", get("channel.alpha", ""))
                                   : s.delta_f * s.t_step;

    r.kappa = to_double("channel.kappa", get("channel.kappa", "1"));
    if (r.kappa < 0.0 || r.kappa > 1.0)
        throw ConfigError("config key 'channel.kappa': must be in [0, 1]");
    r.tau_los = to_double("channel.tau_los_s", get("channel.tau_los_s", "0"));
    r.nu_los = to_double("channel.nu_los_hz", get("channel.nu_los_hz", "0"));

    s.pilot_m = to_int("pilot.m", get("pilot.m", "23"));
    s.pilot_n = to_int("pilot.n", get("pilot.n", "17"));
    s.root_f = to_int("pilot.r_f", get("pilot.r_f", "1"));
    s.root_t = to_int("pilot.r_t", get("pilot.r_t", "1"));
    s.zc1d_root = to_int("pilot.r", get("pilot.r", "1"));
    s.zc1d_length = has("pilot.l")
                        ? to_int("pilot.l", get("pilot.l", ""))
                        : default_zc1d_length(s.pilot_m, s.pilot_n, s.zc1d_root);
    s.stacked_roots =
        has("pilot.roots")
            ? to_list(get("pilot.roots", ""),
                      [](const std::string& t) { return to_int("pilot.roots", t); })
            : default_roots(s.pilot_m, s.pilot_n);

    r.pilot.family = to_family("pilot.family", get("pilot.family", "separable"));
    r.pilot.M = s.pilot_m;
    r.pilot.N = s.pilot_n;
    r.pilot.r_f = s.root_f;
    r.pilot.r_t = s.root_t;
    r.pilot.r = s.zc1d_root;
    r.pilot.L = s.zc1d_length;
    r.pilot.roots = s.stacked_roots;

    s.bs_x = to_double("scenario.bs_x_m", get("scenario.bs_x_m", "9500"));
    s.bs_y = to_double("scenario.bs_y_m", get("scenario.bs_y_m", "9500"));
    s.center_x = to_double("scenario.center_x_m", get("scenario.center_x_m", "4000"));
    s.center_y = to_double("scenario.center_y_m", get("scenario.center_y_m", "4000"));
    s.radius = to_double("scenario.radius_m", get("scenario.radius_m", "3500"));
    s.omega = to_double("scenario.omega_rad_s", get("scenario.omega_rad_s", "0.014"));
    s.speed_kmph = to_double("scenario.speed_kmph", get("scenario.speed_kmph", "200"));
    s.carrier_freq = has("scenario.carrier_freq_hz")
                         ? to_double("scenario.carrier_freq_hz", get("scenario.carrier_freq_hz", ""))
                         : 0.0;
    s.carrier_freq = s.resolved_carrier();  // materialize the derived default
    if (!(s.carrier_freq > 0.0))
        throw ConfigError("config key 'scenario.carrier_freq_hz': must be positive");
    s.num_instants = to_int("scenario.num_instants", get("scenario.num_instants", "36"));
    s.trials = to_int("scenario.trials", get("scenario.trials", "100"));
    s.master_seed = to_u64("scenario.master_seed", get("scenario.master_seed", "42"));
    s.kappa_list = to_list(
        get("scenario.kappa_list", "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0"),
        [](const std::string& t) { return to_double("scenario.kappa_list", t); });
    s.snr_db_list = to_list(get("scenario.snr_db_list", "-5,0,5"), [](const std::string& t) {
        return to_double("scenario.snr_db_list", t);
    });
    s.pilots = to_list(get("scenario.pilots", "separable,stacked,zc1d"),
                       [](const std::string& t) { return to_family("scenario.pilots", t); });
    s.snapped_truth = to_bool("scenario.snapped_truth", get("scenario.snapped_truth", "false"));
    s.threads = to_int("scenario.threads", get("scenario.threads", "0"));

    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return r;
}

inline std::string ResolvedConfig::echo() const {
    const ScenarioConfig& s = scenario;
    std::string out;
    auto kv = [&out](const std::string& k, const std::string& v) { out += k + "=" + v + "\n"; };
    auto join_d = [](const std::vector<double>& xs) {
        std::string v;
        for (size_t i = 0; i < xs.size(); ++i) {
            if (i) v += ',';
            v += format_exact(xs[i]);
        }
        return v;
    };
    kv("grid.delay_bins", std::to_string(s.delay_bins));
    kv("grid.doppler_bins", std::to_string(s.doppler_bins));
    kv("grid.t_step_s", format_exact(s.t_step));
    kv("grid.delta_f_hz", format_exact(s.delta_f));
    kv("channel.beta", format_exact(s.beta));
    kv("channel.normalize_nlos", s.normalize_nlos ? "true" : "false");
    kv("channel.one_sided_doppler", s.one_sided_doppler ? "true" : "false");
    kv("channel.alpha", format_exact(s.resolved_alpha()));
    kv("channel.kappa", format_exact(kappa));
    kv("channel.tau_los_s", format_exact(tau_los));
    kv("channel.nu_los_hz", format_exact(nu_los));
    kv("pilot.family", to_string(pilot.family));
    kv("pilot.m", std::to_string(s.pilot_m));
    kv("pilot.n", std::to_string(s.pilot_n));
    kv("pilot.r_f", std::to_string(s.root_f));
    kv("pilot.r_t", std::to_string(s.root_t));
    kv("pilot.l", std::to_string(s.zc1d_length));
    kv("pilot.r", std::to_string(s.zc1d_root));
    {
        std::string roots;
        for (size_t i = 0; i < s.stacked_roots.size(); ++i) {
            if (i) roots += ',';
            roots += std::to_string(s.stacked_roots[i]);
        }
        kv("pilot.roots", roots);
    }
    kv("scenario.bs_x_m", format_exact(s.bs_x));
    kv("scenario.bs_y_m", format_exact(s.bs_y));
    kv("scenario.center_x_m", format_exact(s.center_x));
    kv("scenario.center_y_m", format_exact(s.center_y));
    kv("scenario.radius_m", format_exact(s.radius));
    kv("scenario.omega_rad_s", format_exact(s.omega));
    kv("scenario.speed_kmph", format_exact(s.speed_kmph));
    kv("scenario.carrier_freq_hz", format_exact(s.resolved_carrier()));
    kv("scenario.num_instants", std::to_string(s.num_instants));
    kv("scenario.trials", std::to_string(s.trials));
    kv("scenario.master_seed", std::to_string(s.master_seed));
    kv("scenario.kappa_list", join_d(s.kappa_list));
    kv("scenario.snr_db_list", join_d(s.snr_db_list));
    {
        std::string fams;
        for (size_t i = 0; i < s.pilots.size(); ++i) {
            if (i) fams += ',';
            fams += to_string(s.pilots[i]);
        }
        kv("scenario.pilots", fams);
    }
    kv("scenario.snapped_truth", s.snapped_truth ? "true" : "false");
    kv("scenario.threads", std::to_string(s.threads));
    return out;
}

}  // namespace tfzc
