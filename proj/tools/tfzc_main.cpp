// tfzc command-line simulator.
//
// Subcommands: gen-pilot, acf, caf, dump-channel, estimate, sweep.
// Configuration comes from (in order of precedence) built-in defaults, a
// preset, a config file, then explicit flags. Exit codes: 0 success,
// 2 configuration error, 3 numerical contract violation.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "tfzc/channel.hpp"
#include "tfzc/config.hpp"
#include "tfzc/estimator.hpp"
#include "tfzc/grid_io.hpp"
#include "tfzc/scenario.hpp"
#include "tfzc/sigops.hpp"
#include "tfzc/zc.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string preset;
    std::string echo_path;
    std::vector<std::string> sets;  // raw key=value overrides
    std::string seed;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "config file (key=value lines)");
    cmd->add_option("--preset", opts.preset, "parameter preset: desk or paper");
    cmd->add_option("--seed", opts.seed, "master seed (overrides scenario.master_seed)");
    cmd->add_option("--set", opts.sets, "explicit config override, key=value (repeatable)");
    cmd->add_option("--echo-config", opts.echo_path,
                    "write the fully resolved config to this path ('-' for stdout)");
}

// flag -> config key bindings collected then applied in a fixed order
struct Binding {
    std::string key;
    std::string value;
    bool set = false;
};

tfzc::RunConfig build_config(const CommonOpts& opts, const std::vector<Binding>& bindings) {
    tfzc::RunConfig rc;
    if (!opts.preset.empty()) rc.apply_preset(opts.preset);
    if (!opts.config_path.empty()) rc.load_file(opts.config_path);
    for (const std::string& kv : opts.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw tfzc::ConfigError("--set expects key=value, got '" + kv + "'");
        rc.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (const Binding& b : bindings)
        if (b.set) rc.set(b.key, b.value);
    if (!opts.seed.empty()) rc.set("scenario.master_seed", opts.seed);
    return rc;
}

void maybe_echo(const tfzc::ResolvedConfig& resolved, const CommonOpts& opts) {
    if (opts.echo_path.empty()) return;
    if (opts.echo_path == "-")
        std::cout << resolved.echo();
    else
        tfzc::write_text_atomic(opts.echo_path, resolved.echo());
}

int run_cli(int argc, char** argv) {
    CLI::App app{"time-frequency ZC pilots and LoS delay-Doppler estimation"};
    app.require_subcommand(1);

    // ---- gen-pilot -------------------------------------------------------
    auto* gen = app.add_subcommand("gen-pilot", "generate a pilot grid and dump it");
    CommonOpts gen_opts;
    add_common(gen, gen_opts);
    std::string gen_out = "pilot.grid";
    gen->add_option("--out", gen_out, "output grid dump path");
    std::vector<Binding> gen_bind(8);
    auto bind_opt = [](CLI::App* cmd, const char* flag, const char* key, Binding& b,
                       const char* help) {
        cmd->add_option_function<std::string>(
               flag,
               [&b, key](const std::string& v) {
                   b = {key, v, true};
               },
               help);
    };
    bind_opt(gen, "--family", "pilot.family", gen_bind[0],
             "zc1d | separable | stacked | stacked_t");
    bind_opt(gen, "--m", "pilot.m", gen_bind[1], "frequency rows");
    bind_opt(gen, "--n", "pilot.n", gen_bind[2], "time columns");
    bind_opt(gen, "--l", "pilot.l", gen_bind[3], "zc1d length");
    bind_opt(gen, "--r", "pilot.r", gen_bind[4], "zc1d root");
    bind_opt(gen, "--r-f", "pilot.r_f", gen_bind[5], "separable frequency root");
    bind_opt(gen, "--r-t", "pilot.r_t", gen_bind[6], "separable time root");
    bind_opt(gen, "--roots", "pilot.roots", gen_bind[7], "stacked roots, comma separated");
    gen->callback([&]() {
        auto resolved = build_config(gen_opts, gen_bind).resolve();
        const tfzc::ScenarioConfig& s = resolved.scenario;
        const tfzc::ComplexGrid pilot = tfzc::make_pilot(resolved.pilot, s.delta_f, s.t_step);
        tfzc::write_grid_dump(pilot, gen_out);
        maybe_echo(resolved, gen_opts);
        if (resolved.pilot.family == tfzc::PilotFamily::stacked ||
            resolved.pilot.family == tfzc::PilotFamily::stacked_transposed) {
            std::string roots = "roots=";
            for (size_t i = 0; i < resolved.pilot.roots.size(); ++i) {
                if (i) roots += ',';
                roots += std::to_string(resolved.pilot.roots[i]);
            }
            std::cout << roots << "\n";
        }
        std::printf("%.9f\n", tfzc::energy(pilot));
    });

    // ---- acf / caf -------------------------------------------------------
    auto add_surface_cmd = [&](const char* name, const char* help, bool default_caf) {
        auto* cmd = app.add_subcommand(name, help);
        auto opts = std::make_shared<CommonOpts>();
        add_common(cmd, *opts);
        auto out = std::make_shared<std::string>(std::string(name) + ".grid");
        auto xyz = std::make_shared<std::string>();
        auto twisted = std::make_shared<bool>(false);
        auto want_caf = std::make_shared<bool>(default_caf);
        auto bind = std::make_shared<std::vector<Binding>>(13);
        cmd->add_option("--out", *out, "output grid dump path (triplets go to <out>.xyz)");
        cmd->add_option("--xyz", *xyz, "triplet output path (default <out>.xyz)");
        cmd->add_flag("--twisted", *twisted, "twisted ACF instead of the 2D linear ACF");
        if (!default_caf)
            cmd->add_flag("--caf", *want_caf, "ambiguity surface (zc1d pilots only)");
        bind_opt(cmd, "--family", "pilot.family", (*bind)[0], "pilot family");
        bind_opt(cmd, "--m", "pilot.m", (*bind)[1], "frequency rows");
        bind_opt(cmd, "--n", "pilot.n", (*bind)[2], "time columns");
        bind_opt(cmd, "--l", "pilot.l", (*bind)[3], "zc1d length");
        bind_opt(cmd, "--r", "pilot.r", (*bind)[4], "zc1d root");
        bind_opt(cmd, "--r-f", "pilot.r_f", (*bind)[5], "separable frequency root");
        bind_opt(cmd, "--r-t", "pilot.r_t", (*bind)[6], "separable time root");
        bind_opt(cmd, "--roots", "pilot.roots", (*bind)[7], "stacked roots");
        bind_opt(cmd, "--alpha", "channel.alpha", (*bind)[8], "phase coupling coefficient");
        bind_opt(cmd, "--delta-f", "grid.delta_f_hz", (*bind)[9], "Doppler bin size, Hz");
        bind_opt(cmd, "--t-step", "grid.t_step_s", (*bind)[10], "delay bin size, s");
        bind_opt(cmd, "--doppler-bins", "grid.doppler_bins", (*bind)[11], "Doppler bins");
        bind_opt(cmd, "--delay-bins", "grid.delay_bins", (*bind)[12], "delay bins");
        cmd->callback([opts, out, xyz, twisted, want_caf, bind, default_caf]() {
            auto resolved = build_config(*opts, *bind).resolve();
            const tfzc::ScenarioConfig& s = resolved.scenario;
            tfzc::ComplexGrid surface;
            if (*want_caf || default_caf) {
                if (resolved.pilot.family != tfzc::PilotFamily::zc1d)
                    throw tfzc::ConfigError("the ambiguity surface is defined for --family zc1d");
                const auto seq = tfzc::zc_sequence(resolved.pilot.L, resolved.pilot.r);
                surface = tfzc::discrete_caf(seq, seq,
                                             {-s.doppler_bins, s.doppler_bins}, s.delta_f,
                                             s.t_step);
            } else {
                const tfzc::ComplexGrid pilot =
                    tfzc::make_pilot(resolved.pilot, s.delta_f, s.t_step);
                const tfzc::PhaseCoupling pc{*twisted ? s.resolved_alpha() : 0.0};
                surface = tfzc::twisted_acf(pilot, pc);
            }
            tfzc::write_grid_dump(surface, *out);
            tfzc::write_grid_xyz(surface, xyz->empty() ? *out + ".xyz" : *xyz);
            maybe_echo(resolved, *opts);
        });
    };
    add_surface_cmd("acf", "2D linear or twisted autocorrelation surface of a pilot", false);
    add_surface_cmd("caf", "discrete ambiguity surface of a 1D ZC pilot", true);

    // ---- dump-channel ----------------------------------------------------
    auto* dump = app.add_subcommand("dump-channel", "sample a DD channel and dump its grid");
    CommonOpts dump_opts;
    add_common(dump, dump_opts);
    std::string dump_out = "channel.grid";
    dump->add_option("--out", dump_out, "output grid dump path");
    std::vector<Binding> dump_bind(9);
    bind_opt(dump, "--kappa", "channel.kappa", dump_bind[0], "Rician kappa in [0,1]");
    bind_opt(dump, "--tau-los", "channel.tau_los_s", dump_bind[1], "LoS delay, s");
    bind_opt(dump, "--nu-los", "channel.nu_los_hz", dump_bind[2], "LoS Doppler, Hz");
    bind_opt(dump, "--beta", "channel.beta", dump_bind[3], "PDP decay rate, 1/s");
    bind_opt(dump, "--normalize-nlos", "channel.normalize_nlos", dump_bind[4], "true/false");
    bind_opt(dump, "--one-sided", "channel.one_sided_doppler", dump_bind[5], "true/false");
    bind_opt(dump, "--delta-f", "grid.delta_f_hz", dump_bind[6], "Doppler bin size, Hz");
    bind_opt(dump, "--t-step", "grid.t_step_s", dump_bind[7], "delay bin size, s");
    bind_opt(dump, "--delay-bins", "grid.delay_bins", dump_bind[8], "delay bins");
    dump->callback([&]() {
        auto resolved = build_config(dump_opts, dump_bind).resolve();
        tfzc::Rng rng(resolved.scenario.master_seed);
        const tfzc::DDChannel h = tfzc::sample_channel(resolved.channel_config(), rng);
        tfzc::write_grid_dump(h.grid, dump_out);
        maybe_echo(resolved, dump_opts);
        std::cout << "los=" << h.los_index.row << "," << h.los_index.col << "\n";
    });

    // ---- estimate --------------------------------------------------------
    auto* est = app.add_subcommand("estimate",
                                   "apply a dumped channel to a dumped pilot and locate the peak");
    CommonOpts est_opts;
    add_common(est, est_opts);
    std::string est_pilot, est_channel;
    double est_snr = std::numeric_limits<double>::infinity();
    double est_alpha = std::nan("");
    est->add_option("--pilot", est_pilot, "pilot grid dump")->required();
    est->add_option("--channel", est_channel, "channel grid dump")->required();
    est->add_option("--snr-db", est_snr, "per-sample SNR in dB (default: noiseless)");
    est->add_option("--alpha", est_alpha, "phase coupling (default: channel delta_f*delta_t)");
    est->callback([&]() {
        auto resolved = build_config(est_opts, {}).resolve();
        const tfzc::ComplexGrid pilot = tfzc::read_grid_dump(est_pilot);
        const tfzc::ComplexGrid hgrid = tfzc::read_grid_dump(est_channel);
        if (pilot.delta_f() != hgrid.delta_f() || pilot.delta_t() != hgrid.delta_t())
            throw tfzc::ConfigError("pilot and channel dumps disagree on delta_f/delta_t");
        const double alpha =
            std::isnan(est_alpha) ? hgrid.delta_f() * hgrid.delta_t() : est_alpha;
        tfzc::DDChannel h;
        h.grid = hgrid;
        h.config.delay_bins = hgrid.cols().hi + 1;
        h.config.doppler_bins = hgrid.rows().hi;
        h.config.one_sided_doppler = hgrid.rows().lo == 0 && hgrid.rows().hi > 0;
        h.config.t_step = hgrid.delta_t();
        h.config.delta_f = hgrid.delta_f();
        h.config.alpha = tfzc::PhaseCoupling{alpha};
        tfzc::Rng rng(resolved.scenario.master_seed);
        const tfzc::ComplexGrid y = tfzc::apply_channel(h, pilot, est_snr, rng);
        const tfzc::EstimationResult r =
            tfzc::estimate_dd(y, pilot, tfzc::PhaseCoupling{alpha}, hgrid.rows(), hgrid.cols(),
                              hgrid.delta_f(), hgrid.delta_t());
        maybe_echo(resolved, est_opts);
        std::cout << r.l_hat << ',' << r.k_hat << ',' << tfzc::format_sig9(r.nu_hat) << ','
                  << tfzc::format_sig9(r.tau_hat) << ','
                  << tfzc::format_sig9(r.peak_magnitude) << "\n";
    });

    // ---- sweep -----------------------------------------------------------
    auto* sweep = app.add_subcommand("sweep", "NMSE sweep over kappa and SNR");
    CommonOpts sweep_opts;
    add_common(sweep, sweep_opts);
    std::string sweep_out = "sweep.csv";
    sweep->add_option("--out", sweep_out, "output CSV path (resolved config goes to <out>.cfg)");
    std::vector<Binding> sweep_bind(4);
    bind_opt(sweep, "--trials", "scenario.trials", sweep_bind[0], "trials per point");
    bind_opt(sweep, "--pilots", "scenario.pilots", sweep_bind[1], "pilot families to sweep");
    bind_opt(sweep, "--kappas", "scenario.kappa_list", sweep_bind[2], "kappa grid");
    bind_opt(sweep, "--snrs", "scenario.snr_db_list", sweep_bind[3], "SNR grid, dB");
    sweep->callback([&]() {
        auto resolved = build_config(sweep_opts, sweep_bind).resolve();
        const tfzc::SweepResult result = tfzc::run_sweep(resolved.scenario);
        tfzc::write_text_atomic(sweep_out, tfzc::sweep_csv(result));
        tfzc::write_text_atomic(sweep_out + ".cfg", resolved.echo());
        maybe_echo(resolved, sweep_opts);
        std::cout << "wrote " << sweep_out << " (" << result.rows.size() << " rows)\n";
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const tfzc::NumericContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const tfzc::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
