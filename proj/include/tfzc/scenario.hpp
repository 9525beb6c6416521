// Trajectory geometry, ground-truth delay/Doppler, the NMSE metric, and the
// Monte Carlo sweep over Rician kappa and SNR.
//
// A mobile UE circles inside a 10 km x 10 km area while a fixed BS estimates
// the LoS delay and Doppler at regular instants along the path. Each
// (pilot, kappa, SNR) point runs `trials` seeded trials; trial i uses instant
// i mod num_instants, so NMSE values are comparable across pilot families at
// equal trial counts. Every trial derives its own RNG stream from the master
// seed, which makes the sweep deterministic and order-independent, including
// under the internal thread pool.
//
// SNR reference: the configured SNR is per occupied pilot sample. Pilots are
// unit-energy over M*N cells, so the per-sample noise variance handed to the
// channel is 1/(M*N*SNR_linear); a unit-amplitude-per-sample pilot would see
// exactly 1/SNR_linear. The same reference is used for every family so the
// comparison stays fair.
//
// The 1D ZC baseline is a single-carrier sequence: the channel acts on it as
// integer delays plus per-tap Doppler phase ramps across the samples, and the
// receiver locates the peak of the discrete cross-ambiguity surface over the
// delay grid with Doppler hypotheses spaced at the waveform's resolution
// 1/(L*T). The configured Doppler extent is far finer than that resolution,
// so the baseline cannot separate Doppler shifts and its Doppler NMSE stays
// poor at every kappa, while the 2D pilots sharpen as the LoS strengthens.

#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "tfzc/channel.hpp"
#include "tfzc/estimator.hpp"
#include "tfzc/grid.hpp"
#include "tfzc/grid_io.hpp"
#include "tfzc/rng.hpp"
#include "tfzc/zc.hpp"

namespace tfzc {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Raised when a run violates a numeric contract (e.g. the true delay or
/// Doppler falls outside the configured grid). Mapped to CLI exit code 3.
struct NumericContractError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
    // geometry (meters, rad/s)
    double bs_x = 9500.0;
    double bs_y = 9500.0;
    double center_x = 4000.0;
    double center_y = 4000.0;
    double radius = 3500.0;
    double omega = 0.014;
    double speed_kmph = 200.0;    // used only to derive the default carrier
    double carrier_freq = 0.0;    // Hz; 0 selects the derived default
    int num_instants = 36;

    // delay-Doppler grid and channel
    int delay_bins = 100;
    int doppler_bins = 150;
    double t_step = 0.5e-6;
    double delta_f = 10.0;
    double beta = 1.0e4;
    bool normalize_nlos = true;
    bool one_sided_doppler = false;
    double alpha = -1.0;          // < 0 selects delta_f * t_step

    // pilot dimensions
    int pilot_m = 23;
    int pilot_n = 17;
    int root_f = 1;
    int root_t = 1;
    int zc1d_root = 1;
    int zc1d_length = 0;          // 0 selects the largest valid odd L <= M*N
    std::vector<int> stacked_roots;  // empty selects default_roots(M, N)

    // sweep
    std::vector<PilotFamily> pilots = {PilotFamily::separable, PilotFamily::stacked,
                                       PilotFamily::zc1d};
    std::vector<double> kappa_list = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<double> snr_db_list = {-5.0, 0.0, 5.0};
    int trials = 100;
    uint64_t master_seed = 42;
    bool snapped_truth = false;   // use grid-snapped truth in the NMSE
    int threads = 0;              // 0 selects hardware concurrency

    double resolved_alpha() const { return alpha < 0.0 ? delta_f * t_step : alpha; }

    double resolved_carrier() const {
        if (carrier_freq > 0.0) return carrier_freq;
        const double v = speed_kmph / 3.6;
        return (doppler_bins * delta_f) * kSpeedOfLight / v;
    }

    double period() const { return 2.0 * M_PI / omega; }
    double instant_time(int i) const { return period() * i / num_instants; }

    void validate() const {
        if (radius <= 0.0 || omega == 0.0)
            throw std::invalid_argument("scenario: degenerate trajectory");
        if (num_instants < 1 || trials < 1)
            throw std::invalid_argument("scenario: need at least one instant and one trial");
        if (pilot_m < 1 || pilot_n < 1)
            throw std::invalid_argument("scenario: pilot dimensions must be positive");
        if (kappa_list.empty() || snr_db_list.empty() || pilots.empty())
            throw std::invalid_argument("scenario: empty sweep axis");
    }
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// UE position on the circle at time t.
inline Vec2 ue_position(double t, const ScenarioConfig& cfg) {
    return {cfg.center_x + cfg.radius * std::cos(cfg.omega * t),
            cfg.center_y + cfg.radius * std::sin(cfg.omega * t)};
}

/// Ground-truth LoS delay (s) and Doppler (Hz, positive when approaching)
/// from the analytic circular trajectory.
inline std::pair<double, double> true_delay_doppler(double t, const ScenarioConfig& cfg) {
    const Vec2 p = ue_position(t, cfg);
    const double dx = p.x - cfg.bs_x;
    const double dy = p.y - cfg.bs_y;
    const double dist = std::hypot(dx, dy);
    // velocity of the circular motion
    const double vx = -cfg.radius * cfg.omega * std::sin(cfg.omega * t);
    const double vy = cfg.radius * cfg.omega * std::cos(cfg.omega * t);
    const double range_rate = (dx * vx + dy * vy) / dist;
    const double fc = cfg.resolved_carrier();
    return {dist / kSpeedOfLight, -(fc / kSpeedOfLight) * range_rate};
}

/// Normalized mean squared error: sum |t_i - e_i|^2 / sum |t_i|^2.
inline double nmse(const std::vector<double>& truth, const std::vector<double>& est) {
    if (truth.size() != est.size()) throw std::invalid_argument("nmse: length mismatch");
    double num = 0.0, num_c = 0.0, den = 0.0, den_c = 0.0;
    auto kahan_add = [](double& sum, double& comp, double v) {
        double y = v - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    };
    for (size_t i = 0; i < truth.size(); ++i) {
        const double d = truth[i] - est[i];
        kahan_add(num, num_c, d * d);
        kahan_add(den, den_c, truth[i] * truth[i]);
    }
    if (den == 0.0) throw std::invalid_argument("nmse: all-zero truth vector");
    return num / den;
}

struct TrialRecord {
    double tau_true = 0.0;
    double nu_true = 0.0;
    int l_true = 0;   // grid-snapped truth
    int k_true = 0;
    int l_hat = 0;
    int k_hat = 0;
    double tau_hat = 0.0;
    double nu_hat = 0.0;
    bool exact_cell = false;
};

struct SweepRow {
    std::string pilot;
    double kappa = 0.0;
    double snr_db = 0.0;
    int trials = 0;
    double nmse_tau = 0.0;
    double nmse_nu = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
};

namespace detail {

inline DDChannelConfig channel_config(const ScenarioConfig& cfg, double kappa, double tau,
                                      double nu) {
    DDChannelConfig c;
    c.delay_bins = cfg.delay_bins;
    c.doppler_bins = cfg.doppler_bins;
    c.one_sided_doppler = cfg.one_sided_doppler;
    c.t_step = cfg.t_step;
    c.delta_f = cfg.delta_f;
    c.tau_los = tau;
    c.nu_los = nu;
    c.kappa = kappa;
    c.beta = cfg.beta;
    c.normalize_nlos = cfg.normalize_nlos;
    c.alpha = PhaseCoupling{cfg.resolved_alpha()};
    return c;
}

inline PilotSpec pilot_spec(const ScenarioConfig& cfg, PilotFamily family) {
    PilotSpec spec;
    spec.family = family;
    spec.M = cfg.pilot_m;
    spec.N = cfg.pilot_n;
    spec.r_f = cfg.root_f;
    spec.r_t = cfg.root_t;
    spec.r = cfg.zc1d_root;
    spec.roots = cfg.stacked_roots;
    if (family == PilotFamily::zc1d)
        spec.L = cfg.zc1d_length > 0 ? cfg.zc1d_length
                                     : default_zc1d_length(cfg.pilot_m, cfg.pilot_n, cfg.zc1d_root);
    return spec;
}

/// Per-sample noise variance for a configured SNR (per occupied pilot sample;
/// pilots are unit energy over M*N cells).
inline double noise_variance(const ScenarioConfig& cfg, double snr_db) {
    if (std::isinf(snr_db)) return 0.0;
    return std::pow(10.0, -snr_db / 10.0) / (static_cast<double>(cfg.pilot_m) * cfg.pilot_n);
}

inline double effective_snr_db(const ScenarioConfig& cfg, double snr_db) {
    if (std::isinf(snr_db)) return snr_db;
    return snr_db + 10.0 * std::log10(static_cast<double>(cfg.pilot_m) * cfg.pilot_n);
}

/// Single-carrier baseline: apply the DD channel to the time-domain sequence
/// (integer delay shift, per-tap Doppler ramp anchored at the tap delay).
inline std::vector<cxd> apply_channel_1d(const DDChannel& h, const std::vector<cxd>& s,
                                         double noise_var, Rng& rng) {
    const int len_s = static_cast<int>(s.size());
    const int len_y = h.config.delay_bins - 1 + len_s;
    std::vector<cxd> y(static_cast<size_t>(len_y));
    const ComplexGrid& grid = h.grid;
    for (int l = grid.rows().lo; l <= grid.rows().hi; ++l) {
        const double step_phase = 2.0 * M_PI * (l * h.config.delta_f) * h.config.t_step;
        const cxd step = std::polar(1.0, step_phase);
        for (int k = grid.cols().lo; k <= grid.cols().hi; ++k) {
            const cxd tap = grid.at(l, k);
            if (tap == cxd{}) continue;
            cxd ramp = 1.0;
            for (int j = 0; j < len_s; ++j) {
                y[static_cast<size_t>(k + j)] += tap * s[static_cast<size_t>(j)] * ramp;
                ramp *= step;
            }
        }
    }
    if (noise_var > 0.0)
        for (cxd& v : y) v += rng.complex_gaussian(noise_var);
    return y;
}

/// Cross-ambiguity receiver for the baseline: peak of |A| over the DD grid.
/// Doppler hypotheses are spaced at the waveform's own resolution 1/(L*T),
/// the classical filter-bank spacing; the desk and paper grids fit inside a
/// single resolution cell, so the baseline effectively tests l = 0 only and
/// contributes no Doppler refinement.
inline Peak caf_peak_1d(const std::vector<cxd>& y, const std::vector<cxd>& s,
                        const ScenarioConfig& cfg) {
    std::vector<cxd> s_padded(s);
    s_padded.resize(y.size());
    const IndexRange l_range = cfg.one_sided_doppler ? IndexRange{0, cfg.doppler_bins}
                                                     : IndexRange{-cfg.doppler_bins, cfg.doppler_bins};
    const double resolution_hz = 1.0 / (static_cast<double>(s.size()) * cfg.t_step);
    const int l_step = std::max(1, static_cast<int>(std::llround(resolution_hz / cfg.delta_f)));
    std::vector<int> hypotheses;
    for (int l = 0; l <= l_range.hi; l += l_step) hypotheses.push_back(l);
    for (int l = -l_step; l >= l_range.lo; l -= l_step) hypotheses.push_back(l);
    // A[l, -k] correlates y against s delayed by k; remap to delay-indexed
    ComplexGrid c(l_range, {0, cfg.delay_bins - 1}, cfg.delta_f, cfg.t_step);
    for (int l : hypotheses) {
        const ComplexGrid a = discrete_caf(y, s_padded, {l, l}, cfg.delta_f, cfg.t_step);
        for (int k = 0; k < cfg.delay_bins; ++k) c.ref(l, k) = a.at(l, -k);
    }
    return peak_search(c, l_range, {0, cfg.delay_bins - 1});
}

}  // namespace detail

/// Check that every instant's true delay/Doppler lies inside the grid.
inline void validate_truth_in_grid(const ScenarioConfig& cfg) {
    for (int i = 0; i < cfg.num_instants; ++i) {
        auto [tau, nu] = true_delay_doppler(cfg.instant_time(i), cfg);
        if (tau < 0.0 || tau > (cfg.delay_bins - 1) * cfg.t_step)
            throw NumericContractError("true delay outside the delay grid at instant " +
                                       std::to_string(i));
        if (std::abs(nu) > cfg.doppler_bins * cfg.delta_f ||
            (cfg.one_sided_doppler && nu < 0.0))
            throw NumericContractError("true Doppler outside the Doppler grid at instant " +
                                       std::to_string(i));
    }
}

/// Run all trials of one (pilot, kappa, SNR) point; point_id feeds the
/// per-trial stream derivation and must be unique per point.
inline std::vector<TrialRecord> run_point(const ScenarioConfig& cfg, PilotFamily family,
                                          double kappa, double snr_db, uint64_t point_id) {
    cfg.validate();
    validate_truth_in_grid(cfg);

    const PhaseCoupling pc{cfg.resolved_alpha()};
    const PilotSpec spec = detail::pilot_spec(cfg, family);
    const ComplexGrid pilot = make_pilot(spec, cfg.delta_f, cfg.t_step);
    std::vector<cxd> seq;
    if (family == PilotFamily::zc1d) seq = zc_sequence(spec.L, spec.r);

    const IndexRange search_rows = cfg.one_sided_doppler
                                       ? IndexRange{0, cfg.doppler_bins}
                                       : IndexRange{-cfg.doppler_bins, cfg.doppler_bins};
    const IndexRange search_cols{0, cfg.delay_bins - 1};

    std::vector<TrialRecord> records(static_cast<size_t>(cfg.trials));
    for (int trial = 0; trial < cfg.trials; ++trial) {
        const double t = cfg.instant_time(trial % cfg.num_instants);
        auto [tau, nu] = true_delay_doppler(t, cfg);
        Rng rng(derive_seed(cfg.master_seed, point_id, static_cast<uint64_t>(trial)));
        const DDChannelConfig ch_cfg = detail::channel_config(cfg, kappa, tau, nu);
        const DDChannel h = sample_channel(ch_cfg, rng);

        TrialRecord rec;
        rec.tau_true = tau;
        rec.nu_true = nu;
        rec.l_true = h.los_index.row;
        rec.k_true = h.los_index.col;

        if (family == PilotFamily::zc1d) {
            const auto y = detail::apply_channel_1d(h, seq, detail::noise_variance(cfg, snr_db),
                                                    rng);
            const Peak p = detail::caf_peak_1d(y, seq, cfg);
            rec.l_hat = p.row;
            rec.k_hat = p.col;
        } else {
            const ComplexGrid y =
                apply_channel(h, pilot, detail::effective_snr_db(cfg, snr_db), rng);
            const EstimationResult est =
                estimate_dd(y, pilot, pc, search_rows, search_cols, cfg.delta_f, cfg.t_step);
            rec.l_hat = est.l_hat;
            rec.k_hat = est.k_hat;
        }
        rec.nu_hat = rec.l_hat * cfg.delta_f;
        rec.tau_hat = rec.k_hat * cfg.t_step;
        rec.exact_cell = (rec.l_hat == rec.l_true && rec.k_hat == rec.k_true);
        records[static_cast<size_t>(trial)] = rec;
    }
    return records;
}

/// NMSE pair (tau, nu) over a point's trial records.
inline std::pair<double, double> point_nmse(const std::vector<TrialRecord>& records,
                                            bool snapped_truth, double delta_f, double t_step) {
    std::vector<double> tau_t, tau_e, nu_t, nu_e;
    tau_t.reserve(records.size());
    tau_e.reserve(records.size());
    nu_t.reserve(records.size());
    nu_e.reserve(records.size());
    for (const TrialRecord& r : records) {
        tau_t.push_back(snapped_truth ? r.k_true * t_step : r.tau_true);
        nu_t.push_back(snapped_truth ? r.l_true * delta_f : r.nu_true);
        tau_e.push_back(r.tau_hat);
        nu_e.push_back(r.nu_hat);
    }
    return {nmse(tau_t, tau_e), nmse(nu_t, nu_e)};
}

/// Full sweep over (pilot, kappa, SNR). Points are independent and run on a
/// small thread pool; each point's trials run sequentially in trial order, so
/// the result is bit-identical regardless of scheduling.
inline SweepResult run_sweep(const ScenarioConfig& cfg) {
    cfg.validate();
    validate_truth_in_grid(cfg);

    struct Point {
        PilotFamily family;
        double kappa;
        double snr_db;
        uint64_t id;
    };
    std::vector<Point> points;
    uint64_t id = 0;
    for (PilotFamily family : cfg.pilots)
        for (double kappa : cfg.kappa_list)
            for (double snr : cfg.snr_db_list) points.push_back({family, kappa, snr, id++});

    SweepResult result;
    result.rows.resize(points.size());
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        try {
            for (size_t i = next.fetch_add(1); i < points.size(); i = next.fetch_add(1)) {
                const Point& p = points[i];
                const auto records = run_point(cfg, p.family, p.kappa, p.snr_db, p.id);
                const auto [ntau, nnu] =
                    point_nmse(records, cfg.snapped_truth, cfg.delta_f, cfg.t_step);
                result.rows[i] = {to_string(p.family), p.kappa, p.snr_db, cfg.trials, ntau, nnu};
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };
    unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                         : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(points.size()));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return result;
}

/// CSV serialization: header plus one row per (pilot, kappa, SNR) point,
/// 9 significant digits.
inline std::string sweep_csv(const SweepResult& result) {
    std::string out = "pilot,kappa,snr_db,trials,nmse_tau,nmse_nu\n";
    for (const SweepRow& row : result.rows) {
        out += row.pilot;
        out += ',' + format_sig9(row.kappa);
        out += ',' + format_sig9(row.snr_db);
        out += ',' + std::to_string(row.trials);
        out += ',' + format_sig9(row.nmse_tau);
        out += ',' + format_sig9(row.nmse_nu);
        out += '\n';
    }
    return out;
}

}  // namespace tfzc
