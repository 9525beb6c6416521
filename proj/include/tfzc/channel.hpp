// Rician delay-Doppler channel: a deterministic LoS tap snapped to the grid
// plus Rayleigh NLoS taps shaped by an exponential power-delay profile, and
// the noisy application of the channel to a pilot via twisted convolution.

#pragma once

#include <cmath>
#include <stdexcept>

#include "tfzc/grid.hpp"
#include "tfzc/rng.hpp"
#include "tfzc/sigops.hpp"

namespace tfzc {

struct DDChannelConfig {
    int delay_bins = 100;         // delays 0..K-1, step t_step seconds
    int doppler_bins = 150;       // signed range [-L, L] (or [0, L] one-sided)
    bool one_sided_doppler = false;
    double t_step = 0.5e-6;       // T, seconds per delay bin
    double delta_f = 10.0;        // Hz per Doppler bin
    double tau_los = 0.0;         // seconds
    double nu_los = 0.0;          // Hz
    double kappa = 1.0;           // in [0, 1]; sqrt(K/(K+1)) of the Rician K-factor
    double beta = 0.0;            // PDP decay rate, 1/seconds
    bool normalize_nlos = true;   // scale NLoS so its expected total power is 1
    PhaseCoupling alpha;          // twisted-convolution phase coupling

    IndexRange doppler_range() const {
        return one_sided_doppler ? IndexRange{0, doppler_bins}
                                 : IndexRange{-doppler_bins, doppler_bins};
    }
    IndexRange delay_range() const { return {0, delay_bins - 1}; }

    void validate() const {
        if (delay_bins < 1 || doppler_bins < 0)
            throw std::invalid_argument("channel: grid dimensions must be positive");
        if (t_step <= 0.0 || delta_f <= 0.0)
            throw std::invalid_argument("channel: bin sizes must be positive");
        if (tau_los < 0.0 || tau_los > (delay_bins - 1) * t_step)
            throw std::invalid_argument("channel: tau_los outside [0, (K-1)T]");
        if (std::abs(nu_los) > doppler_bins * delta_f)
            throw std::invalid_argument("channel: |nu_los| exceeds the Doppler extent");
        if (kappa < 0.0 || kappa > 1.0)
            throw std::invalid_argument("channel: kappa must be in [0, 1]");
        if (beta < 0.0) throw std::invalid_argument("channel: beta must be nonnegative");
    }

};

struct DDChannel {
    ComplexGrid grid;
    GridIndex los_index;
    DDChannelConfig config;
};

/// Exponential power-delay profile: 0 before the LoS delay, exp(-beta*tau) after.
inline double pdp(double tau, double tau_los, double beta) {
    if (beta < 0.0) throw std::invalid_argument("pdp: beta must be nonnegative");
    return tau < tau_los ? 0.0 : std::exp(-beta * tau);
}

/// Nearest bin index with half-bin ties resolved toward zero.
inline int snap_to_bin(double value, double step) {
    const double r = value / step;
    const double f = std::floor(r);
    const double frac = r - f;
    if (frac > 0.5) return static_cast<int>(f) + 1;
    if (frac < 0.5) return static_cast<int>(f);
    const int lo = static_cast<int>(f);
    return std::abs(lo) <= std::abs(lo + 1) ? lo : lo + 1;
}

/// Draw H = kappa*H_los + sqrt(1-kappa^2)*H_nlos.
///
/// The LoS tap sits at the grid cell nearest (nu_los/delta_f, tau_los/T) with
/// the PDP value at the snapped delay; the snapped delay also anchors the PDP
/// cutoff, so taps strictly before the LoS bin are zero for every seed. The
/// NLoS draw at the LoS cell is zeroed (the LoS tap is deterministic).
inline DDChannel sample_channel(const DDChannelConfig& cfg, Rng& rng) {
    cfg.validate();
    const GridIndex los{snap_to_bin(cfg.nu_los, cfg.delta_f), snap_to_bin(cfg.tau_los, cfg.t_step)};
    ComplexGrid h(cfg.doppler_range(), cfg.delay_range(), cfg.delta_f, cfg.t_step);
    if (!h.rows().contains(los.row) || !h.cols().contains(los.col))
        throw std::invalid_argument("channel: snapped LoS index outside the grid");

    const double los_amp = std::exp(-cfg.beta * (los.col * cfg.t_step));
    const double nlos_weight = std::sqrt(std::max(0.0, 1.0 - cfg.kappa * cfg.kappa));

    // NLoS taps, row-major draw order (part of the reproducibility contract)
    double total_var = 0.0;
    for (int l = h.rows().lo; l <= h.rows().hi; ++l) {
        for (int k = los.col; k <= h.cols().hi; ++k) {
            if (l == los.row && k == los.col) continue;
            const double var = std::exp(-cfg.beta * (k * cfg.t_step));
            h.ref(l, k) = rng.complex_gaussian(var);
            total_var += var;
        }
    }
    if (cfg.normalize_nlos && total_var > 0.0) {
        const double scale = 1.0 / std::sqrt(total_var);
        for (cxd& v : h.raw()) v *= scale;
    }
    for (cxd& v : h.raw()) v *= nlos_weight;
    h.ref(los.row, los.col) = cfg.kappa * los_amp;

    return DDChannel{std::move(h), los, cfg};
}

/// Received signal Y = H *sigma X + W over the full convolution extent.
/// W is i.i.d. complex Gaussian with per-sample variance 1/SNR_linear;
/// snr_db = +infinity disables the noise.
inline ComplexGrid apply_channel(const DDChannel& h, const ComplexGrid& x, double snr_db,
                                 Rng& rng) {
    ComplexGrid y = twisted_conv(h.grid, x, h.config.alpha);
    if (!std::isinf(snr_db)) {
        const double var = std::pow(10.0, -snr_db / 10.0);
        for (cxd& v : y.raw()) v += rng.complex_gaussian(var);
    }
    return y;
}

}  // namespace tfzc
