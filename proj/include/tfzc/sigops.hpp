// Correlation, ambiguity, and convolution machinery.
//
// Conventions used throughout:
//  - Correlation and CAF outputs are normalized by sqrt(Ex*Ey), so a
//    self-correlation at zero lag is exactly 1 and thresholds stay scale-free.
//  - Aperiodic reads zero-pad; only periodic_xcorr wraps.
//  - The twisted-convolution phase coupling is exp(j*2*pi*alpha*(m-l)*k)
//    where (m-l) indexes the second operand's rows and k the first operand's
//    columns. alpha = delta_f * delta_t recovers the physical
//    frequency-times-delay phase product; alpha = 0 reduces the operation to
//    plain 2D convolution exactly.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "tfzc/grid.hpp"

namespace tfzc {

/// Coefficient of the delay-Doppler phase coupling in twisted convolutions.
struct PhaseCoupling {
    double alpha = 0.0;

    static PhaseCoupling from_grid(double delta_f, double delta_t) {
        return {delta_f * delta_t};
    }
};

namespace detail {

inline double norm_product(const std::vector<cxd>& x, const std::vector<cxd>& y) {
    double ex = 0.0, ey = 0.0;
    for (const cxd& v : x) ex += std::norm(v);
    for (const cxd& v : y) ey += std::norm(v);
    double e = std::sqrt(ex * ey);
    return e > 0.0 ? e : 1.0;
}

}  // namespace detail

/// Periodic cross-correlation R[k] = (1/E) * sum_n y[n] x*[(n+k) mod L],
/// k = 0..L-1, E = sqrt(Ex*Ey). Self-correlation at lag 0 is exactly 1.
inline std::vector<cxd> periodic_xcorr(const std::vector<cxd>& x, const std::vector<cxd>& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("periodic_xcorr: length mismatch");
    const int L = static_cast<int>(x.size());
    const double e = detail::norm_product(x, y);
    std::vector<cxd> r(static_cast<size_t>(L));
    for (int k = 0; k < L; ++k) {
        cxd acc = 0.0;
        for (int n = 0; n < L; ++n)
            acc += y[static_cast<size_t>(n)] * std::conj(x[static_cast<size_t>((n + k) % L)]);
        r[static_cast<size_t>(k)] = acc / e;
    }
    return r;
}

/// Aperiodic correlation over lags -(L-1)..(L-1) with zero-padded reads.
struct LagSeries {
    int lag_lo = 0;
    std::vector<cxd> values;

    int lag_hi() const { return lag_lo + static_cast<int>(values.size()) - 1; }
    cxd at(int lag) const {
        int i = lag - lag_lo;
        if (i < 0 || i >= static_cast<int>(values.size())) return {0.0, 0.0};
        return values[static_cast<size_t>(i)];
    }
};

/// Linear (aperiodic) cross-correlation R[k] = (1/E) * sum_n x[n] y*[n+k];
/// the l = 0 row of the CAF. Inputs of unequal length are zero-padded.
inline LagSeries linear_xcorr(std::vector<cxd> x, std::vector<cxd> y) {
    const size_t L = std::max(x.size(), y.size());
    x.resize(L);
    y.resize(L);
    const int n_max = static_cast<int>(L);
    const double e = detail::norm_product(x, y);
    LagSeries out;
    out.lag_lo = -(n_max - 1);
    out.values.assign(static_cast<size_t>(2 * n_max - 1), cxd{});
    for (int k = out.lag_lo; k <= n_max - 1; ++k) {
        cxd acc = 0.0;
        const int n_lo = std::max(0, -k);
        const int n_hi = std::min(n_max - 1, n_max - 1 - k);
        for (int n = n_lo; n <= n_hi; ++n)
            acc += x[static_cast<size_t>(n)] * std::conj(y[static_cast<size_t>(n + k)]);
        out.values[static_cast<size_t>(k - out.lag_lo)] = acc / e;
    }
    return out;
}

/// Discrete cross-ambiguity function over Doppler rows l_range and delay lags
/// -(L-1)..(L-1):
///   A[l,k] = (1/E) * sum_{n=0}^{L-1} x[n] y*[n+k] exp(-j2pi (l*doppler_step)(n*t_step))
/// y is read with zero padding (aperiodic; no cyclic prefix).
inline ComplexGrid discrete_caf(const std::vector<cxd>& x, const std::vector<cxd>& y,
                                IndexRange l_range, double doppler_step_hz, double t_step_s) {
    if (x.size() != y.size())
        throw std::invalid_argument("discrete_caf: length mismatch");
    const int L = static_cast<int>(x.size());
    const double e = detail::norm_product(x, y);
    ComplexGrid out(l_range, {-(L - 1), L - 1}, doppler_step_hz, t_step_s);
    std::vector<cxd> xw(static_cast<size_t>(L));
    for (int l = l_range.lo; l <= l_range.hi; ++l) {
        const double omega = -2.0 * M_PI * (l * doppler_step_hz) * t_step_s;
        for (int n = 0; n < L; ++n)
            xw[static_cast<size_t>(n)] = x[static_cast<size_t>(n)] * std::polar(1.0, omega * n);
        for (int k = -(L - 1); k <= L - 1; ++k) {
            cxd acc = 0.0;
            const int n_lo = std::max(0, -k);
            const int n_hi = std::min(L - 1, L - 1 - k);
            for (int n = n_lo; n <= n_hi; ++n)
                acc += xw[static_cast<size_t>(n)] * std::conj(y[static_cast<size_t>(n + k)]);
            out.ref(l, k) = acc / e;
        }
    }
    return out;
}

/// Full 2D linear convolution; output ranges are the Minkowski sums.
inline ComplexGrid conv2d(const ComplexGrid& x, const ComplexGrid& y) {
    ComplexGrid out(x.rows().plus(y.rows()), x.cols().plus(y.cols()), x.delta_f(), x.delta_t());
    for (int lx = x.rows().lo; lx <= x.rows().hi; ++lx) {
        for (int kx = x.cols().lo; kx <= x.cols().hi; ++kx) {
            const cxd v = x.at(lx, kx);
            if (v == cxd{}) continue;
            for (int ly = y.rows().lo; ly <= y.rows().hi; ++ly)
                for (int ky = y.cols().lo; ky <= y.cols().hi; ++ky)
                    out.ref(lx + ly, kx + ky) += v * y.at(ly, ky);
        }
    }
    return out;
}

/// Twisted convolution
///   z[m,n] = sum_{l,k} x[l,k] y[m-l,n-k] exp(j2pi alpha (m-l) k).
/// Non-commutative and non-associative for alpha != 0; the delta at the
/// origin is a two-sided identity.
inline ComplexGrid twisted_conv(const ComplexGrid& x, const ComplexGrid& y,
                                const PhaseCoupling& pc) {
    ComplexGrid out(x.rows().plus(y.rows()), x.cols().plus(y.cols()), x.delta_f(), x.delta_t());
    // phase depends only on (y row, x col); table once per call
    const int ny_rows = y.rows().size();
    const int nx_cols = x.cols().size();
    std::vector<cxd> phase(static_cast<size_t>(ny_rows) * static_cast<size_t>(nx_cols));
    for (int iy = 0; iy < ny_rows; ++iy)
        for (int ix = 0; ix < nx_cols; ++ix)
            phase[static_cast<size_t>(iy) * nx_cols + ix] = std::polar(
                1.0, 2.0 * M_PI * pc.alpha * static_cast<double>(y.rows().lo + iy) *
                         static_cast<double>(x.cols().lo + ix));
    for (int lx = x.rows().lo; lx <= x.rows().hi; ++lx) {
        for (int kx = x.cols().lo; kx <= x.cols().hi; ++kx) {
            const cxd v = x.at(lx, kx);
            if (v == cxd{}) continue;
            const int ix = kx - x.cols().lo;
            for (int ly = y.rows().lo; ly <= y.rows().hi; ++ly) {
                const cxd w = v * phase[static_cast<size_t>(ly - y.rows().lo) * nx_cols + ix];
                for (int ky = y.cols().lo; ky <= y.cols().hi; ++ky)
                    out.ref(lx + ly, kx + ky) += w * y.at(ly, ky);
            }
        }
    }
    return out;
}

/// Twisted matched filter Gamma[l,k] = X*[-l,-k] exp(j2pi alpha l k);
/// its support is the negation of X's support.
inline ComplexGrid matched_filter_gamma(const ComplexGrid& x, const PhaseCoupling& pc) {
    ComplexGrid out(x.rows().negated(), x.cols().negated(), x.delta_f(), x.delta_t());
    for (int l = out.rows().lo; l <= out.rows().hi; ++l)
        for (int k = out.cols().lo; k <= out.cols().hi; ++k)
            out.ref(l, k) = std::conj(x.at(-l, -k)) *
                            std::polar(1.0, 2.0 * M_PI * pc.alpha * static_cast<double>(l) *
                                                static_cast<double>(k));
    return out;
}

/// Matched-filter self-response of a pilot: x twisted with its own Gamma.
/// Peaks at the origin with value energy(x).
inline ComplexGrid twisted_acf(const ComplexGrid& x, const PhaseCoupling& pc) {
    return twisted_conv(x, matched_filter_gamma(x, pc), pc);
}

/// Closed-form magnitude of the windowed ZC autocorrelation at lag u over a
/// window of w samples: |sin(pi/N w (-r u)_N)| / sin(pi/N (-r u)_N), with the
/// limit value w when (-r u) = 0 mod N. Diagnostic companion to the
/// brute-force windowed correlation, which is authoritative.
inline double zc_acf_closed_form(int u, int w, int N, int r) {
    if (N <= 0 || N % 2 == 0) throw std::invalid_argument("zc_acf_closed_form: N must be odd");
    if (std::gcd(r, N) != 1)
        throw std::invalid_argument("zc_acf_closed_form: root must be coprime to N");
    if (w < 0 || w > N) throw std::invalid_argument("zc_acf_closed_form: need 0 <= w <= N");
    long long m = (-static_cast<long long>(r) * u) % N;
    if (m < 0) m += N;
    if (m == 0) return static_cast<double>(w);
    const double arg = M_PI * static_cast<double>(m) / N;
    return std::abs(std::sin(arg * w)) / std::sin(arg);
}

}  // namespace tfzc
