// Twisted matched-filter estimation of the LoS delay-Doppler cell, plus the
// slow reference expansion of the filter output and the interference
// diagnostics for separable and stacked pilots.
//
// The filter output is Q = Y *sigma Gamma with Gamma = X*[-l,-k] e^{j2pi a lk}.
// Twisted convolution is neither associative nor commutative, so the operand
// order is fixed exactly as written. For a single channel tap the output
// reproduces the tap value at the tap index for any coupling alpha; dense
// channels add an interference term on top of H.

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tfzc/grid.hpp"
#include "tfzc/sigops.hpp"
#include "tfzc/zc.hpp"

namespace tfzc {

struct EstimationResult {
    int l_hat = 0;               // Doppler index
    int k_hat = 0;               // delay index
    double nu_hat = 0.0;         // l_hat * delta_f, Hz
    double tau_hat = 0.0;        // k_hat * T, seconds
    double peak_magnitude = 0.0;
    std::optional<ComplexGrid> q_grid;
};

/// Q[l,k] = (Y *sigma Gamma)[l,k].
inline ComplexGrid filter_output(const ComplexGrid& y, const ComplexGrid& x,
                                 const PhaseCoupling& pc) {
    return twisted_conv(y, matched_filter_gamma(x, pc), pc);
}

/// Reference evaluation of the filter output by direct expansion of the
/// twisted convolutions:
///   Q[l,k] = sum_{m'',n''} H[m'',n''] e^{j2pi a (lk - m''n'')}
///            sum_{m'} e^{j2pi a m'(n''-k)}
///            sum_{n'} X[m'-m'',n'-n''] X*[m'-l,n'-k]
/// for noiseless Y. Deliberately naive; test reference only.
inline ComplexGrid filter_output_reference(const ComplexGrid& h, const ComplexGrid& x,
                                           const PhaseCoupling& pc) {
    const IndexRange q_rows = h.rows().plus(x.rows()).plus(x.rows().negated());
    const IndexRange q_cols = h.cols().plus(x.cols()).plus(x.cols().negated());
    ComplexGrid q(q_rows, q_cols, h.delta_f(), h.delta_t());
    const double tpa = 2.0 * M_PI * pc.alpha;
    for (int l = q_rows.lo; l <= q_rows.hi; ++l) {
        for (int k = q_cols.lo; k <= q_cols.hi; ++k) {
            cxd acc = 0.0;
            for (int m2 = h.rows().lo; m2 <= h.rows().hi; ++m2) {
                for (int n2 = h.cols().lo; n2 <= h.cols().hi; ++n2) {
                    const cxd hv = h.at(m2, n2);
                    if (hv == cxd{}) continue;
                    const int mp_lo = std::min(m2 + x.rows().lo, l + x.rows().lo);
                    const int mp_hi = std::max(m2 + x.rows().hi, l + x.rows().hi);
                    const int np_lo = std::min(n2 + x.cols().lo, k + x.cols().lo);
                    const int np_hi = std::max(n2 + x.cols().hi, k + x.cols().hi);
                    cxd sum_m = 0.0;
                    for (int mp = mp_lo; mp <= mp_hi; ++mp) {
                        cxd sum_n = 0.0;
                        for (int np = np_lo; np <= np_hi; ++np)
                            sum_n += x.at(mp - m2, np - n2) * std::conj(x.at(mp - l, np - k));
                        sum_m += std::polar(1.0, tpa * mp * (n2 - k)) * sum_n;
                    }
                    acc += hv * std::polar(1.0, tpa * (static_cast<double>(l) * k -
                                                       static_cast<double>(m2) * n2)) *
                           sum_m;
                }
            }
            q.ref(l, k) = acc;
        }
    }
    return q;
}

/// Interference at one output index for a separable pilot: the sum over
/// channel taps other than (l,k) of the tap value times the pilot's
/// frequency-axis self-ambiguity (computed numerically; no closed form
/// exists) and time-axis autocorrelation. Exact for unit-energy pilots.
inline cxd interference_sep(const ComplexGrid& h, int M, int N, int r_f, int r_t,
                            const PhaseCoupling& pc, GridIndex at) {
    const auto u = zc_sequence(M, r_f);
    const auto v = zc_sequence(N, r_t);
    const double tpa = 2.0 * M_PI * pc.alpha;
    const int l = at.row, k = at.col;
    cxd acc = 0.0;
    for (int m2 = h.rows().lo; m2 <= h.rows().hi; ++m2) {
        for (int n2 = h.cols().lo; n2 <= h.cols().hi; ++n2) {
            if (m2 == l && n2 == k) continue;
            const cxd hv = h.at(m2, n2);
            if (hv == cxd{}) continue;
            const int d = m2 - l;
            const int q = n2 - k;
            cxd amb = 0.0;  // A_u[d, q] = sum_p u[p] u*[p+d] e^{j2pi a p q}
            for (int p = 0; p < M; ++p) {
                const int pd = p + d;
                if (pd < 0 || pd >= M) continue;
                amb += u[static_cast<size_t>(p)] * std::conj(u[static_cast<size_t>(pd)]) *
                       std::polar(1.0, tpa * p * q);
            }
            cxd rv = 0.0;  // time-axis autocorrelation of v at lag q
            for (int s = 0; s < N; ++s) {
                const int sq = s + q;
                if (sq < 0 || sq >= N) continue;
                rv += v[static_cast<size_t>(s)] * std::conj(v[static_cast<size_t>(sq)]);
            }
            acc += hv *
                   std::polar(1.0, tpa * (static_cast<double>(l) * k -
                                          static_cast<double>(m2) * n2)) *
                   std::polar(1.0, tpa * m2 * q) * amb * rv;
        }
    }
    return acc;
}

/// Approximate interference for a stacked pilot. The inner time-axis sum is
/// replaced by the periodic cross-correlation magnitude of two distinct-root
/// rows, 1/(M sqrt(N)) for unit-energy pilots; the result is an order-of-
/// magnitude diagnostic, not an exact residual.
inline cxd interference_stack(const ComplexGrid& h, int M, int N, const std::vector<int>& roots,
                              const PhaseCoupling& pc, GridIndex at) {
    if (static_cast<int>(roots.size()) != M)
        throw std::invalid_argument("interference_stack: need one root per row");
    const double tpa = 2.0 * M_PI * pc.alpha;
    const int l = at.row, k = at.col;
    cxd acc = 0.0;
    for (int m2 = h.rows().lo; m2 <= h.rows().hi; ++m2) {
        for (int n2 = h.cols().lo; n2 <= h.cols().hi; ++n2) {
            if (m2 == l && n2 == k) continue;
            const cxd hv = h.at(m2, n2);
            if (hv == cxd{}) continue;
            // rows where both shifted pilots overlap
            const int mp_lo = std::max(m2, l);
            const int mp_hi = std::min(m2, l) + M - 1;
            cxd s = 0.0;
            for (int mp = mp_lo; mp <= mp_hi; ++mp)
                s += std::polar(1.0, tpa * mp * (n2 - k));
            acc += hv *
                   std::polar(1.0, tpa * (static_cast<double>(l) * k -
                                          static_cast<double>(m2) * n2)) *
                   s;
        }
    }
    return acc / (M * std::sqrt(static_cast<double>(N)));
}

struct Peak {
    int row = 0;
    int col = 0;
    double magnitude = 0.0;
};

/// Argmax of |g| over a rectangular region. Ties break toward smaller col,
/// then smaller |row|, then smaller row.
inline Peak peak_search(const ComplexGrid& g, IndexRange rows, IndexRange cols) {
    if (rows.empty() || cols.empty())
        throw std::invalid_argument("peak_search: empty search region");
    bool found = false;
    Peak best;
    for (int l = rows.lo; l <= rows.hi; ++l) {
        for (int k = cols.lo; k <= cols.hi; ++k) {
            const double mag = std::abs(g.at(l, k));
            bool take;
            if (!found) {
                take = true;
            } else if (mag != best.magnitude) {
                take = mag > best.magnitude;
            } else if (k != best.col) {
                take = k < best.col;
            } else if (std::abs(l) != std::abs(best.row)) {
                take = std::abs(l) < std::abs(best.row);
            } else {
                take = l < best.row;
            }
            if (take) {
                best = {l, k, mag};
                found = true;
            }
        }
    }
    return best;
}

/// Run the twisted matched filter and locate the LoS cell inside `search`.
inline EstimationResult estimate_dd(const ComplexGrid& y, const ComplexGrid& x,
                                    const PhaseCoupling& pc, IndexRange search_rows,
                                    IndexRange search_cols, double delta_f, double t_step,
                                    bool keep_q = false) {
    ComplexGrid q = filter_output(y, x, pc);
    if (search_rows.lo < q.rows().lo || search_rows.hi > q.rows().hi ||
        search_cols.lo < q.cols().lo || search_cols.hi > q.cols().hi)
        throw std::invalid_argument("estimate_dd: search region outside the filter output");
    const Peak p = peak_search(q, search_rows, search_cols);
    EstimationResult r;
    r.l_hat = p.row;
    r.k_hat = p.col;
    r.nu_hat = p.row * delta_f;
    r.tau_hat = p.col * t_step;
    r.peak_magnitude = p.magnitude;
    if (keep_q) r.q_grid = std::move(q);
    return r;
}

}  // namespace tfzc
