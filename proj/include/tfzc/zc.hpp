// Zadoff-Chu pilot families: 1D ZC, separable ZC, stacked ZC (and its
// transpose). All generators return unit-energy signals; the correlation
// properties that matter (constant amplitude, delta periodic autocorrelation,
// 1/sqrt(L) cross-correlation between distinct roots) are scale-invariant, so
// normalizing to unit energy changes nothing else.

#pragma once

#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfzc/grid.hpp"

namespace tfzc {

enum class PilotFamily { zc1d, separable, stacked, stacked_transposed };

inline const char* to_string(PilotFamily f) {
    switch (f) {
        case PilotFamily::zc1d: return "zc1d";
        case PilotFamily::separable: return "separable";
        case PilotFamily::stacked: return "stacked";
        case PilotFamily::stacked_transposed: return "stacked_t";
    }
    return "?";
}

/// Which sequence family to generate, plus its dimensions and roots.
struct PilotSpec {
    PilotFamily family = PilotFamily::separable;
    int L = 0;                // zc1d length
    int M = 0;                // frequency rows
    int N = 0;                // time columns
    int r = 1;                // zc1d root
    int r_f = 1;              // separable frequency root
    int r_t = 1;              // separable time root
    std::vector<int> roots;   // stacked per-row roots
};

namespace detail {
inline void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}
}  // namespace detail

/// ZC sequence s[n] = exp(-j pi r n(n+1)/L) / sqrt(L), n = 0..L-1.
inline std::vector<cxd> zc_sequence(int L, int r) {
    detail::require(L > 0, "zc_sequence: L must be positive");
    detail::require(L % 2 == 1, "zc_sequence: L must be odd");
    detail::require(std::gcd(r, L) == 1, "zc_sequence: root must be coprime to L");
    std::vector<cxd> s(static_cast<size_t>(L));
    const double amp = 1.0 / std::sqrt(static_cast<double>(L));
    for (int n = 0; n < L; ++n) {
        // n(n+1) is even, phase is well defined mod 2*pi for odd L
        double phase = -M_PI * static_cast<double>(r) * static_cast<double>(n) *
                       static_cast<double>(n + 1) / static_cast<double>(L);
        s[static_cast<size_t>(n)] = std::polar(amp, phase);
    }
    return s;
}

/// Outer product of a frequency-axis ZC (length M, root r_f) and a time-axis
/// ZC (length N, root r_t); unit energy.
inline ComplexGrid separable_zc(int M, int N, int r_f, int r_t, double delta_f = 1.0,
                                double delta_t = 1.0) {
    detail::require(M > 0 && M % 2 == 1, "separable_zc: M must be odd");
    detail::require(N > 0 && N % 2 == 1, "separable_zc: N must be odd");
    detail::require(std::gcd(r_f, M) == 1, "separable_zc: r_f must be coprime to M");
    detail::require(std::gcd(r_t, N) == 1, "separable_zc: r_t must be coprime to N");
    auto u = zc_sequence(M, r_f);
    auto v = zc_sequence(N, r_t);
    ComplexGrid g({0, M - 1}, {0, N - 1}, delta_f, delta_t);
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < N; ++n)
            g.ref(m, n) = u[static_cast<size_t>(m)] * v[static_cast<size_t>(n)];
    return g;
}

/// The M smallest positive integers coprime to N, ascending.
inline std::vector<int> default_roots(int M, int N) {
    detail::require(N > 0 && N % 2 == 1, "default_roots: N must be odd");
    detail::require(M > 0, "default_roots: M must be positive");
    std::vector<int> roots;
    roots.reserve(static_cast<size_t>(M));
    for (int c = 1; static_cast<int>(roots.size()) < M; ++c)
        if (std::gcd(c, N) == 1) roots.push_back(c);
    return roots;
}

/// Row m carries the length-N ZC with root roots[m]; unit energy overall.
inline ComplexGrid stacked_zc(int M, int N, const std::vector<int>& roots, double delta_f = 1.0,
                              double delta_t = 1.0) {
    detail::require(N > 0 && N % 2 == 1, "stacked_zc: N must be odd");
    detail::require(static_cast<int>(roots.size()) == M, "stacked_zc: need one root per row");
    for (size_t i = 0; i < roots.size(); ++i) {
        detail::require(std::gcd(roots[i], N) == 1, "stacked_zc: roots must be coprime to N");
        for (size_t j = i + 1; j < roots.size(); ++j)
            detail::require(roots[i] != roots[j], "stacked_zc: roots must be distinct");
    }
    ComplexGrid g({0, M - 1}, {0, N - 1}, delta_f, delta_t);
    const double row_scale = 1.0 / std::sqrt(static_cast<double>(M));
    for (int m = 0; m < M; ++m) {
        auto row = zc_sequence(N, roots[static_cast<size_t>(m)]);
        for (int n = 0; n < N; ++n) g.ref(m, n) = row_scale * row[static_cast<size_t>(n)];
    }
    return g;
}

/// Transpose of a grid (rows become columns); valid pilot in its own right.
inline ComplexGrid transpose(const ComplexGrid& g) {
    ComplexGrid out(g.cols(), g.rows(), g.delta_f(), g.delta_t());
    for (int r = g.rows().lo; r <= g.rows().hi; ++r)
        for (int c = g.cols().lo; c <= g.cols().hi; ++c) out.ref(c, r) = g.at(r, c);
    return out;
}

/// Largest odd L <= M*N that is coprime to the root, so the 1D baseline
/// matches the 2D pilots' sample count as closely as possible.
inline int default_zc1d_length(int M, int N, int r) {
    int candidate = M * N;
    if (candidate % 2 == 0) --candidate;
    while (candidate >= 3 && std::gcd(r, candidate) != 1) candidate -= 2;
    detail::require(candidate >= 3, "default_zc1d_length: no valid length found");
    return candidate;
}

/// Build the pilot grid described by `spec`. The zc1d family is returned as a
/// single-row grid (the sequence along the time axis).
inline ComplexGrid make_pilot(const PilotSpec& spec, double delta_f = 1.0, double delta_t = 1.0) {
    switch (spec.family) {
        case PilotFamily::zc1d: {
            auto s = zc_sequence(spec.L, spec.r);
            ComplexGrid g({0, 0}, {0, spec.L - 1}, delta_f, delta_t);
            for (int n = 0; n < spec.L; ++n) g.ref(0, n) = s[static_cast<size_t>(n)];
            return g;
        }
        case PilotFamily::separable:
            return separable_zc(spec.M, spec.N, spec.r_f, spec.r_t, delta_f, delta_t);
        case PilotFamily::stacked: {
            auto roots = spec.roots.empty() ? default_roots(spec.M, spec.N) : spec.roots;
            return stacked_zc(spec.M, spec.N, roots, delta_f, delta_t);
        }
        case PilotFamily::stacked_transposed: {
            auto roots = spec.roots.empty() ? default_roots(spec.M, spec.N) : spec.roots;
            return transpose(stacked_zc(spec.M, spec.N, roots, delta_f, delta_t));
        }
    }
    throw std::invalid_argument("make_pilot: unknown family");
}

}  // namespace tfzc
