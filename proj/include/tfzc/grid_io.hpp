// Plain-text grid dump format and gnuplot triplet export.
//
// Dump layout: a header line
//   # rows=[l_min,l_max] cols=[k_min,k_max] delta_f=<Hz> delta_t=<s>
// followed by one line per row, complex samples as re+imj pairs separated by
// commas. All numbers use 9 significant digits with '.' as the decimal
// separator regardless of locale (std::to_chars / std::from_chars).
// Files are written atomically: to a temp file first, then renamed.

#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>

#include "tfzc/grid.hpp"

namespace tfzc {

/// 9-significant-digit, locale-independent rendering of a double.
inline std::string format_sig9(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

/// Shortest representation that parses back to exactly the same double.
/// Used for the config echo, which must reproduce runs bit-identically.
inline std::string format_exact(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_complex(cxd v) {
    std::string s = format_sig9(v.real());
    if (!(v.imag() < 0.0) && !std::signbit(v.imag())) s += '+';
    s += format_sig9(v.imag());
    s += 'j';
    return s;
}

inline double parse_double(std::string_view text) {
    // from_chars accepts '-' but not a leading '+'
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw std::invalid_argument("malformed number: '" + std::string(text) + "'");
    return v;
}

inline cxd parse_complex(std::string_view token) {
    if (token.empty() || token.back() != 'j')
        throw std::invalid_argument("malformed complex sample: '" + std::string(token) + "'");
    token.remove_suffix(1);
    // split at the sign of the imaginary part (skip a leading sign and
    // exponent signs)
    size_t split = std::string_view::npos;
    for (size_t i = 1; i < token.size(); ++i) {
        if ((token[i] == '+' || token[i] == '-') && token[i - 1] != 'e' && token[i - 1] != 'E')
            split = i;  // keep the last match: the imaginary part's sign
    }
    if (split == std::string_view::npos)
        throw std::invalid_argument("malformed complex sample: missing imaginary part");
    return {parse_double(token.substr(0, split)), parse_double(token.substr(split))};
}

/// Write `content` to `path` via a temp file + rename.
inline void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp + "' for writing");
        out << content;
        if (!out) throw std::runtime_error("write failed for '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename '" + tmp + "' to '" + path + "'");
}

inline std::string grid_dump_string(const ComplexGrid& g) {
    std::string out;
    out += "# rows=[" + std::to_string(g.rows().lo) + ',' + std::to_string(g.rows().hi) +
           "] cols=[" + std::to_string(g.cols().lo) + ',' + std::to_string(g.cols().hi) +
           "] delta_f=" + format_sig9(g.delta_f()) + " delta_t=" + format_sig9(g.delta_t()) + '\n';
    for (int l = g.rows().lo; l <= g.rows().hi; ++l) {
        for (int k = g.cols().lo; k <= g.cols().hi; ++k) {
            if (k != g.cols().lo) out += ',';
            out += format_complex(g.at(l, k));
        }
        out += '\n';
    }
    return out;
}

inline void write_grid_dump(const ComplexGrid& g, const std::string& path) {
    write_text_atomic(path, grid_dump_string(g));
}

inline ComplexGrid read_grid_dump(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open grid dump '" + path + "'");
    std::string header;
    std::getline(in, header);
    int rl = 0, rh = 0, cl = 0, ch = 0;
    double df = 0.0, dt = 0.0;
    {
        // header fields are fixed-position key=value tokens
        std::istringstream hs(header);
        std::string hash, rows_tok, cols_tok, df_tok, dt_tok;
        hs >> hash >> rows_tok >> cols_tok >> df_tok >> dt_tok;
        auto parse_range = [](const std::string& tok, const char* key, int& lo, int& hi) {
            const std::string prefix = std::string(key) + "=[";
            if (tok.rfind(prefix, 0) != 0 || tok.back() != ']')
                throw std::invalid_argument("bad grid dump header token: '" + tok + "'");
            const std::string body = tok.substr(prefix.size(), tok.size() - prefix.size() - 1);
            const size_t comma = body.find(',');
            if (comma == std::string::npos)
                throw std::invalid_argument("bad grid dump header token: '" + tok + "'");
            lo = static_cast<int>(parse_double(body.substr(0, comma)));
            hi = static_cast<int>(parse_double(body.substr(comma + 1)));
        };
        auto parse_kv = [](const std::string& tok, const char* key) {
            const std::string prefix = std::string(key) + "=";
            if (tok.rfind(prefix, 0) != 0)
                throw std::invalid_argument("bad grid dump header token: '" + tok + "'");
            return parse_double(tok.substr(prefix.size()));
        };
        if (hash != "#") throw std::invalid_argument("grid dump must start with '# rows=...'");
        parse_range(rows_tok, "rows", rl, rh);
        parse_range(cols_tok, "cols", cl, ch);
        df = parse_kv(df_tok, "delta_f");
        dt = parse_kv(dt_tok, "delta_t");
    }
    ComplexGrid g({rl, rh}, {cl, ch}, df, dt);
    std::string line;
    for (int l = rl; l <= rh; ++l) {
        if (!std::getline(in, line))
            throw std::invalid_argument("grid dump truncated at row " + std::to_string(l));
        std::istringstream ls(line);
        std::string token;
        for (int k = cl; k <= ch; ++k) {
            if (!std::getline(ls, token, ','))
                throw std::invalid_argument("grid dump row too short at row " +
                                            std::to_string(l));
            g.ref(l, k) = parse_complex(token);
        }
    }
    return g;
}

/// gnuplot-compatible triplets: delay_s doppler_hz magnitude, one block per
/// Doppler row (blank-line separated for splot).
inline std::string grid_xyz_string(const ComplexGrid& g) {
    std::string out;
    for (int l = g.rows().lo; l <= g.rows().hi; ++l) {
        for (int k = g.cols().lo; k <= g.cols().hi; ++k) {
            out += format_sig9(k * g.delta_t());
            out += ' ';
            out += format_sig9(l * g.delta_f());
            out += ' ';
            out += format_sig9(std::abs(g.at(l, k)));
            out += '\n';
        }
        out += '\n';
    }
    return out;
}

inline void write_grid_xyz(const ComplexGrid& g, const std::string& path) {
    write_text_atomic(path, grid_xyz_string(g));
}

}  // namespace tfzc
