// Complex time-frequency / delay-Doppler grid with signed index ranges.
//
// Rows carry the Doppler/frequency axis (step delta_f in Hz), columns carry
// the delay/time axis (step delta_t in seconds). Reads outside the declared
// ranges return exactly zero, so convolutions can probe past the support
// without bookkeeping. Grids are treated as immutable once filled; all
// operations below are pure and return new grids.

#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace tfzc {

using cxd = std::complex<double>;

/// Closed integer interval [lo, hi]. hi < lo denotes the empty range.
struct IndexRange {
    int lo = 0;
    int hi = -1;

    bool empty() const { return hi < lo; }
    int size() const { return empty() ? 0 : hi - lo + 1; }
    bool contains(int i) const { return i >= lo && i <= hi; }

    /// Minkowski sum of two ranges (support of a convolution output).
    IndexRange plus(const IndexRange& o) const { return {lo + o.lo, hi + o.hi}; }
    /// Negated range (support of a flipped signal).
    IndexRange negated() const { return {-hi, -lo}; }

    bool operator==(const IndexRange&) const = default;
};

/// Signed (row, col) index pair: (Doppler/frequency, delay/time).
struct GridIndex {
    int row = 0;
    int col = 0;
    bool operator==(const GridIndex&) const = default;
};

class ComplexGrid {
  public:
    ComplexGrid() = default;

    ComplexGrid(IndexRange rows, IndexRange cols, double delta_f, double delta_t)
        : rows_(rows), cols_(cols), delta_f_(delta_f), delta_t_(delta_t),
          data_(static_cast<size_t>(rows.size()) * static_cast<size_t>(cols.size())) {
        if (delta_f <= 0.0 || delta_t <= 0.0)
            throw std::invalid_argument("ComplexGrid: delta_f and delta_t must be positive");
    }

    /// Unit impulse at (row, col).
    static ComplexGrid delta(int row, int col, double delta_f = 1.0, double delta_t = 1.0) {
        ComplexGrid g({row, row}, {col, col}, delta_f, delta_t);
        g.ref(row, col) = 1.0;
        return g;
    }

    const IndexRange& rows() const { return rows_; }
    const IndexRange& cols() const { return cols_; }
    double delta_f() const { return delta_f_; }
    double delta_t() const { return delta_t_; }

    /// Zero-extended read: indices outside the declared ranges read as 0.
    cxd at(int row, int col) const {
        if (!rows_.contains(row) || !cols_.contains(col)) return {0.0, 0.0};
        return data_[offset(row, col)];
    }
    cxd at(GridIndex idx) const { return at(idx.row, idx.col); }

    /// Mutable access to an in-range cell (used while filling a grid).
    cxd& ref(int row, int col) {
        if (!rows_.contains(row) || !cols_.contains(col))
            throw std::out_of_range("ComplexGrid::ref: index outside declared ranges");
        return data_[offset(row, col)];
    }

    size_t cell_count() const { return data_.size(); }
    const std::vector<cxd>& raw() const { return data_; }
    std::vector<cxd>& raw() { return data_; }

    bool same_shape(const ComplexGrid& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  private:
    size_t offset(int row, int col) const {
        return static_cast<size_t>(row - rows_.lo) * static_cast<size_t>(cols_.size()) +
               static_cast<size_t>(col - cols_.lo);
    }

    IndexRange rows_;
    IndexRange cols_;
    double delta_f_ = 1.0;
    double delta_t_ = 1.0;
    std::vector<cxd> data_;
};

/// Total energy over the declared support: sum of |g[i,j]|^2.
inline double energy(const ComplexGrid& g) {
    double e = 0.0;
    for (const cxd& v : g.raw()) e += std::norm(v);
    return e;
}

/// Shift the declared ranges by `shift`; sample values are unchanged.
inline ComplexGrid translate(const ComplexGrid& g, GridIndex shift) {
    ComplexGrid out({g.rows().lo + shift.row, g.rows().hi + shift.row},
                    {g.cols().lo + shift.col, g.cols().hi + shift.col}, g.delta_f(), g.delta_t());
    out.raw() = g.raw();
    return out;
}

}  // namespace tfzc
