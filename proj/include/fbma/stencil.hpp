#pragma once

// One-dimensional finite-difference stencils on uniform lines.
//
// Weights come from Fornberg's recursion, so any derivative/order pair can be
// built; interior nodes use centered stencils and the first/last few nodes of a
// non-periodic line use one-sided stencils of the same formal order.

#include <cstddef>
#include <span>
#include <vector>

namespace fbma {

/// Weights w_k such that f^{(deriv)}(x0) ~ sum_k w_k f(nodes[k]).
std::vector<double> fornberg_weights(double x0, std::span<const double> nodes, int deriv);

class Stencil1D {
public:
    /// `count` nodes with spacing `h`. When `period` > 0 the line wraps with
    /// that many nodes per period (node index taken modulo `period`).
    Stencil1D(int count, double h, int deriv, int order, int period = 0);

    int count() const { return count_; }
    int deriv() const { return deriv_; }
    int order() const { return order_; }

    /// Applies the stencil to a strided line: value k lives at data[k * stride].
    template <class T>
    void apply(const T* data, std::ptrdiff_t stride, T* out, std::ptrdiff_t out_stride) const
    {
        for (int k = 0; k < count_; ++k) {
            const Entry& e = entry(k);
            T acc{};
            for (std::size_t m = 0; m < e.weights.size(); ++m) {
                int idx = k + e.offset + static_cast<int>(m);
                if (period_ > 0) idx = wrap(idx);
                acc += data[idx * stride] * e.weights[m];
            }
            out[k * out_stride] = acc;
        }
    }

    template <class T>
    std::vector<T> apply(std::span<const T> line) const
    {
        std::vector<T> out(line.size());
        apply(line.data(), 1, out.data(), 1);
        return out;
    }

    /// Single-node evaluation (used when only a boundary value is needed).
    template <class T>
    T at(const T* data, std::ptrdiff_t stride, int k) const
    {
        const Entry& e = entry(k);
        T acc{};
        for (std::size_t m = 0; m < e.weights.size(); ++m) {
            int idx = k + e.offset + static_cast<int>(m);
            if (period_ > 0) idx = wrap(idx);
            acc += data[idx * stride] * e.weights[m];
        }
        return acc;
    }

    /// Nonzero pattern of row k: (column index, weight) pairs.
    struct Tap {
        int index;
        double weight;
    };
    std::vector<Tap> taps(int k) const;

private:
    struct Entry {
        int offset = 0;  // index of first tap relative to the node
        std::vector<double> weights;
    };

    const Entry& entry(int k) const
    {
        if (period_ > 0) return interior_;
        if (k < static_cast<int>(left_.size())) return left_[k];
        const int from_right = count_ - 1 - k;
        if (from_right < static_cast<int>(right_.size())) return right_[from_right];
        return interior_;
    }

    int wrap(int idx) const
    {
        idx %= period_;
        return idx < 0 ? idx + period_ : idx;
    }

    int count_;
    int deriv_;
    int order_;
    int period_;
    Entry interior_;
    std::vector<Entry> left_;
    std::vector<Entry> right_;
};

}  // namespace fbma
