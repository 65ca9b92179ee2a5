#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace fbma {

/// Closed annulus A(1, R) sampled uniformly in (t, theta) with t = log r.
struct AnnulusSpec {
    double R = 2.0;
    double epsilon = 0.0;  // extension margin; only 0 is discretized
    int n_r = 65;
    int n_theta = 128;

    void validate() const;
};

/// Horizontal slab covering the annulus through z = exp(-i xi).
///
/// Rows run over Im xi in [log(1 - delta), log(R + delta)] (n_im nodes).
/// Columns run over Re xi in [0, 2 pi copies]; n_re nodes span one period
/// including both endpoints, so there are copies * (n_re - 1) + 1 columns.
struct SlabSpec {
    double R = 2.0;
    double delta = 0.0;
    int n_im = 65;
    int n_re = 129;
    int copies = 1;
    bool periodic = true;  // fields on this chart are 2 pi periodic in Re xi

    void validate() const;
};

enum class ChartKind { annulus, slab };

/// Structured chart shared by every sampled field.
///
/// Nodes are stored row-major: row i is the radial coordinate (t on the
/// annulus, Im xi on the slab), column j the angular one (theta, Re xi).
class Chart {
public:
    static Chart annulus(const AnnulusSpec& spec);
    static Chart slab(const SlabSpec& spec);

    ChartKind kind() const { return kind_; }
    bool is_annulus() const { return kind_ == ChartKind::annulus; }
    double R() const { return R_; }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return static_cast<std::size_t>(rows_) * cols_; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * cols_ + j; }

    double row_step() const { return row_step_; }
    double col_step() const { return col_step_; }
    double row_coord(int i) const { return row_origin_ + i * row_step_; }
    double col_coord(int j) const { return col_origin_ + j * col_step_; }

    /// Number of columns per wrap-around period; 0 when the columns do not wrap.
    int col_period() const { return col_period_; }
    bool col_periodic() const { return col_period_ > 0; }

    /// Columns per 2 pi (annulus: n_theta; slab: n_re - 1).
    int cols_per_turn() const { return cols_per_turn_; }
    int copies() const { return copies_; }

    /// Native complex coordinate: z = exp(t + i theta) on the annulus,
    /// xi = Re xi + i Im xi on the slab.
    std::complex<double> coordinate(int i, int j) const;

    /// Node sets on the two boundary circles / edges.
    std::vector<std::size_t> inner_boundary() const;
    std::vector<std::size_t> outer_boundary() const;

    /// Coordinate names used in CSV headers.
    std::string row_name() const { return is_annulus() ? "t" : "im_xi"; }
    std::string col_name() const { return is_annulus() ? "theta" : "re_xi"; }

    AnnulusSpec annulus_spec() const;
    SlabSpec slab_spec() const;

    bool same_shape(const Chart& other) const;

    /// Columns [j0, j1] of a slab as a non-wrapping slab (pieces cut along seams).
    Chart column_block(int j0, int j1) const;

private:
    ChartKind kind_ = ChartKind::annulus;
    double R_ = 2.0;
    double margin_ = 0.0;
    int rows_ = 0;
    int cols_ = 0;
    double row_origin_ = 0.0;
    double col_origin_ = 0.0;
    double row_step_ = 0.0;
    double col_step_ = 0.0;
    int col_period_ = 0;
    int cols_per_turn_ = 0;
    int copies_ = 1;
};

/// Builds and validates the annulus chart (configuration error on bad specs).
Chart make_annulus_grid(const AnnulusSpec& spec);
Chart make_slab_grid(const SlabSpec& spec);

}  // namespace fbma
