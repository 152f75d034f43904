#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace decaylab {

using cplx = std::complex<double>;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
};

/// Axis-aligned box, one interval per axis.
using Box = std::vector<Interval>;

/// Uniform periodic grid in one or two dimensions. Node i along an axis sits at
/// origin + i * spacing; the right end origin + extent is identified with origin.
class GridSpec {
public:
    GridSpec() = default;

    static GridSpec line(double lo, double hi, std::size_t points);
    static GridSpec plane(Interval x, std::size_t nx, Interval y, std::size_t ny);
    /// Symmetric box [-half_width, half_width)^dim with the same point count per axis.
    static GridSpec centered(int dim, double half_width, std::size_t points);

    int dim() const { return dim_; }
    double origin(int axis) const { return origin_[axis]; }
    double extent(int axis) const { return extent_[axis]; }
    std::size_t points(int axis) const { return points_[axis]; }
    double spacing(int axis) const { return extent_[axis] / static_cast<double>(points_[axis]); }
    double coord(int axis, std::size_t i) const { return origin_[axis] + static_cast<double>(i) * spacing(axis); }
    double cell_volume() const;
    std::size_t size() const;
    Box box() const;

    bool operator==(const GridSpec&) const = default;

private:
    GridSpec(int dim, std::array<double, 2> origin, std::array<double, 2> extent,
             std::array<std::size_t, 2> points);

    int dim_ = 1;
    std::array<double, 2> origin_{0.0, 0.0};
    std::array<double, 2> extent_{1.0, 1.0};
    std::array<std::size_t, 2> points_{8, 1};
};

enum class FieldKind { Real, Complex };

/// Samples of a field on a GridSpec, row-major with axis 0 slowest.
/// Immutable after construction.
class SampledField {
public:
    SampledField(GridSpec grid, std::vector<cplx> values, FieldKind kind = FieldKind::Complex);

    static SampledField zeros(const GridSpec& grid, FieldKind kind = FieldKind::Real);
    static SampledField from_real(const GridSpec& grid, std::span<const double> values);
    /// Drops imaginary parts no larger than `tol` times the max modulus; throws otherwise.
    static SampledField real_part_of(const SampledField& f, double tol);

    const GridSpec& grid() const { return grid_; }
    FieldKind kind() const { return kind_; }
    std::span<const cplx> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    const cplx& operator[](std::size_t i) const { return values_[i]; }

    /// Node coordinates of flat index i.
    std::array<double, 2> point(std::size_t i) const;

private:
    GridSpec grid_;
    std::vector<cplx> values_;
    FieldKind kind_;
};

SampledField operator+(const SampledField& a, const SampledField& b);
SampledField operator-(const SampledField& a, const SampledField& b);
SampledField operator*(cplx s, const SampledField& a);

/// Periodic trapezoid quadrature (sum of values times cell volume).
cplx integrate(const SampledField& field);

double l2_norm(const SampledField& field);
double max_abs(const SampledField& field);

}  // namespace decaylab
