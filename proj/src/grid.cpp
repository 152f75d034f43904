#include "decaylab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace decaylab {

GridSpec::GridSpec(int dim, std::array<double, 2> origin, std::array<double, 2> extent,
                   std::array<std::size_t, 2> points)
    : dim_(dim), origin_(origin), extent_(extent), points_(points) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("GridSpec: dim must be 1 or 2");
    for (int a = 0; a < dim; ++a) {
        if (!(extent[a] > 0.0) || !std::isfinite(extent[a]))
            throw std::invalid_argument("GridSpec: extent must be positive and finite");
        if (!std::isfinite(origin[a])) throw std::invalid_argument("GridSpec: origin must be finite");
        if (points[a] < 8) throw std::invalid_argument("GridSpec: need at least 8 points per axis");
    }
}

GridSpec GridSpec::line(double lo, double hi, std::size_t points) {
    return GridSpec(1, {lo, 0.0}, {hi - lo, 1.0}, {points, 1});
}

GridSpec GridSpec::plane(Interval x, std::size_t nx, Interval y, std::size_t ny) {
    return GridSpec(2, {x.lo, y.lo}, {x.length(), y.length()}, {nx, ny});
}

GridSpec GridSpec::centered(int dim, double half_width, std::size_t points) {
    if (dim == 1) return line(-half_width, half_width, points);
    return plane({-half_width, half_width}, points, {-half_width, half_width}, points);
}

double GridSpec::cell_volume() const {
    double v = spacing(0);
    if (dim_ == 2) v *= spacing(1);
    return v;
}

std::size_t GridSpec::size() const { return dim_ == 1 ? points_[0] : points_[0] * points_[1]; }

Box GridSpec::box() const {
    Box b;
    for (int a = 0; a < dim_; ++a) b.push_back({origin_[a], origin_[a] + extent_[a]});
    return b;
}

SampledField::SampledField(GridSpec grid, std::vector<cplx> values, FieldKind kind)
    : grid_(std::move(grid)), values_(std::move(values)), kind_(kind) {
    if (values_.size() != grid_.size())
        throw std::invalid_argument("SampledField: value count " + std::to_string(values_.size()) +
                                    " does not match grid size " + std::to_string(grid_.size()));
    if (kind_ == FieldKind::Real) {
        for (const auto& v : values_)
            if (v.imag() != 0.0) throw std::invalid_argument("SampledField: real field with nonzero imaginary part");
    }
}

SampledField SampledField::zeros(const GridSpec& grid, FieldKind kind) {
    return SampledField(grid, std::vector<cplx>(grid.size()), kind);
}

SampledField SampledField::from_real(const GridSpec& grid, std::span<const double> values) {
    std::vector<cplx> v(values.begin(), values.end());
    return SampledField(grid, std::move(v), FieldKind::Real);
}

SampledField SampledField::real_part_of(const SampledField& f, double tol) {
    const double scale = max_abs(f);
    std::vector<cplx> v(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (std::abs(f[i].imag()) > tol * scale)
            throw std::domain_error("SampledField::real_part_of: imaginary part exceeds tolerance");
        v[i] = f[i].real();
    }
    return SampledField(f.grid(), std::move(v), FieldKind::Real);
}

std::array<double, 2> SampledField::point(std::size_t i) const {
    if (grid_.dim() == 1) return {grid_.coord(0, i), 0.0};
    const std::size_t n1 = grid_.points(1);
    return {grid_.coord(0, i / n1), grid_.coord(1, i % n1)};
}

namespace {

void require_same_grid(const SampledField& a, const SampledField& b) {
    if (!(a.grid() == b.grid())) throw std::invalid_argument("SampledField: grid mismatch");
}

FieldKind combine(FieldKind a, FieldKind b) {
    return (a == FieldKind::Real && b == FieldKind::Real) ? FieldKind::Real : FieldKind::Complex;
}

}  // namespace

SampledField operator+(const SampledField& a, const SampledField& b) {
    require_same_grid(a, b);
    std::vector<cplx> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
    return SampledField(a.grid(), std::move(v), combine(a.kind(), b.kind()));
}

SampledField operator-(const SampledField& a, const SampledField& b) {
    require_same_grid(a, b);
    std::vector<cplx> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] - b[i];
    return SampledField(a.grid(), std::move(v), combine(a.kind(), b.kind()));
}

SampledField operator*(cplx s, const SampledField& a) {
    std::vector<cplx> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = s * a[i];
    const bool real = a.kind() == FieldKind::Real && s.imag() == 0.0;
    return SampledField(a.grid(), std::move(v), real ? FieldKind::Real : FieldKind::Complex);
}

cplx integrate(const SampledField& field) {
    cplx sum = 0.0;
    for (const auto& v : field.values()) sum += v;
    return sum * field.grid().cell_volume();
}

double l2_norm(const SampledField& field) {
    double sum = 0.0;
    for (const auto& v : field.values()) sum += std::norm(v);
    return std::sqrt(sum * field.grid().cell_volume());
}

double max_abs(const SampledField& field) {
    double m = 0.0;
    for (const auto& v : field.values()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace decaylab
