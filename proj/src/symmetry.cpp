#include "decaylab/symmetry.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "decaylab/errors.hpp"
#include "decaylab/fft.hpp"

namespace decaylab {

namespace {

cplx ipow(int n) {
    cplx r = 1.0;
    for (int i = 0; i < n; ++i) r *= cplx(0.0, 1.0);
    return r;
}

std::string format_coefficient(cplx z) {
    char buf[64];
    if (z.imag() == 0.0)
        std::snprintf(buf, sizeof buf, "%g", z.real());
    else if (z.real() == 0.0 && std::abs(z.imag()) == 1.0)
        return z.imag() > 0.0 ? "i" : "-i";
    else if (z.real() == 0.0)
        std::snprintf(buf, sizeof buf, "%gi", z.imag());
    else
        std::snprintf(buf, sizeof buf, "(%g%+gi)", z.real(), z.imag());
    return buf;
}

SampledField multiply_by_coordinate(const SampledField& u, int axis) {
    std::vector<cplx> v(u.values().begin(), u.values().end());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= u.point(i)[axis];
    return SampledField(u.grid(), std::move(v), FieldKind::Complex);
}

}  // namespace

CommutingOperator CommutingOperator::schrodinger_boost(int axis) {
    if (axis < 0 || axis > 1) throw RangeError("schrodinger_boost: axis must be 0 or 1");
    CommutingOperator op;
    op.kind = OperatorKind::SchrodingerBoost;
    op.axis = axis;
    op.m = 2;
    op.a = 1.0;
    op.b = cplx(0.0, 0.5);
    return op;
}

CommutingOperator CommutingOperator::monomial(int m, cplx a, cplx b) {
    if (m < 2 || m > 7) throw RangeError("monomial operator: m must be in [2, 7]");
    CommutingOperator op;
    op.kind = OperatorKind::MonomialBoost;
    op.m = m;
    op.a = a;
    op.b = b;
    return op;
}

std::string CommutingOperator::describe() const {
    if (kind == OperatorKind::SchrodingerBoost)
        return "t d_" + std::to_string(axis) + " + (i/2) x_" + std::to_string(axis);
    std::string s = format_coefficient(a) + (m == 2 ? "t d" : "t d^" + std::to_string(m - 1));
    if (b == 1.0) return s + " + x";
    const std::string bs = format_coefficient(b);
    return bs.front() == '-' ? s + " - " + bs.substr(1) + "x" : s + " + " + bs + "x";
}

CommutingOperator derive_commuting_operator(const DispersionPolynomial& disp) {
    const auto s = disp.symbol_coefficients();
    return derive_commuting_operator(disp.degree(), s);
}

CommutingOperator derive_commuting_operator(int m, std::span<const cplx> s) {
    if (m < 2 || s.size() != static_cast<std::size_t>(m) + 1)
        throw std::invalid_argument("derive_commuting_operator: need m + 1 symbol coefficients, m >= 2");
    // rows: coefficient of xi^n in a (i xi)^{m-1} + i b sigma'(xi), n = 0..m-1, then a = m
    struct Row {
        cplx ca, cb, rhs;
    };
    std::vector<Row> rows;
    for (int n = 0; n < m; ++n) {
        const cplx ca = n == m - 1 ? ipow(m - 1) : cplx(0.0);
        const cplx cb = cplx(0.0, 1.0) * static_cast<double>(n + 1) * s[n + 1];
        rows.push_back({ca, cb, 0.0});
    }
    rows.push_back({1.0, 0.0, static_cast<double>(m)});

    // pick the pair of rows with the best-conditioned 2x2 determinant, then check the rest
    double best = 0.0;
    cplx a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = i + 1; j < rows.size(); ++j) {
            const cplx det = rows[i].ca * rows[j].cb - rows[i].cb * rows[j].ca;
            if (std::abs(det) > best) {
                best = std::abs(det);
                a = (rows[i].rhs * rows[j].cb - rows[i].cb * rows[j].rhs) / det;
                b = (rows[i].ca * rows[j].rhs - rows[i].rhs * rows[j].ca) / det;
            }
        }
    if (best < 1e-12) throw NoSolutionError("derive_commuting_operator: symbol condition is singular");
    for (const auto& r : rows) {
        const double scale = std::abs(r.ca) * std::abs(a) + std::abs(r.cb) * std::abs(b) + std::abs(r.rhs);
        if (std::abs(r.ca * a + r.cb * b - r.rhs) > 1e-12 * std::max(1.0, scale))
            throw NoSolutionError("derive_commuting_operator: symbol condition is inconsistent");
    }
    // snap round-off so that printed forms are exact
    auto snap = [](double v) { return std::abs(v - std::round(v)) < 1e-12 ? std::round(v) : v; };
    a = cplx(snap(a.real()), snap(a.imag()));
    b = cplx(snap(b.real()), snap(b.imag()));
    return CommutingOperator::monomial(m, a, b);
}

SampledField apply_operator(const CommutingOperator& op, const SampledField& u, double t) {
    const int axis = op.kind == OperatorKind::SchrodingerBoost ? op.axis : 0;
    if (axis >= u.grid().dim()) throw RangeError("apply_operator: axis exceeds field dimension");
    if (op.kind == OperatorKind::MonomialBoost && u.grid().dim() != 1)
        throw UnsupportedError("apply_operator: monomial operators act on one-dimensional fields");
    const SampledField xu = multiply_by_coordinate(u, axis);
    if (t == 0.0 || op.a == 0.0) return op.b * xu;
    return (op.a * t) * spectral_derivative(u, op.m - 1, axis) + op.b * xu;
}

CommutationResidual commutation_residual(const CommutingOperator& op, const DispersionPolynomial& disp,
                                         const SampledField& u0, double t) {
    const SampledField w0 = apply_operator(op, u0, 0.0);
    const SampledField lhs = apply_operator(op, propagate(u0, disp, t), t);
    const SampledField rhs = propagate(w0, disp, t);
    const double diff = l2_norm(lhs - rhs);
    const double denom = l2_norm(w0);
    if (denom == 0.0) return {diff, true};
    return {diff / denom, false};
}

std::vector<double> conserved_operator_norm(const SampledField& u0, const std::vector<OperatorPower>& ops,
                                            const DispersionPolynomial& disp, const std::vector<double>& times) {
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times) {
        SampledField v = propagate(u0, disp, t);
        for (const auto& [op, power] : ops)
            for (int i = 0; i < power; ++i) v = apply_operator(op, v, t);
        out.push_back(l2_norm(v));
    }
    return out;
}

double boost_commutator_norm(const SampledField& u, double t) {
    if (u.grid().dim() != 2) throw UnsupportedError("boost_commutator_norm: field must be two-dimensional");
    const auto w0 = CommutingOperator::schrodinger_boost(0);
    const auto w1 = CommutingOperator::schrodinger_boost(1);
    const auto a = apply_operator(w0, apply_operator(w1, u, t), t);
    const auto b = apply_operator(w1, apply_operator(w0, u, t), t);
    return l2_norm(a - b);
}

}  // namespace decaylab
