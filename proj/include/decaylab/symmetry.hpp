#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "decaylab/grid.hpp"
#include "decaylab/spectral.hpp"

namespace decaylab {

enum class OperatorKind { SchrodingerBoost, MonomialBoost };

/// Quantum-side commuting operator.
///   SchrodingerBoost(j):   u -> t d_j u + (i/2) x_j u
///   MonomialBoost(m, a, b): u -> a t d^{m-1} u + b x u   (one dimension)
struct CommutingOperator {
    OperatorKind kind = OperatorKind::MonomialBoost;
    int axis = 0;
    int m = 2;
    cplx a = 0.0;
    cplx b = 0.0;

    static CommutingOperator schrodinger_boost(int axis);
    static CommutingOperator monomial(int m, cplx a, cplx b);

    /// Human-readable form such as "3t d^2 + x".
    std::string describe() const;
};

/// Solves for (a, b) in a t d^{m-1} + b x so that the commutator with the evolution vanishes.
/// On the Fourier side this is the polynomial identity a (i xi)^{m-1} + i b sigma'(xi) = 0 in xi;
/// each power of xi gives one linear row, and a = m fixes the overall scale. Throws
/// NoSolutionError when the rows are inconsistent.
CommutingOperator derive_commuting_operator(const DispersionPolynomial& disp);
/// Same derivation for an arbitrary degree-m symbol given by its coefficients s_0..s_m.
CommutingOperator derive_commuting_operator(int m, std::span<const cplx> symbol_coefficients);

/// Action of the operator at time t, using spectral derivatives and multiplication by the grid
/// coordinate.
SampledField apply_operator(const CommutingOperator& op, const SampledField& u, double t);

struct CommutationResidual {
    double value = 0.0;
    /// True when ||W(0) u0|| vanished and `value` is the absolute residual.
    bool absolute = false;
};

/// ||W(t) U(t) u0 - U(t) W(0) u0|| / ||W(0) u0||.
CommutationResidual commutation_residual(const CommutingOperator& op, const DispersionPolynomial& disp,
                                         const SampledField& u0, double t);

/// One factor W^alpha of a product of commuting operators.
using OperatorPower = std::pair<CommutingOperator, int>;

/// ||W^alpha u(t)|| at each time, with W^alpha applied factor by factor at time t.
std::vector<double> conserved_operator_norm(const SampledField& u0, const std::vector<OperatorPower>& ops,
                                            const DispersionPolynomial& disp, const std::vector<double>& times);

/// ||W_0 W_1 u - W_1 W_0 u|| for the two Schrodinger boosts of a two-dimensional field.
double boost_commutator_norm(const SampledField& u, double t);

}  // namespace decaylab
