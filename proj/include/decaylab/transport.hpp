#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "decaylab/analytic.hpp"
#include "decaylab/fit.hpp"
#include "decaylab/grid.hpp"

namespace decaylab {

enum class MapTag { Identity, Relativistic, SquareD1, MixedD2 };

/// Classical velocity map w(p) of the phase-space transport equation
/// d_t nu + w(p) . d_q nu = 0.
class DispersionMap {
public:
    static DispersionMap identity(int d);
    /// w(p) = p / sqrt(1 + |p|^2)
    static DispersionMap relativistic(int d);
    /// d = 1, w(p) = p^2
    static DispersionMap square_d1();
    /// d = 2, w(p1, p2) = (p1, p2^2)
    static DispersionMap mixed_d2();

    MapTag tag() const { return tag_; }
    int d() const { return d_; }
    std::string name() const;

    std::vector<double> operator()(std::span<const double> p) const;
    /// Row-major d x d matrix with entry (j, i) = dw^j / dp_i.
    std::vector<double> jacobian(std::span<const double> p) const;

    /// True when w^a depends on p_a alone for every axis a.
    bool separable() const;
    /// Values of p_axis with w^axis(p_axis) in `target`, clipped to `within`. Separable maps only.
    std::vector<Interval> preimage(int axis, Interval target, Interval within) const;
    /// Interval containing w^axis(p) for all p in `pbox`.
    Interval image_bound(int axis, const Box& pbox) const;

private:
    DispersionMap(MapTag tag, int d) : tag_(tag), d_(d) {}
    MapTag tag_;
    int d_;
};

/// nu(t, q, p) = nu0(q - t w(p), p) for a phase-space datum nu0 on R^d x R^d.
class TransportSolution {
public:
    TransportSolution(AnalyticField datum, DispersionMap map);

    const AnalyticField& datum() const { return datum_; }
    const DispersionMap& map() const { return map_; }
    int d() const { return map_.d(); }
    /// Essential support of the datum in q and in p.
    const Box& q_support() const { return q_support_; }
    const Box& p_support() const { return p_support_; }

private:
    AnalyticField datum_;
    DispersionMap map_;
    Box q_support_;
    Box p_support_;
};

/// Pair of d-dimensional grids spanning phase space.
struct PhaseGrid {
    GridSpec q;
    GridSpec p;
};

double evaluate_density(const TransportSolution& sol, double t, std::span<const double> q,
                        std::span<const double> p);

/// Velocity average by periodic trapezoid quadrature over `pgrid`, which must contain every p
/// at which the integrand is non-negligible.
double velocity_average(const TransportSolution& sol, double t, std::span<const double> q, const GridSpec& pgrid);

struct VelocityQuadrature {
    std::size_t nodes_per_interval = 128;  // d = 1
    std::size_t nodes_per_axis_2d = 48;    // d = 2, per axis of each box
};

/// Velocity average with the p-domain cut down to where q - t w(p) meets the datum's q-support;
/// each resulting interval (or box) gets its own trapezoid rule.
double velocity_average(const TransportSolution& sol, double t, std::span<const double> q,
                        const VelocityQuadrature& quad = {});

/// Plain maximum of velocity_average over the nodes of qgrid.
double sup_velocity_average(const TransportSolution& sol, double t, const GridSpec& qgrid, const GridSpec& pgrid);

struct SupOptions {
    std::size_t coarse_points = 256;  // per axis for d = 1; d = 2 uses coarse_points_2d
    std::size_t coarse_points_2d = 32;
    std::size_t refine_points = 16;
    int max_levels = 8;
    /// Refinement stops once the q-spacing is below this fraction of the datum's q-support.
    double target_fraction = 1.0 / 64.0;
    VelocityQuadrature quad;
};

struct SupResult {
    double value = 0.0;
    std::vector<double> argmax;
    std::vector<double> spacing;  // final q-spacing per axis
    int levels = 0;
};

/// Region of q where nu_bar(t, .) can be non-negligible.
Box velocity_average_region(const TransportSolution& sol, double t);

/// Sup of the velocity average: max over a coarse grid of velocity_average_region, then
/// repeated zoom windows around the best node.
SupResult sup_velocity_average(const TransportSolution& sol, double t, const SupOptions& opts = {});

/// Grid covering the support of nu(t, ., .) with the requested spacings.
PhaseGrid default_phase_grid(const TransportSolution& sol, double t, double q_spacing, double p_spacing);

using PhaseFunctional = std::function<double(std::span<const double> p, double value)>;

/// Quadrature of F(p, nu(t, q, p)) over phase space. F(p, 0) must vanish; only nodes where
/// the shifted datum support lies are visited.
double conserved_functional(const TransportSolution& sol, const PhaseFunctional& F, double t, const PhaseGrid& grid);

/// (W_i nu)(t, q, p) with W_i = d_{p_i} + t sum_j (d_{p_i} w^j) d_{q_j}, by the chain rule on
/// the characteristics formula.
double apply_transport_boost(const TransportSolution& sol, double t, int axis, std::span<const double> q,
                             std::span<const double> p);

struct KsVlasovEntry {
    double t = 0.0;
    double lhs = 0.0;  // |t|^d sup_q nu_bar(t, q)
    double rhs = 0.0;  // phase-space L^1 norm of W_1 ... W_d nu at time t
};

/// Identity map only, d in {1, 2}.
KsVlasovEntry ks_vlasov_check(const TransportSolution& sol, double t, const PhaseGrid& grid,
                              const SupOptions& sup = {});
KsVlasovEntry ks_vlasov_check(const TransportSolution& sol, double t);

struct CounterexampleRow {
    double lambda = 1.0;
    double t = 0.0;
    double nu_bar_at_origin = 0.0;
    double lower_bound = 0.0;  // lambda sqrt((sqrt(4 t^2 / lambda^2 + 1) - 1) / (2 t^2))
    double w11_norm = 0.0;     // ||phi_lambda||_{W^{1,1}} by quadrature
};

/// Velocity average at the origin for w = p^2 and the scaled bump datum, with its closed-form
/// lower bound and the W^{1,1} norm of the datum.
CounterexampleRow counterexample_profile(double lambda, double t);

/// Closed-form lower bound, evaluated in a cancellation-free form.
double counterexample_lower_bound(double lambda, double t);

/// ||phi_lambda||_{W^{1,1}} = ||f||_1 + sum_a ||d_a f||_1 on a grid of spacing 0.01 / lambda.
double bump_w11_norm(double lambda);

/// sup_q nu_bar(t, q) at every time, fitted against log t.
DecayFit transport_decay_experiment(const DispersionMap& map, const AnalyticField& datum,
                                    std::span<const double> times, const SupOptions& opts = {});

}  // namespace decaylab
