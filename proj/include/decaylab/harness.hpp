#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "decaylab/fit.hpp"
#include "decaylab/grid.hpp"
#include "decaylab/norms.hpp"
#include "decaylab/spectral.hpp"
#include "decaylab/symmetry.hpp"
#include "decaylab/transport.hpp"

namespace decaylab {

/// |t|^{d/2} ||u(t)||_inf against ||u0||_{X^{d/2,1}} for Schrodinger. Samples whose propagated
/// field trips the wrap-around guard are excluded.
InequalityReport check_dispersive_schrodinger(const SampledField& u0, const std::vector<double>& times,
                                              const DyadicPartition& partition);

/// |t|^d ||u(t)||_inf^2 against sum over |alpha| + |beta| = d of ||W^alpha u(t)|| ||W^beta u(t)||,
/// W the Schrodinger boosts, d in {1, 2}.
InequalitySample check_ks_schrodinger(const SampledField& u0, double t);
InequalityReport ks_schrodinger_report(const SampledField& u0, const std::vector<double>& times);

struct LpDecayResult {
    /// |t|^{theta d/2} ||u(t)||_{L^p}, p = 2/(1-theta), against || |x|^{theta d/2} u0 ||_{L^2}.
    InequalityReport untruncated;
    /// <t>^{theta d/2} ||u(t)||_{L^p} against ||u0||_{X^{theta d/2,2}} + ||u0||_{H^{theta d/2}}.
    InequalityReport truncated;
    double x_norm = 0.0;
    double hs_norm = 0.0;
    double weighted_norm = 0.0;
    /// Fit of ||u(t)||_{L^p} when theta > 0 and enough samples survive.
    std::optional<DecayFit> fit;
};

LpDecayResult check_lp_decay(const SampledField& u0, double theta, const std::vector<double>& times,
                             const DyadicPartition& partition);

/// |t|^sigma ||u(t)||_{X^{-sigma,2}} against ||u0||_{X^{sigma,2}}.
InequalityReport check_local_mass(const SampledField& u0, double sigma, const std::vector<double>& times,
                                  const DyadicPartition& partition);

/// 2 ||d u0|| ||x u0|| + ||u0||^2 for the Airy pointwise estimate.
double airy_pointwise_rhs(const SampledField& u0);

/// 3t (d_x u)^2 + x u^2 at every grid node with x in `probes`, against airy_pointwise_rhs, declared
/// bound 1.
InequalityReport check_airy_pointwise(const SampledField& u0, const std::vector<double>& times, Interval probes);

struct AiryLocalEnergyResult {
    /// t ||<x>^{-1/2-eps} d_x u(t)||^2 against (C I_eps + ||u0||^2) / 3 with C the pointwise
    /// constant and I_eps the integral of <x>^{-1-2eps}; declared bound 1.
    InequalityReport report;
    std::vector<SeriesSample> energy;  // ||<x>^{-1/2-eps} d_x u(t)||^2
};

AiryLocalEnergyResult check_airy_local_energy(const SampledField& u0, double eps, const std::vector<double>& times);

/// t max_x |d^{2k-2} u(t)|^2 against ||d^{2k-2} u0|| ||x u0|| for i d_t u + d^{2k} u = 0.
InequalityReport check_monomial_estimate(int k, const SampledField& u0, const std::vector<double>& times);

struct AiryDecayResult {
    DecayFit sup_fit;         // ||u(t)||_inf
    DecayFit right_gradient;  // max over x >= 0 of |d_x u(t)|
};

/// Fits over uncontaminated samples; throws InsufficientWindowError when fewer than five remain.
AiryDecayResult airy_decay_experiment(const SampledField& u0, const std::vector<double>& times);

/// Random smooth data: each field is a sum of one to three modulated Gaussians with widths in
/// [2.5, 4], modulations |k| <= 0.5 and centers in [-8, 8]. Reproducible for a given seed.
std::vector<SampledField> band_limited_suite(const GridSpec& grid, std::size_t count, std::uint64_t seed);

struct CommutationRow {
    int degree = 0;
    std::size_t datum = 0;
    double t = 0.0;
    double residual = 0.0;
    double residual_a_perturbed = 0.0;  // a scaled by 1.1
    double residual_b_perturbed = 0.0;  // b scaled by 1.1
};

struct CommutationSuiteResult {
    std::vector<CommutingOperator> operators;  // one per degree
    std::vector<CommutationRow> rows;
    double max_residual = 0.0;
    /// Over data, the smaller of the two perturbed residuals maximized over the sampled times.
    double min_perturbed = 0.0;
};

/// Derived operators for Schrodinger (m = 2), Airy (m = 3) and i d_t u + d^m u = 0 for even m >= 4.
CommutationSuiteResult run_commutation_suite(const std::vector<int>& degrees, const std::vector<SampledField>& data,
                                             const std::vector<double>& times);

DispersionPolynomial dispersion_for_degree(int m);

struct ConservationRow {
    std::string functional;
    double t = 0.0;
    double value = 0.0;
    double relative_change = 0.0;  // against t = 0
};

/// Mass, L^2 and kinetic energy |p|^2 nu at each time on one phase grid sized for the largest time.
std::vector<ConservationRow> check_transport_conservation(const TransportSolution& sol, const std::vector<double>& times,
                                                          double q_spacing, double p_spacing);

}  // namespace decaylab
