#pragma once

#include "riverlv/steady.hpp"
#include "riverlv/timestepper.hpp"
#include "riverlv/transport.hpp"

#include <complex>
#include <string>
#include <vector>

namespace riverlv {

enum class EigenMethod {
    // Inverse iteration on (sigma I - M) with sigma taken from the Collatz-Wielandt upper
    // bound; every iterate stays positive because sigma I - M is a nonsingular M-matrix.
    shift_invert,
    // Power iteration on M + sI with s = |M|_inf + 1. Converges at rate 1 - gap/(|M|+1),
    // which is too slow for fine grids but needs no factorisation.
    shifted_power
};

struct EigenOptions {
    double tol = 1e-12;  // Cauchy difference of successive normalised eigenvectors
    int max_iter = 10000;
    EigenMethod method = EigenMethod::shift_invert;
};

// Dominant eigenpair of M = L + diag(p). Lambda is the eigenvalue of largest real part and
// lambda1 = -Lambda, so lambda1 > 0 means the linearisation decays.
struct EigenReport {
    double Lambda = 0.0;
    double lambda1 = 0.0;
    Field phi;  // positive, max norm 1
    std::size_t iterations = 0;
    double residual = 0.0;  // |M phi - Lambda phi|_inf
    double lower = 0.0;     // Collatz-Wielandt bracket on Lambda
    double upper = 0.0;
    EigenMethod method = EigenMethod::shift_invert;
};

EigenReport principal_eigenpair(const TransportOperator& L, const Field& p, const EigenOptions& opts = {});

struct DenseSpectrum {
    double Lambda = 0.0;
    double imag_of_dominant = 0.0;
    std::vector<double> phi;  // max norm 1, sign fixed so the largest entry is +1
    std::vector<std::complex<double>> eigenvalues;
};

// Full eigendecomposition of L + diag(p); refuses more than 128 unknowns.
DenseSpectrum dense_spectrum(const TransportOperator& L, const Field& p);

enum class SemiTrivial { u_state, v_state };
enum class Stability { stable, unstable, marginal };

struct StabilityVerdict {
    SemiTrivial which = SemiTrivial::u_state;
    double eigenvalue = 0.0;  // kappa1 at (u_hat,0), tau1 at (0,v_hat)
    Stability verdict = Stability::marginal;
    EigenReport eigen;
    SteadyState base;
};

// Growth-rate field of the invader linearised at the resident's steady profile.
Field invasion_potential(const SpeciesReaction& invader, const Field& resident);

StabilityVerdict stability_of_semitrivial(SemiTrivial which, const CompetitionSystem& sys,
                                          const SteadyOptions& steady = {}, const EigenOptions& eig = {},
                                          double tol_marginal = 1e-7);
// Same, reusing an already computed resident steady state.
StabilityVerdict stability_at(SemiTrivial which, const CompetitionSystem& sys, const SteadyState& resident,
                              const EigenOptions& eig = {}, double tol_marginal = 1e-7);

struct EigenDifference {
    double eta1 = 0.0;  // lambda1 with transport (d1, alpha1)
    double eta2 = 0.0;  // lambda1 with transport (d2, alpha2)
    double rhs = 0.0;   // weighted-integral formula for eta2 - eta1
    double residual = 0.0;
};

// 1D. Compares eta2 - eta1 against
//   int [(d2-d1) z1_x + (a1-a2) z1] e^{-cx} (z2_x - c z2) / int e^{-cx} z1 z2,  c = a2/d2,
// with z1, z2 the two eigenvectors. Face quadrature; boundary faces carry no contribution.
EigenDifference eigen_difference_check(const TransportOperator& L1, const TransportOperator& L2, const Field& p,
                                       const EigenOptions& opts = {});

struct DriftBandReport {
    bool applicable = false;  // p strictly decreasing along x
    double max_excess = 0.0;  // max over interior cells of d phi_x/phi - alpha
    double band = 0.0;        // 10 h^2
    bool holds = true;
};

// For strictly decreasing p the eigenvector satisfies d phi_x/phi - alpha <= 0.
DriftBandReport drift_band_check(const EigenReport& eig, const TransportOperator& L, const Field& p);

std::string to_string(Stability s);
std::string to_string(SemiTrivial s);
std::string to_string(EigenMethod m);

}  // namespace riverlv
