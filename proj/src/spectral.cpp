#include "riverlv/spectral.hpp"

#include "riverlv/error.hpp"
#include "riverlv/kernels.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace riverlv {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void apply_m(const TransportOperator& L, const Field& p, const std::vector<double>& x, std::vector<double>& y) {
    L.apply(x, y);
    for (std::size_t k = 0; k < x.size(); ++k) y[k] += p[k] * x[k];
}

// Scale so that the entry of largest magnitude becomes +1.
void normalise(std::vector<double>& x) {
    std::size_t arg = 0;
    for (std::size_t k = 1; k < x.size(); ++k)
        if (std::fabs(x[k]) > std::fabs(x[arg])) arg = k;
    const double s = x[arg];
    if (s == 0.0 || !std::isfinite(s)) throw NumericalError("eigen iteration collapsed to zero");
    for (double& v : x) v /= s;
}

void collatz_wielandt(const std::vector<double>& x, const std::vector<double>& mx, double& lo, double& hi) {
    lo = INFINITY;
    hi = -INFINITY;
    for (std::size_t k = 0; k < x.size(); ++k) {
        double r = mx[k] / x[k];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
}

void finish(EigenReport& rep, const TransportOperator& L, const Field& p, std::vector<double>& x) {
    const auto& kt = kernels::active();
    double xmin = *std::min_element(x.begin(), x.end());
    if (!(xmin > 0.0))
        throw NumericalError("principal eigenvector lost positivity (min/max = " + std::to_string(xmin) + ")");
    std::vector<double> mx(x.size());
    apply_m(L, p, x, mx);
    collatz_wielandt(x, mx, rep.lower, rep.upper);
    for (std::size_t k = 0; k < x.size(); ++k) mx[k] -= rep.Lambda * x[k];
    rep.residual = kt.max_abs(mx.size(), mx.data());
    rep.lambda1 = -rep.Lambda;
    rep.phi = Field(L.grid, std::move(x));
}

EigenReport shift_invert(const TransportOperator& L, const Field& p, const EigenOptions& opts) {
    const auto& kt = kernels::active();
    const std::size_t N = L.size();
    const double m_norm = L.norm_inf() + p.max_abs();
    EigenReport rep;
    rep.method = EigenMethod::shift_invert;
    std::vector<double> x(N, 1.0), y(N), mx(N);
    // Column sums of L vanish, so Lambda <= max p.
    double sigma = p.max() + std::max(1.0, 0.1 * (p.max() - p.min()));
    double sigma_factored = NAN;
    BandedLU lu;
    double diff = INFINITY;
    for (int it = 0; it < opts.max_iter; ++it) {
        if (sigma != sigma_factored) {
            BandedMatrix B = L.to_banded(-1.0, sigma);
            for (std::size_t k = 0; k < N; ++k) B.add(k, k, -p[k]);
            lu = BandedLU(std::move(B), Pivoting::partial);
            sigma_factored = sigma;
        }
        y = x;
        lu.solve(y);
        std::vector<double> xn = y;
        normalise(xn);
        diff = kt.max_abs_diff(N, xn.data(), x.data());
        ++rep.iterations;
        if (diff < opts.tol && it > 0) {
            // Lambda from the last inverse step: y ~ x / (sigma - Lambda).
            rep.Lambda = sigma - kt.dot(N, x.data(), x.data()) / kt.dot(N, x.data(), y.data());
            x.swap(xn);
            finish(rep, L, p, x);
            return rep;
        }
        x.swap(xn);
        if (*std::min_element(x.begin(), x.end()) <= 0.0) continue;  // keep the shift until positivity returns
        apply_m(L, p, x, mx);
        double lo, hi;
        collatz_wielandt(x, mx, lo, hi);
        double xmin = *std::min_element(x.begin(), x.end());
        double rounding = 64.0 * kEps * m_norm / xmin;
        double margin = std::max({2.0 * (hi - lo), 1e-9 * (1.0 + std::fabs(hi)), rounding});
        double proposal = hi + margin;
        // Refactor only when the shift moves appreciably closer.
        if (proposal < sigma && (sigma - proposal) > 0.25 * (sigma - hi)) sigma = proposal;
    }
    throw NumericalError("eigen iteration hit the cap of " + std::to_string(opts.max_iter) +
                         " iterations; last eigenvector change " + std::to_string(diff));
}

EigenReport shifted_power(const TransportOperator& L, const Field& p, const EigenOptions& opts) {
    const auto& kt = kernels::active();
    const std::size_t N = L.size();
    const double s = L.norm_inf() + p.max_abs() + 1.0;
    EigenReport rep;
    rep.method = EigenMethod::shifted_power;
    std::vector<double> x(N, 1.0), mx(N);
    double diff = INFINITY;
    for (int it = 0; it < opts.max_iter; ++it) {
        apply_m(L, p, x, mx);
        for (std::size_t k = 0; k < N; ++k) mx[k] += s * x[k];
        normalise(mx);
        diff = kt.max_abs_diff(N, mx.data(), x.data());
        x.swap(mx);
        ++rep.iterations;
        if (diff < opts.tol) {
            apply_m(L, p, x, mx);
            rep.Lambda = kt.dot(N, x.data(), mx.data()) / kt.dot(N, x.data(), x.data());
            finish(rep, L, p, x);
            return rep;
        }
    }
    apply_m(L, p, x, mx);
    double lam = kt.dot(N, x.data(), mx.data()) / kt.dot(N, x.data(), x.data());
    for (std::size_t k = 0; k < N; ++k) mx[k] -= lam * x[k];
    throw NumericalError("power iteration hit the cap of " + std::to_string(opts.max_iter) +
                         " iterations; residual " + std::to_string(kt.max_abs(N, mx.data())));
}

}  // namespace

EigenReport principal_eigenpair(const TransportOperator& L, const Field& p, const EigenOptions& opts) {
    if (p.size() != L.size()) throw ConfigError("potential does not match the operator size");
    if (!L.is_metzler()) throw ConfigError("operator has negative off-diagonal entries; Perron iteration undefined");
    for (double v : p.values)
        if (!std::isfinite(v)) throw ConfigError("potential must be finite");
    return opts.method == EigenMethod::shift_invert ? shift_invert(L, p, opts) : shifted_power(L, p, opts);
}

DenseSpectrum dense_spectrum(const TransportOperator& L, const Field& p) {
    const std::size_t N = L.size();
    if (N > 128) throw ConfigError("dense spectrum is limited to 128 unknowns");
    std::vector<double> m = L.dense();
    Eigen::MatrixXd M(N, N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) M(i, j) = m[i * N + j] + (i == j ? p[i] : 0.0);
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, true);
    if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
    DenseSpectrum out;
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < es.eigenvalues().size(); ++k)
        if (es.eigenvalues()[k].real() > es.eigenvalues()[best].real()) best = k;
    out.Lambda = es.eigenvalues()[best].real();
    out.imag_of_dominant = es.eigenvalues()[best].imag();
    out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    Eigen::VectorXcd vec = es.eigenvectors().col(best);
    out.phi.resize(N);
    for (std::size_t i = 0; i < N; ++i) out.phi[i] = vec[static_cast<Eigen::Index>(i)].real();
    normalise(out.phi);
    return out;
}

Field invasion_potential(const SpeciesReaction& invader, const Field& resident) {
    Field p(resident.grid);
    for (std::size_t k = 0; k < p.size(); ++k)
        p[k] = invader.growth[k] * ((1.0 - resident[k] / invader.capacity[k]) - invader.harvest);
    return p;
}

StabilityVerdict stability_at(SemiTrivial which, const CompetitionSystem& sys, const SteadyState& resident,
                              const EigenOptions& eig, double tol_marginal) {
    StabilityVerdict out;
    out.which = which;
    const bool u_state = which == SemiTrivial::u_state;
    const SpeciesReaction& invader = u_state ? sys.reactions.v : sys.reactions.u;
    const TransportOperator& transport = u_state ? sys.transport_v : sys.transport_u;
    Field p = invasion_potential(invader, resident.u);
    out.eigen = principal_eigenpair(transport, p, eig);
    out.eigenvalue = out.eigen.lambda1;
    if (out.eigenvalue < -tol_marginal)
        out.verdict = Stability::unstable;
    else if (out.eigenvalue > tol_marginal)
        out.verdict = Stability::stable;
    else
        out.verdict = Stability::marginal;
    out.base = resident;
    return out;
}

StabilityVerdict stability_of_semitrivial(SemiTrivial which, const CompetitionSystem& sys, const SteadyOptions& steady,
                                          const EigenOptions& eig, double tol_marginal) {
    const bool u_state = which == SemiTrivial::u_state;
    SteadyState resident = solve_single_steady(u_state ? sys.transport_u : sys.transport_v,
                                               u_state ? sys.reactions.u : sys.reactions.v, steady);
    return stability_at(which, sys, resident, eig, tol_marginal);
}

EigenDifference eigen_difference_check(const TransportOperator& L1, const TransportOperator& L2, const Field& p,
                                       const EigenOptions& opts) {
    const Grid& g = L1.grid;
    if (g.dim != 1 || !(L2.grid == g)) throw ConfigError("eigenvalue difference check needs two 1D operators on one grid");
    EigenReport e1 = principal_eigenpair(L1, p, opts);
    EigenReport e2 = principal_eigenpair(L2, p, opts);
    const double d1 = L1.d, a1 = L1.alpha, d2 = L2.d, a2 = L2.alpha;
    const double c = a2 / d2;
    const double h = g.h;
    const Field& z1 = e1.phi;
    const Field& z2 = e2.phi;
    double num = 0.0, den = 0.0;
    for (int i = 0; i + 1 < g.n; ++i) {
        double xf = g.a + (i + 1) * h;
        double z1f = (z1[i] + z1[i + 1]) / 2.0, z1x = (z1[i + 1] - z1[i]) / h;
        double z2f = (z2[i] + z2[i + 1]) / 2.0, z2x = (z2[i + 1] - z2[i]) / h;
        num += ((d2 - d1) * z1x + (a1 - a2) * z1f) * std::exp(-c * xf) * (z2x - c * z2f);
    }
    for (int i = 0; i < g.n; ++i) den += std::exp(-c * g.center(i)) * z1[i] * z2[i];
    EigenDifference out;
    out.eta1 = e1.lambda1;
    out.eta2 = e2.lambda1;
    out.rhs = (h * num) / (h * den);
    out.residual = std::fabs((out.eta2 - out.eta1) - out.rhs);
    return out;
}

DriftBandReport drift_band_check(const EigenReport& eig, const TransportOperator& L, const Field& p) {
    const Grid& g = L.grid;
    DriftBandReport rep;
    rep.band = 10.0 * g.h * g.h;
    if (g.dim != 1) return rep;
    rep.applicable = true;
    for (int i = 0; i + 1 < g.n; ++i)
        if (!(p[i + 1] < p[i])) rep.applicable = false;
    if (!rep.applicable) return rep;
    rep.max_excess = -INFINITY;
    for (int i = 1; i + 1 < g.n; ++i) {
        double phx = (eig.phi[i + 1] - eig.phi[i - 1]) / (2.0 * g.h);
        rep.max_excess = std::max(rep.max_excess, L.d * phx / eig.phi[i] - L.alpha);
    }
    rep.holds = rep.max_excess <= rep.band;
    return rep;
}

std::string to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::marginal: return "marginal";
    }
    return "marginal";
}

std::string to_string(SemiTrivial s) { return s == SemiTrivial::u_state ? "u_state" : "v_state"; }

std::string to_string(EigenMethod m) { return m == EigenMethod::shift_invert ? "shift-invert" : "shifted-power"; }

}  // namespace riverlv
