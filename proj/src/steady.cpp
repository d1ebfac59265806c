#include "riverlv/steady.hpp"

#include "riverlv/error.hpp"
#include "riverlv/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace riverlv {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double max_abs(const std::vector<double>& x) { return kernels::active().max_abs(x.size(), x.data()); }

struct NewtonOutcome {
    bool converged = false;
    bool singular = false;
    double residual = 0.0;
    double pivot_ratio = 1.0;
    std::size_t iterations = 0;
};

// Damped Newton with Armijo backtracking on the max-norm residual, step floor 2^-10.
// `tolerance(x)` lets the caller lift the target to the rounding floor of the current iterate.
NewtonOutcome damped_newton(std::vector<double>& x,
                            const std::function<void(const std::vector<double>&, std::vector<double>&)>& residual,
                            const std::function<BandedMatrix(const std::vector<double>&)>& jacobian,
                            const std::function<double(const std::vector<double>&)>& tolerance, int max_iter) {
    NewtonOutcome out;
    std::vector<double> F(x.size()), Ftrial(x.size()), trial(x.size()), step(x.size());
    residual(x, F);
    double fnorm = max_abs(F);
    for (int it = 0; it < max_iter; ++it) {
        if (!std::isfinite(fnorm)) break;
        if (fnorm < tolerance(x)) {
            out.converged = true;
            break;
        }
        BandedLU lu;
        try {
            lu = BandedLU(jacobian(x), Pivoting::partial);
        } catch (const NumericalError&) {
            out.singular = true;
            break;
        }
        out.pivot_ratio = std::min(out.pivot_ratio, lu.pivot_ratio());
        for (std::size_t k = 0; k < x.size(); ++k) step[k] = -F[k];
        lu.solve(step);
        ++out.iterations;
        if (max_abs(step) <= 4.0 * kEps * std::max(1.0, max_abs(x))) break;  // stalled above tolerance
        double t = 1.0;
        double trial_norm = 0.0;
        for (;;) {
            for (std::size_t k = 0; k < x.size(); ++k) trial[k] = x[k] + t * step[k];
            residual(trial, Ftrial);
            trial_norm = max_abs(Ftrial);
            if (std::isfinite(trial_norm) && trial_norm <= (1.0 - 1e-4 * t) * fnorm) break;
            if (t <= 1.0 / 1024.0) break;
            t *= 0.5;
        }
        x.swap(trial);
        F.swap(Ftrial);
        fnorm = trial_norm;
    }
    if (!out.converged && std::isfinite(fnorm) && fnorm < tolerance(x)) out.converged = true;
    out.residual = fnorm;
    return out;
}

double floor_tolerance(double tol, double op_norm, double state_norm) {
    return std::max(tol, 4.0 * kEps * op_norm * std::max(1.0, state_norm));
}

double reaction_scale(const SpeciesReaction& R) {
    double m = 0.0;
    for (double g : R.growth.values) m = std::max(m, std::fabs(g));
    return 2.0 * m + 1.0;
}

void single_residual(const TransportOperator& L, const SpeciesReaction& R, const std::vector<double>& u,
                     std::vector<double>& F) {
    std::vector<double> rate(u.size());
    std::vector<double> zero(u.size(), 0.0);
    kernels::active().logistic_rate(u.size(), u.data(), zero.data(), R.growth.values.data(),
                                    R.capacity.values.data(), R.harvest, rate.data());
    L.apply(u, F);
    for (std::size_t k = 0; k < u.size(); ++k) F[k] += rate[k];
}

double capacity_max(const SpeciesReaction& R) { return R.capacity.max(); }

// Long-time IMEX integration with the competitor absent. Stops once the stationary
// residual is below `target` or the discrete time derivative is below `rate_target`.
struct LongTimeResult {
    std::vector<double> u;
    double residual = 0.0;
    std::size_t steps = 0;
};

LongTimeResult long_time(const TransportOperator& L, const SpeciesReaction& R, std::vector<double> u, double dt,
                         double t_max, double target, double rate_target) {
    const auto& kt = kernels::active();
    const std::size_t N = u.size();
    BandedLU lu(L.to_banded(-dt, 1.0), Pivoting::none);
    std::vector<double> zero(N, 0.0), next(N), F(N);
    const long max_steps = static_cast<long>(std::ceil(t_max / dt));
    LongTimeResult res;
    for (long k = 0; k < max_steps; ++k) {
        kt.logistic_step(N, u.data(), zero.data(), R.growth.values.data(), R.capacity.values.data(), R.harvest, dt,
                         next.data());
        lu.solve(next);
        for (double& x : next) {
            if (!std::isfinite(x)) throw NumericalError("non-finite density in long-time integration");
            if (x < 0.0) x = 0.0;
        }
        double change = kt.max_abs_diff(N, next.data(), u.data()) / dt;
        u.swap(next);
        ++res.steps;
        if (change < rate_target) break;
        if ((k & 15) == 0 || target > 0.0) {
            single_residual(L, R, u, F);
            if (max_abs(F) < target) break;
        }
    }
    single_residual(L, R, u, F);
    res.residual = max_abs(F);
    res.u = std::move(u);
    return res;
}

void check_single_result(const std::vector<double>& u, const SpeciesReaction& R) {
    const double cap = capacity_max(R);
    const double umax = *std::max_element(u.begin(), u.end());
    if (umax < 1e-8 * cap) throw NumericalError("population not persistent at these parameters");
    const double umin = *std::min_element(u.begin(), u.end());
    if (!(umin > 1e-8 * cap))
        throw NumericalError("steady state is not strictly positive (min " + std::to_string(umin) + ")");
}

std::vector<std::pair<int, int>> sign_runs(const std::vector<double>& f) {
    double scale = max_abs(f);
    std::vector<std::pair<int, int>> runs;
    for (double x : f) {
        int s = std::fabs(x) <= 1e-12 * scale ? 0 : (x > 0.0 ? 1 : -1);
        if (!runs.empty() && runs.back().first == s)
            ++runs.back().second;
        else
            runs.push_back({s, 1});
    }
    return runs;
}

}  // namespace

Field stationary_residual(const TransportOperator& L, const SpeciesReaction& R, const Field& u) {
    Field F(u.grid);
    single_residual(L, R, u.values, F.values);
    return F;
}

SteadyState solve_single_steady(const TransportOperator& L, const SpeciesReaction& R, const SteadyOptions& opts) {
    if (!(opts.tol > 0.0)) throw ConfigError("steady tolerance must be positive");
    const Grid& grid = L.grid;
    const std::size_t N = grid.size();
    if (R.growth.size() != N) throw ConfigError("reaction coefficients do not match the grid");
    const double op_norm = L.norm_inf() + reaction_scale(R);
    auto tolerance = [&](const std::vector<double>& u) { return floor_tolerance(opts.tol, op_norm, max_abs(u)); };
    const double dt = opts.dt > 0.0 ? opts.dt : std::min(0.1, 0.9 / std::max(R.max_rate(), 1e-300));

    std::vector<double> u(N);
    if (opts.guess) {
        if (opts.guess->size() != N) throw ConfigError("initial guess does not match the grid");
        u = opts.guess->values;
    } else {
        for (std::size_t k = 0; k < N; ++k) u[k] = R.capacity[k] * (1.0 - R.harvest);
    }

    SteadyState out;
    out.method = opts.method;
    std::size_t iterations = 0;
    bool done = false;
    if (opts.method != SteadyMethod::long_time) {
        std::vector<double> start = u;
        if (opts.method == SteadyMethod::hybrid) {
            LongTimeResult pre = long_time(L, R, u, dt, opts.presolve_time, 0.0, std::sqrt(opts.tol));
            start = std::move(pre.u);
            iterations += pre.steps;
        }
        auto jac = [&](const std::vector<double>& x) {
            BandedMatrix J = L.to_banded(1.0, 0.0);
            for (std::size_t k = 0; k < N; ++k)
                J.add(k, k, R.growth[k] * ((1.0 - 2.0 * x[k] / R.capacity[k]) - R.harvest));
            return J;
        };
        auto res = [&](const std::vector<double>& x, std::vector<double>& F) { single_residual(L, R, x, F); };
        std::vector<double> x = start;
        NewtonOutcome nt = damped_newton(x, res, jac, tolerance, opts.newton_max_iter);
        iterations += nt.iterations;
        const double cap = capacity_max(R);
        const bool positive = *std::min_element(x.begin(), x.end()) > 1e-8 * cap;
        const bool zero_state = *std::max_element(x.begin(), x.end()) < 1e-8 * cap;
        if (nt.converged && zero_state) throw NumericalError("population not persistent at these parameters");
        if (nt.converged && positive) {
            u = std::move(x);
            out.residual = nt.residual;
            out.near_singular = nt.pivot_ratio < 1e-12;
            done = true;
        } else {
            out.method = SteadyMethod::long_time;
        }
    }
    if (!done) {
        LongTimeResult lt = long_time(L, R, u, dt, opts.long_time_max, tolerance(u), 0.0);
        iterations += lt.steps;
        u = std::move(lt.u);
        out.residual = lt.residual;
        if (!(out.residual < tolerance(u)))
            throw NumericalError("long-time integration did not reach the steady tolerance; residual " +
                                 std::to_string(out.residual));
    }
    check_single_result(u, R);
    out.u = Field(grid, std::move(u));
    out.tolerance = tolerance(out.u.values);
    out.iterations = iterations;
    return out;
}

CapacityIntegralReport capacity_integral(const SteadyState& star, const EffectiveParams& eff) {
    const Field& u = star.u;
    if (eff.K1.size() != u.size()) throw ConfigError("effective parameters do not match the steady state grid");
    CapacityIntegralReport rep;
    const double vol = u.grid.cell_volume();
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        double gap = 1.0 - u[k] / eff.K1[k];
        s1 += eff.r[k] * eff.K1[k] * gap;
        s2 += eff.r[k] * eff.K1[k] * gap * gap;
    }
    rep.integral = s1 * vol;
    rep.squared_integral = s2 * vol;
    rep.degenerate = eff.K1.max() - eff.K1.min() <= 1e-14 * eff.K1.max();
    return rep;
}

LogDerivativeReport log_derivative_bounds(const Field& star, double d, double alpha) {
    const Grid& g = star.grid;
    LogDerivativeReport rep;
    rep.T = Field(g);
    rep.bound = alpha / d;
    rep.band = 10.0 * g.h * g.h;
    const double lo = std::min(0.0, rep.bound) - rep.band;
    const double hi = std::max(0.0, rep.bound) + rep.band;
    const int rows = g.dim == 1 ? 1 : g.n;
    rep.t_min = INFINITY;
    rep.t_max = -INFINITY;
    for (int j = 0; j < rows; ++j)
        for (int i = 1; i + 1 < g.n; ++i) {
            std::size_t k = static_cast<std::size_t>(j) * g.n + i;
            double t = (star[k + 1] - star[k - 1]) / (2.0 * g.h) / star[k];
            rep.T[k] = t;
            rep.t_min = std::min(rep.t_min, t);
            rep.t_max = std::max(rep.t_max, t);
            ++rep.checked;
            if (!(t >= lo && t <= hi)) ++rep.violations;
        }
    return rep;
}

FluxDiagnostics flux_diagnostics(const SteadyState& pair, double d1, double alpha1, double d2, double alpha2) {
    if (!pair.is_pair()) throw ConfigError("flux diagnostics need a coexistence pair");
    FluxDiagnostics fd;
    fd.A = face_fluxes(pair.u, d1, alpha1);
    fd.B = face_fluxes(pair.v, d2, alpha2);
    fd.sign_runs_A = sign_runs(fd.A);
    fd.sign_runs_B = sign_runs(fd.B);
    return fd;
}

namespace {

void pair_residual(const CompetitionSystem& sys, const std::vector<double>& z, std::vector<double>& F) {
    const std::size_t N = sys.grid().size();
    std::vector<double> u(N), v(N), Lu(N), Lv(N), Ru(N), Rv(N);
    for (std::size_t k = 0; k < N; ++k) {
        u[k] = z[2 * k];
        v[k] = z[2 * k + 1];
    }
    const auto& kt = kernels::active();
    const auto& ru = sys.reactions.u;
    const auto& rv = sys.reactions.v;
    kt.logistic_rate(N, u.data(), v.data(), ru.growth.values.data(), ru.capacity.values.data(), ru.harvest, Ru.data());
    kt.logistic_rate(N, v.data(), u.data(), rv.growth.values.data(), rv.capacity.values.data(), rv.harvest, Rv.data());
    sys.transport_u.apply(u, Lu);
    sys.transport_v.apply(v, Lv);
    for (std::size_t k = 0; k < N; ++k) {
        F[2 * k] = Lu[k] + Ru[k];
        F[2 * k + 1] = Lv[k] + Rv[k];
    }
}

BandedMatrix pair_jacobian(const CompetitionSystem& sys, const std::vector<double>& z) {
    const std::size_t N = sys.grid().size();
    const std::size_t bw = 2 * sys.transport_u.bandwidth();
    BandedMatrix J(2 * N, bw, bw);
    for (int s = 0; s < 2; ++s) {
        const TransportOperator& L = s == 0 ? sys.transport_u : sys.transport_v;
        for (std::size_t q = 0; q < L.offsets.size(); ++q)
            for (std::size_t i = 0; i < N; ++i) {
                long j = static_cast<long>(i) + L.offsets[q];
                if (j < 0 || j >= static_cast<long>(N)) continue;
                J.add(2 * i + s, 2 * static_cast<std::size_t>(j) + s, L.diagonals[q][i]);
            }
    }
    const auto& ru = sys.reactions.u;
    const auto& rv = sys.reactions.v;
    for (std::size_t k = 0; k < N; ++k) {
        const double u = z[2 * k], v = z[2 * k + 1];
        J.add(2 * k, 2 * k, ru.growth[k] * ((1.0 - (2.0 * u + v) / ru.capacity[k]) - ru.harvest));
        J.add(2 * k, 2 * k + 1, -ru.growth[k] * u / ru.capacity[k]);
        J.add(2 * k + 1, 2 * k + 1, rv.growth[k] * ((1.0 - (2.0 * v + u) / rv.capacity[k]) - rv.harvest));
        J.add(2 * k + 1, 2 * k, -rv.growth[k] * v / rv.capacity[k]);
    }
    return J;
}

}  // namespace

double coexistence_residual(const CompetitionSystem& sys, const Field& u, const Field& v) {
    const std::size_t N = u.size();
    std::vector<double> z(2 * N), F(2 * N);
    for (std::size_t k = 0; k < N; ++k) {
        z[2 * k] = u[k];
        z[2 * k + 1] = v[k];
    }
    pair_residual(sys, z, F);
    return max_abs(F);
}

CoexistenceResult solve_coexistence(const CompetitionSystem& sys, const Field& guess_u, const Field& guess_v,
                                    const CoexistenceOptions& opts) {
    const Grid& grid = sys.grid();
    const std::size_t N = grid.size();
    if (guess_u.size() != N || guess_v.size() != N) throw ConfigError("coexistence guess does not match the grid");
    const double op_norm = std::max(sys.transport_u.norm_inf(), sys.transport_v.norm_inf()) +
                           std::max(reaction_scale(sys.reactions.u), reaction_scale(sys.reactions.v));
    std::vector<double> z(2 * N);
    for (std::size_t k = 0; k < N; ++k) {
        z[2 * k] = guess_u[k];
        z[2 * k + 1] = guess_v[k];
    }
    auto tolerance = [&](const std::vector<double>& x) { return floor_tolerance(opts.tol, op_norm, max_abs(x)); };
    NewtonOutcome nt = damped_newton(
        z, [&](const std::vector<double>& x, std::vector<double>& F) { pair_residual(sys, x, F); },
        [&](const std::vector<double>& x) { return pair_jacobian(sys, x); }, tolerance, opts.max_iter);

    CoexistenceResult res;
    res.u_final = Field(grid);
    res.v_final = Field(grid);
    for (std::size_t k = 0; k < N; ++k) {
        res.u_final[k] = z[2 * k];
        res.v_final[k] = z[2 * k + 1];
    }
    res.residual = nt.residual;
    res.iterations = nt.iterations;
    res.near_singular = nt.singular || nt.pivot_ratio < opts.near_singular_ratio;
    if (nt.singular) {
        res.status = "singular";
        return res;
    }
    if (!nt.converged) {
        res.status = "no-convergence";
        return res;
    }
    const double cap = std::max(sys.reactions.u.capacity.max(), sys.reactions.v.capacity.max());
    const double floor = 1e-8 * cap;
    const bool u_pos = res.u_final.min() > floor;
    const bool v_pos = res.v_final.min() > floor;
    const bool u_zero = res.u_final.max_abs() <= floor;
    const bool v_zero = res.v_final.max_abs() <= floor;
    if (u_pos && v_pos) {
        SteadyState st;
        st.u = res.u_final;
        st.v = res.v_final;
        st.residual = nt.residual;
        st.tolerance = tolerance(z);
        st.method = SteadyMethod::newton;
        st.iterations = nt.iterations;
        st.near_singular = res.near_singular;
        res.pair = std::move(st);
        res.status = "pair";
    } else if (u_zero && v_zero) {
        res.status = "zero";
    } else if (v_zero) {
        res.status = "semi-trivial-u";
    } else if (u_zero) {
        res.status = "semi-trivial-v";
    } else {
        res.status = "not-positive";
    }
    return res;
}

IdentityResiduals coexistence_identities(const SteadyState& pair, const CompetitionSystem& sys, double x_lo,
                                         double x_hi) {
    if (!pair.is_pair()) throw ConfigError("identity check needs a coexistence pair");
    const Grid& g = pair.u.grid;
    if (g.dim != 1) throw ConfigError("identity check is implemented for 1D grids");
    auto face_index = [&](double x) {
        double s = (x - g.a) / g.h;
        long i = std::lround(s);
        if (std::fabs(s - static_cast<double>(i)) > 1e-9 || i < 0 || i > g.n)
            throw ConfigError("identity endpoints must lie on cell faces inside the domain");
        return static_cast<int>(i);
    };
    const int i0 = face_index(x_lo), i1 = face_index(x_hi);
    if (i0 >= i1) throw ConfigError("identity endpoints must satisfy x_lo < x_hi");
    const int n = g.n;
    const double h = g.h;
    const double d1 = sys.transport_u.d, a1 = sys.transport_u.alpha;
    const double d2 = sys.transport_v.d, a2 = sys.transport_v.alpha;

    // Face values and slopes; at boundary faces the value is extrapolated and the slope
    // comes from the no-flux condition, so the flux there is zero.
    auto faces = [&](const Field& f, double d, double alpha, std::vector<double>& val, std::vector<double>& dx) {
        val.assign(n + 1, 0.0);
        dx.assign(n + 1, 0.0);
        for (int i = 1; i < n; ++i) {
            val[i] = (f[i - 1] + f[i]) / 2.0;
            dx[i] = (f[i] - f[i - 1]) / h;
        }
        val[0] = (3.0 * f[0] - f[1]) / 2.0;
        val[n] = (3.0 * f[n - 1] - f[n - 2]) / 2.0;
        dx[0] = alpha / d * val[0];
        dx[n] = alpha / d * val[n];
    };
    std::vector<double> uf, ux, vf, vx;
    faces(pair.u, d1, a1, uf, ux);
    faces(pair.v, d2, a2, vf, vx);
    std::vector<double> A(n + 1, 0.0), B(n + 1, 0.0);
    for (int i = 1; i < n; ++i) {
        A[i] = d1 * ux[i] - a1 * uf[i];
        B[i] = d2 * vx[i] - a2 * vf[i];
    }
    auto xf = [&](int i) { return g.a + i * h; };
    auto E = [&](int i) { return std::exp(-a1 / d1 * xf(i)); };
    auto Fw = [&](int i) { return std::exp(-a2 / d2 * xf(i)); };

    IdentityResiduals r;
    double su = 0.0, sv = 0.0;
    for (int i = i0; i <= i1; ++i) {
        double w = (i == i0 || i == i1) ? h / 2.0 : h;
        su += w * E(i) * A[i] * ((d1 - d2) * vx[i] - (a1 - a2) * vf[i]);
        sv += w * Fw(i) * B[i] * ((d1 - d2) * ux[i] - (a1 - a2) * uf[i]);
    }
    r.lhs_u = su / d1;
    r.lhs_v = sv / d2;
    auto bu = [&](int i) { return A[i] * E(i) * vf[i] - B[i] * E(i) * uf[i]; };
    auto bv = [&](int i) { return A[i] * Fw(i) * vf[i] - B[i] * Fw(i) * uf[i]; };
    r.rhs_u = bu(i1) - bu(i0);
    r.rhs_v = bv(i1) - bv(i0);
    r.residual_u = std::fabs(r.lhs_u - r.rhs_u);
    r.residual_v = std::fabs(r.lhs_v - r.rhs_v);

    std::vector<double> T(n, 0.0), S(n, 0.0);
    for (int i = 1; i + 1 < n; ++i) {
        T[i] = (pair.u[i + 1] - pair.u[i - 1]) / (2.0 * h) / pair.u[i];
        S[i] = (pair.v[i + 1] - pair.v[i - 1]) / (2.0 * h) / pair.v[i];
    }
    const auto& ru = sys.reactions.u;
    const auto& rv = sys.reactions.v;
    double worst = 0.0;
    for (int i = 2; i + 2 < n; ++i) {
        double Tx = (T[i + 1] - T[i - 1]) / (2.0 * h);
        double Sx = (S[i + 1] - S[i - 1]) / (2.0 * h);
        double s = pair.u[i] + pair.v[i];
        double fu = ru.growth[i] * ((1.0 - s / ru.capacity[i]) - ru.harvest);
        double fv = rv.growth[i] * ((1.0 - s / rv.capacity[i]) - rv.harvest);
        double lhs = -d1 * Tx + a1 * T[i] - d1 * T[i] * T[i];
        double rhs = -d2 * Sx + a2 * S[i] - d2 * S[i] * S[i];
        worst = std::max(worst, std::fabs((lhs - rhs) - (fu - fv)));
    }
    r.log_derivative = worst;
    return r;
}

std::string to_string(SteadyMethod m) {
    switch (m) {
        case SteadyMethod::long_time: return "long-time";
        case SteadyMethod::newton: return "newton";
        case SteadyMethod::hybrid: return "hybrid";
    }
    return "hybrid";
}

}  // namespace riverlv
