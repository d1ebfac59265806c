#pragma once

#include "riverlv/model.hpp"
#include "riverlv/timestepper.hpp"
#include "riverlv/transport.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace riverlv {

enum class SteadyMethod { long_time, newton, hybrid };

struct SteadyState {
    Field u;
    Field v;  // empty for a single-species state
    double residual = 0.0;
    // Tolerance actually enforced: the requested one, raised to the rounding floor of the
    // discrete operator when that is larger.
    double tolerance = 0.0;
    SteadyMethod method = SteadyMethod::hybrid;
    std::size_t iterations = 0;
    bool near_singular = false;

    bool is_pair() const { return v.size() != 0; }
};

struct SteadyOptions {
    double tol = 1e-10;
    SteadyMethod method = SteadyMethod::hybrid;
    double dt = 0.0;               // long-time step, 0 selects min(dt_max, 0.1)
    double presolve_time = 200.0;  // cap on the long-time phase before Newton in hybrid mode
    double long_time_max = 1e5;    // cap on pure long-time integration
    int newton_max_iter = 50;
    std::optional<Field> guess;    // Newton start; defaults to capacity*(1-harvest)
};

// L u + growth*u*((1 - u/capacity) - harvest), the stationary residual with the competitor absent.
Field stationary_residual(const TransportOperator& L, const SpeciesReaction& R, const Field& u);

SteadyState solve_single_steady(const TransportOperator& L, const SpeciesReaction& R, const SteadyOptions& opts = {});

struct CapacityIntegralReport {
    double integral = 0.0;          // sum h r K1 (1 - u/K1)
    double squared_integral = 0.0;  // sum h r K1 (1 - u/K1)^2
    bool degenerate = false;        // K1 constant: the identity reads 0 = 0
};

CapacityIntegralReport capacity_integral(const SteadyState& star, const EffectiveParams& eff);

struct LogDerivativeReport {
    Field T;             // central-difference u_x/u, zero on the cells without two neighbours along x
    double bound = 0.0;  // alpha/d
    double band = 0.0;   // 10 h^2
    double t_min = 0.0;
    double t_max = 0.0;
    std::size_t violations = 0;
    std::size_t checked = 0;
};

LogDerivativeReport log_derivative_bounds(const Field& star, double d, double alpha);

struct FluxDiagnostics {
    std::vector<double> A;  // d1 u_x - alpha1 u on the faces along x
    std::vector<double> B;  // d2 v_x - alpha2 v
    std::vector<std::pair<int, int>> sign_runs_A;  // (sign, run length)
    std::vector<std::pair<int, int>> sign_runs_B;
};

FluxDiagnostics flux_diagnostics(const SteadyState& pair, double d1, double alpha1, double d2, double alpha2);

struct CoexistenceOptions {
    double tol = 1e-10;
    int max_iter = 50;
    double near_singular_ratio = 1e-9;
};

struct CoexistenceResult {
    std::optional<SteadyState> pair;
    std::string status;  // "pair", "semi-trivial-u", "semi-trivial-v", "zero", "no-convergence", "singular"
    Field u_final;
    Field v_final;
    double residual = 0.0;
    std::size_t iterations = 0;
    bool near_singular = false;
};

CoexistenceResult solve_coexistence(const CompetitionSystem& sys, const Field& guess_u, const Field& guess_v,
                                    const CoexistenceOptions& opts = {});
// Residual of the coupled stationary system at (u, v), max norm over both blocks.
double coexistence_residual(const CompetitionSystem& sys, const Field& u, const Field& v);

struct IdentityResiduals {
    // First identity: (1/d1) int E A [(d1-d2) v_x - (a1-a2) v] = [A E v - B E u], E = exp(-a1 x/d1).
    double lhs_u = 0.0, rhs_u = 0.0;
    // Second identity: (1/d2) int F B [(d1-d2) u_x - (a1-a2) u] = [A F v - B F u], F = exp(-a2 x/d2).
    double lhs_v = 0.0, rhs_v = 0.0;
    double residual_u = 0.0;
    double residual_v = 0.0;
    // max |(-d1 T_x + a1 T - d1 T^2) - (-d2 S_x + a2 S - d2 S^2) - (f_u - f_v)| over interior cells,
    // with T = u_x/u, S = v_x/v and f the per-capita growth.
    double log_derivative = 0.0;
};

// 1D only; x_lo < x_hi must sit on cell faces.
IdentityResiduals coexistence_identities(const SteadyState& pair, const CompetitionSystem& sys, double x_lo,
                                         double x_hi);

std::string to_string(SteadyMethod m);

}  // namespace riverlv
