#pragma once

#include <vector>

#include <Eigen/SparseCore>

#include "windgrid/network.hpp"

namespace windgrid {

struct PFOptions {
    double tol = 1e-8;  // max |P,Q| mismatch, p.u.
    int max_iter = 30;
    bool enforce_q_limits = true;
    int max_qlimit_rounds = 10;
};

// How generator buses are modeled.
enum class GenModel {
    voltage_controlled,  // PV buses hold their setpoint magnitude, Q floats
    fixed_injection,     // every non-slack bus is PQ with fixed P and Q
};

struct SolveSpec {
    GenModel gen_model = GenModel::voltage_controlled;
    // Per-bus loads (MW / MVAr), case order; empty means use the case base values.
    std::vector<double> pd;
    std::vector<double> qd;
    // Per-generator injections (MW / MVAr), case order; empty means use the
    // case setpoints. qg participates only under fixed_injection.
    std::vector<double> pg;
    std::vector<double> qg;
    // Warm start (p.u. magnitudes, radian angles), case order. PV and slack
    // magnitudes are still pinned to their setpoints.
    const std::vector<double>* vm0 = nullptr;
    const std::vector<double>* va0 = nullptr;
};

struct PFSolution {
    std::vector<double> vm;  // p.u.
    std::vector<double> va;  // rad; slack angle is 0 exactly
    std::vector<double> gen_pg;  // MW, per generator in case order
    std::vector<double> gen_qg;  // MVAr
    bool converged = false;
    int iterations = 0;          // mismatch evaluations across all rounds
    double max_mismatch = 0.0;   // p.u., at the last evaluation
    int qlimit_rounds = 0;       // PV->PQ switching rounds taken
    std::vector<double> mismatch_trace;  // max mismatch per evaluation
    double losses_mw = 0.0;      // total injected real power at the solution
};

// Newton–Raphson AC power flow in polar coordinates over the full admittance
// model. Returns with converged = false on divergence; throws Error::numerical
// when the Jacobian cannot be factorized and Error::input for invalid specs.
PFSolution solve_power_flow(const NetworkCase& net, const SolveSpec& spec,
                            const PFOptions& opts = {});

// Same, but divergence raises Error::numerical carrying the mismatch trace.
PFSolution solve_acpf(const NetworkCase& net, const SolveSpec& spec,
                      const PFOptions& opts = {});

// Mismatch vector and analytic Jacobian at a fixed state for the spec's bus
// typing (no Q-limit handling); exposed so tests can check the Jacobian
// against finite differences of the mismatch.
struct JacobianProbe {
    Eigen::VectorXd f;                 // [dP at pv+pq; dQ at pq]
    Eigen::SparseMatrix<double> jac;   // d f / d [va at pv+pq; vm at pq]
    std::vector<int> pvpq;             // bus indices of the angle unknowns
    std::vector<int> pq;               // bus indices of the magnitude unknowns
};
JacobianProbe probe_jacobian(const NetworkCase& net, const SolveSpec& spec,
                             const std::vector<double>& vm, const std::vector<double>& va);

}  // namespace windgrid
