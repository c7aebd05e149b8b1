#pragma once

#include <string>
#include <vector>

#include "windgrid/load_profiles.hpp"
#include "windgrid/network.hpp"
#include "windgrid/powerflow.hpp"

namespace windgrid {

struct DispatchOptions {
    PFOptions pf;
    double closure_tol_pu = 1e-6;  // |change in total dispatched P| between loss rounds
    int max_loss_rounds = 30;
};

// One operating point: equal-incremental-cost dispatch iterated with AC
// power-flow losses until the total dispatched power settles.
struct DispatchResult {
    std::vector<double> pg;  // MW per generator, case order (0 for out-of-service)
    std::vector<double> qg;  // MVAr, from the converged power flow
    PFSolution flow;         // power flow at the final dispatch
    double lambda = 0.0;     // marginal cost at the solution, cost units per MWh
    double demand_mw = 0.0;  // scaled system load
    double losses_mw = 0.0;
    int loss_rounds = 0;
};

// Scales bus loads to `load_fraction` percent of the base case (optionally
// redistributed by per-bus weights summing to 1) and dispatches generation.
// load_fraction must lie in (0, 150]. Throws Error::numerical when the demand
// cannot be met within generator limits.
DispatchResult dispatch_opf(const NetworkCase& net, double load_fraction,
                            const std::vector<double>& load_allocation = {},
                            const DispatchOptions& opts = {},
                            const PFSolution* warm = nullptr);

// Per-slot generator injections for one driving profile (a season or the
// annual pseudo-season).
struct DispatchSchedule {
    std::string label;
    std::vector<double> percent_of_peak;     // 48 driving values
    std::vector<std::vector<double>> pg;     // [slot][generator], MW
    std::vector<std::vector<double>> qg;     // [slot][generator], MVAr
    std::vector<double> load_mw;             // scaled system load per slot
    std::vector<double> losses_mw;           // converged losses per slot
    std::vector<double> pd_factor;           // per-slot multiplier on base Pd/Qd
    std::vector<std::vector<double>> vm;     // [slot][bus] dispatched-point voltages
    std::vector<std::vector<double>> va;     // [slot][bus] angles, rad
};

// Runs dispatch_opf at every slot (warm-starting each from the previous
// slot); errors name the failing slot.
DispatchSchedule build_dispatch_schedule(const NetworkCase& net, const std::string& label,
                                         const std::array<double, 48>& percent_of_peak,
                                         const std::vector<double>& load_allocation = {},
                                         const DispatchOptions& opts = {});

// Per-bus load vectors for a given fraction/allocation; shared by dispatch
// and the scanner so both scale loads identically.
void scaled_loads(const NetworkCase& net, double load_fraction,
                  const std::vector<double>& load_allocation, std::vector<double>& pd,
                  std::vector<double>& qd);

}  // namespace windgrid
