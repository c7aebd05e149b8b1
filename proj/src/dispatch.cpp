#include "windgrid/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "windgrid/errors.hpp"

namespace windgrid {

namespace {

struct Unit {
    std::size_t gen_index;
    double pmin, pmax;
    double c2, c1;
};

// Total output of all units at marginal cost lambda.
double total_at_lambda(const std::vector<Unit>& units, double lambda) {
    double total = 0.0;
    for (const Unit& u : units) {
        double p;
        if (u.c2 > 0.0) {
            p = std::clamp((lambda - u.c1) / (2.0 * u.c2), u.pmin, u.pmax);
        } else {
            p = lambda < u.c1 ? u.pmin : u.pmax;  // step at the marginal price
        }
        total += p;
    }
    return total;
}

// Equal-incremental-cost dispatch of `demand` MW across the units.
// Returns per-unit outputs and the marginal cost.
std::vector<double> economic_dispatch(const std::vector<Unit>& units, double demand,
                                      double* lambda_out) {
    double pmin_sum = 0.0, pmax_sum = 0.0;
    for (const Unit& u : units) {
        pmin_sum += u.pmin;
        pmax_sum += u.pmax;
    }
    if (demand > pmax_sum) {
        std::ostringstream os;
        os << "dispatch infeasible: demand " << demand << " MW exceeds total capacity "
           << pmax_sum << " MW";
        throw Error::numerical(os.str());
    }
    if (demand < pmin_sum) {
        std::ostringstream os;
        os << "dispatch infeasible: demand " << demand << " MW below total minimum output "
           << pmin_sum << " MW";
        throw Error::numerical(os.str());
    }

    double lo = units.front().c1, hi = units.front().c1;
    for (const Unit& u : units) {
        lo = std::min({lo, u.c1, u.c1 + 2.0 * u.c2 * u.pmin});
        hi = std::max({hi, u.c1, u.c1 + 2.0 * u.c2 * u.pmax});
    }
    lo -= 1.0;
    hi += 1.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * (1.0 + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (total_at_lambda(units, mid) < demand)
            lo = mid;
        else
            hi = mid;
    }
    const double lambda = 0.5 * (lo + hi);
    if (lambda_out) *lambda_out = lambda;

    std::vector<double> p(units.size());
    for (std::size_t i = 0; i < units.size(); ++i) {
        const Unit& u = units[i];
        if (u.c2 > 0.0)
            p[i] = std::clamp((lambda - u.c1) / (2.0 * u.c2), u.pmin, u.pmax);
        else
            p[i] = lambda < u.c1 ? u.pmin : u.pmax;
    }
    // Close the residual exactly on units that still have headroom (handles
    // zero-curvature marginal units and bisection round-off).
    double residual = demand - std::accumulate(p.begin(), p.end(), 0.0);
    for (int pass = 0; pass < 64 && std::abs(residual) > 1e-12 * (1.0 + demand); ++pass) {
        std::size_t movable = 0;
        for (std::size_t i = 0; i < units.size(); ++i)
            if ((residual > 0.0 && p[i] < units[i].pmax) ||
                (residual < 0.0 && p[i] > units[i].pmin))
                ++movable;
        if (movable == 0) break;
        const double step = residual / static_cast<double>(movable);
        for (std::size_t i = 0; i < units.size(); ++i) {
            if (!((residual > 0.0 && p[i] < units[i].pmax) ||
                  (residual < 0.0 && p[i] > units[i].pmin)))
                continue;
            const double np = std::clamp(p[i] + step, units[i].pmin, units[i].pmax);
            residual -= np - p[i];
            p[i] = np;
        }
    }
    return p;
}

std::vector<Unit> make_units(const NetworkCase& net) {
    std::vector<Unit> units;
    for (std::size_t g = 0; g < net.generators.size(); ++g) {
        const Generator& gen = net.generators[g];
        if (!gen.in_service) continue;
        Unit u;
        u.gen_index = g;
        u.pmin = gen.pmin;
        u.pmax = gen.pmax;
        if (net.costs.empty()) {
            u.c2 = 0.01;  // identical curves -> equal sharing
            u.c1 = 10.0;
        } else {
            u.c2 = net.costs[g].c2;
            u.c1 = net.costs[g].c1;
        }
        units.push_back(u);
    }
    if (units.empty()) throw Error::input("case has no in-service generators");
    return units;
}

}  // namespace

void scaled_loads(const NetworkCase& net, double load_fraction,
                  const std::vector<double>& load_allocation, std::vector<double>& pd,
                  std::vector<double>& qd) {
    if (!(load_fraction > 0.0 && load_fraction <= 150.0))
        throw Error::input("load fraction must lie in (0, 150] percent");
    const std::size_t n = net.buses.size();
    pd.resize(n);
    qd.resize(n);
    const double f = load_fraction / 100.0;

    if (load_allocation.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
            pd[i] = net.buses[i].pd * f;
            qd[i] = net.buses[i].qd * f;
        }
        return;
    }

    if (load_allocation.size() != n)
        throw Error::input("load allocation size does not match bus count");
    double wsum = 0.0, total_pd = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(load_allocation[i] >= 0.0))
            throw Error::input("load allocation weights must be non-negative");
        wsum += load_allocation[i];
        total_pd += net.buses[i].pd;
    }
    if (std::abs(wsum - 1.0) > 1e-9)
        throw Error::input("load allocation weights must sum to 1");
    for (std::size_t i = 0; i < n; ++i) {
        const Bus& b = net.buses[i];
        if (load_allocation[i] > 0.0 && b.pd <= 0.0)
            throw Error::input("load allocation places weight on bus " +
                               std::to_string(b.id) + " which has no base active load");
        pd[i] = total_pd * f * load_allocation[i];
        qd[i] = b.pd > 0.0 ? pd[i] * (b.qd / b.pd) : b.qd * f;
    }
}

DispatchResult dispatch_opf(const NetworkCase& net, double load_fraction,
                            const std::vector<double>& load_allocation,
                            const DispatchOptions& opts, const PFSolution* warm) {
    const std::vector<Unit> units = make_units(net);

    DispatchResult result;
    std::vector<double> pd, qd;
    scaled_loads(net, load_fraction, load_allocation, pd, qd);
    result.demand_mw = std::accumulate(pd.begin(), pd.end(), 0.0);

    SolveSpec spec;
    spec.gen_model = GenModel::voltage_controlled;
    spec.pd = pd;
    spec.qd = qd;
    spec.pg.assign(net.generators.size(), 0.0);
    if (warm && warm->converged) {
        spec.vm0 = &warm->vm;
        spec.va0 = &warm->va;
    }

    double losses = 0.0;
    double prev_total = -1.0;
    for (int round = 0; round < opts.max_loss_rounds; ++round) {
        const double target = result.demand_mw + losses;
        const std::vector<double> p = economic_dispatch(units, target, &result.lambda);
        double total = 0.0;
        std::fill(spec.pg.begin(), spec.pg.end(), 0.0);
        for (std::size_t i = 0; i < units.size(); ++i) {
            spec.pg[units[i].gen_index] = p[i];
            total += p[i];
        }

        result.flow = solve_acpf(net, spec, opts.pf);
        losses = result.flow.losses_mw;
        result.loss_rounds = round + 1;
        // Warm-start subsequent rounds from the newest solution.
        spec.vm0 = &result.flow.vm;
        spec.va0 = &result.flow.va;

        if (prev_total >= 0.0 &&
            std::abs(total - prev_total) < opts.closure_tol_pu * net.base_mva)
            break;
        prev_total = total;
        if (round + 1 >= opts.max_loss_rounds)
            throw Error::numerical("dispatch loss iteration did not settle after " +
                                   std::to_string(opts.max_loss_rounds) + " rounds");
    }

    result.pg = spec.pg;
    result.qg = result.flow.gen_qg;
    result.losses_mw = losses;
    return result;
}

DispatchSchedule build_dispatch_schedule(const NetworkCase& net, const std::string& label,
                                         const std::array<double, 48>& percent_of_peak,
                                         const std::vector<double>& load_allocation,
                                         const DispatchOptions& opts) {
    DispatchSchedule sched;
    sched.label = label;
    sched.percent_of_peak.assign(percent_of_peak.begin(), percent_of_peak.end());
    sched.pg.resize(48);
    sched.qg.resize(48);
    sched.load_mw.resize(48);
    sched.losses_mw.resize(48);
    sched.pd_factor.resize(48);
    sched.vm.resize(48);
    sched.va.resize(48);

    PFSolution warm;
    for (int h = 0; h < 48; ++h) {
        try {
            const DispatchResult r =
                dispatch_opf(net, percent_of_peak[static_cast<std::size_t>(h)],
                             load_allocation, opts, warm.converged ? &warm : nullptr);
            sched.pg[static_cast<std::size_t>(h)] = r.pg;
            sched.qg[static_cast<std::size_t>(h)] = r.qg;
            sched.load_mw[static_cast<std::size_t>(h)] = r.demand_mw;
            sched.losses_mw[static_cast<std::size_t>(h)] = r.losses_mw;
            sched.pd_factor[static_cast<std::size_t>(h)] =
                percent_of_peak[static_cast<std::size_t>(h)] / 100.0;
            sched.vm[static_cast<std::size_t>(h)] = r.flow.vm;
            sched.va[static_cast<std::size_t>(h)] = r.flow.va;
            warm = r.flow;
        } catch (const Error& e) {
            throw Error(e.kind(), label + " slot " + std::to_string(h) + ": " + e.what());
        }
    }
    return sched;
}

}  // namespace windgrid
