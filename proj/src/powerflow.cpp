#include "windgrid/powerflow.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/SparseLU>

#include "windgrid/errors.hpp"
#include "windgrid/kernels.hpp"

namespace windgrid {

namespace {

using cd = std::complex<double>;

constexpr int kKindPq = 0;
constexpr int kKindPv = 1;
constexpr int kKindSlack = 2;

struct BusGens {
    double pg = 0.0;  // MW
    double qg = 0.0;  // MVAr
    double qmin = 0.0;
    double qmax = 0.0;
    double vs = 1.0;
    int count = 0;
};

struct Context {
    int n = 0;
    int slack = 0;
    std::vector<int> kind;  // initial typing
    std::vector<double> pd, qd;  // MW / MVAr
    std::vector<BusGens> gens;
    Eigen::VectorXcd sbus;  // scheduled net injection, p.u.
    Eigen::SparseMatrix<cd> ybus;
    double base = 100.0;
};

Context make_context(const NetworkCase& net, const SolveSpec& spec) {
    validate_case(net);
    Context ctx;
    ctx.n = static_cast<int>(net.buses.size());
    ctx.base = net.base_mva;
    ctx.ybus = build_ybus(net);

    if (!spec.pd.empty() && spec.pd.size() != net.buses.size())
        throw Error::input("pd override size does not match bus count");
    if (!spec.qd.empty() && spec.qd.size() != net.buses.size())
        throw Error::input("qd override size does not match bus count");
    if (!spec.pg.empty() && spec.pg.size() != net.generators.size())
        throw Error::input("pg override size does not match generator count");
    if (!spec.qg.empty() && spec.qg.size() != net.generators.size())
        throw Error::input("qg override size does not match generator count");
    if (spec.vm0 && spec.vm0->size() != net.buses.size())
        throw Error::input("warm-start vm size does not match bus count");
    if (spec.va0 && spec.va0->size() != net.buses.size())
        throw Error::input("warm-start va size does not match bus count");

    ctx.pd.resize(static_cast<std::size_t>(ctx.n));
    ctx.qd.resize(static_cast<std::size_t>(ctx.n));
    for (int i = 0; i < ctx.n; ++i) {
        const Bus& b = net.buses[static_cast<std::size_t>(i)];
        ctx.pd[static_cast<std::size_t>(i)] = spec.pd.empty() ? b.pd : spec.pd[static_cast<std::size_t>(i)];
        ctx.qd[static_cast<std::size_t>(i)] = spec.qd.empty() ? b.qd : spec.qd[static_cast<std::size_t>(i)];
        if (b.type == BusType::slack) ctx.slack = i;
    }

    ctx.gens.assign(static_cast<std::size_t>(ctx.n), BusGens{});
    for (std::size_t g = 0; g < net.generators.size(); ++g) {
        const Generator& gen = net.generators[g];
        if (!gen.in_service) continue;
        const int i = net.bus_index(gen.bus);
        BusGens& agg = ctx.gens[static_cast<std::size_t>(i)];
        const double pg = spec.pg.empty() ? gen.pg : spec.pg[g];
        const double qg = spec.qg.empty() ? gen.qg : spec.qg[g];
        if (agg.count > 0 && std::abs(agg.vs - gen.vs) > 1e-9)
            throw Error::input("generators at bus " + std::to_string(gen.bus) +
                               " disagree on voltage setpoint");
        agg.pg += pg;
        agg.qg += qg;
        agg.qmin += gen.qmin;
        agg.qmax += gen.qmax;
        agg.vs = gen.vs;
        ++agg.count;
    }

    ctx.kind.assign(static_cast<std::size_t>(ctx.n), kKindPq);
    ctx.sbus.resize(ctx.n);
    for (int i = 0; i < ctx.n; ++i) {
        const Bus& b = net.buses[static_cast<std::size_t>(i)];
        const BusGens& agg = ctx.gens[static_cast<std::size_t>(i)];
        int kind = kKindPq;
        if (i == ctx.slack) {
            kind = kKindSlack;
        } else if (spec.gen_model == GenModel::voltage_controlled &&
                   b.type == BusType::pv && agg.count > 0) {
            kind = kKindPv;
            if (agg.vs < b.vmin || agg.vs > b.vmax)
                throw Error::input("voltage setpoint at bus " + std::to_string(b.id) +
                                   " lies outside its [Vmin, Vmax] band");
        }
        ctx.kind[static_cast<std::size_t>(i)] = kind;
        const double p = (agg.pg - ctx.pd[static_cast<std::size_t>(i)]) / ctx.base;
        const double q = (agg.qg - ctx.qd[static_cast<std::size_t>(i)]) / ctx.base;
        ctx.sbus(i) = cd(p, q);
    }
    return ctx;
}

Eigen::VectorXcd make_voltage(const std::vector<double>& vm, const std::vector<double>& va) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(vm.size()));
    for (std::size_t i = 0; i < vm.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = cd(vm[i] * std::cos(va[i]), vm[i] * std::sin(va[i]));
    return v;
}

// Mismatch vector and (optionally) the analytic Jacobian at the given state.
void evaluate(const Context& ctx, const std::vector<int>& kind,
              const Eigen::VectorXcd& sbus, const std::vector<double>& vm,
              const std::vector<double>& va, const std::vector<int>& pvpq,
              const std::vector<int>& pq, Eigen::VectorXd& f,
              Eigen::SparseMatrix<double>* jac, Eigen::VectorXcd* s_calc_out) {
    const int n = ctx.n;
    const int npvpq = static_cast<int>(pvpq.size());
    const int npq = static_cast<int>(pq.size());

    std::vector<int> row_p(static_cast<std::size_t>(n), -1);
    std::vector<int> row_q(static_cast<std::size_t>(n), -1);
    std::vector<int> col_va(static_cast<std::size_t>(n), -1);
    std::vector<int> col_vm(static_cast<std::size_t>(n), -1);
    for (int k = 0; k < npvpq; ++k) {
        row_p[static_cast<std::size_t>(pvpq[static_cast<std::size_t>(k)])] = k;
        col_va[static_cast<std::size_t>(pvpq[static_cast<std::size_t>(k)])] = k;
    }
    for (int k = 0; k < npq; ++k) {
        row_q[static_cast<std::size_t>(pq[static_cast<std::size_t>(k)])] = npvpq + k;
        col_vm[static_cast<std::size_t>(pq[static_cast<std::size_t>(k)])] = npvpq + k;
    }

    const Eigen::VectorXcd v = make_voltage(vm, va);
    const Eigen::VectorXcd ibus = ctx.ybus * v;
    Eigen::VectorXcd s_calc(n);
    for (int i = 0; i < n; ++i) s_calc(i) = v(i) * std::conj(ibus(i));
    if (s_calc_out) *s_calc_out = s_calc;

    f.resize(npvpq + npq);
    for (int k = 0; k < npvpq; ++k) {
        const int i = pvpq[static_cast<std::size_t>(k)];
        f(k) = std::real(s_calc(i) - sbus(i));
    }
    for (int k = 0; k < npq; ++k) {
        const int i = pq[static_cast<std::size_t>(k)];
        f(npvpq + k) = std::imag(s_calc(i) - sbus(i));
    }
    (void)kind;

    if (!jac) return;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(ctx.ybus.nonZeros()) * 4);
    for (int j = 0; j < ctx.ybus.outerSize(); ++j) {
        for (Eigen::SparseMatrix<cd>::InnerIterator it(ctx.ybus, j); it; ++it) {
            const int i = static_cast<int>(it.row());
            const cd yij = it.value();
            // dS_i/dVa_j and dS_i/dVm_j of the injection S = V .* conj(Y V).
            cd dva = cd(0.0, 1.0) * v(i) * std::conj(-yij * v(j));
            cd dvm = v(i) * std::conj(yij) * std::conj(v(j)) /
                     std::max(vm[static_cast<std::size_t>(j)], 1e-300);
            if (i == j) {
                dva += cd(0.0, 1.0) * v(i) * std::conj(ibus(i));
                dvm += std::conj(ibus(i)) * v(i) / std::max(vm[static_cast<std::size_t>(i)], 1e-300);
            }
            const int rp = row_p[static_cast<std::size_t>(i)];
            const int rq = row_q[static_cast<std::size_t>(i)];
            const int cva = col_va[static_cast<std::size_t>(j)];
            const int cvm = col_vm[static_cast<std::size_t>(j)];
            if (rp >= 0 && cva >= 0) trip.emplace_back(rp, cva, std::real(dva));
            if (rp >= 0 && cvm >= 0) trip.emplace_back(rp, cvm, std::real(dvm));
            if (rq >= 0 && cva >= 0) trip.emplace_back(rq, cva, std::imag(dva));
            if (rq >= 0 && cvm >= 0) trip.emplace_back(rq, cvm, std::imag(dvm));
        }
    }
    jac->resize(npvpq + npq, npvpq + npq);
    jac->setFromTriplets(trip.begin(), trip.end());
}

void type_sets(const std::vector<int>& kind, std::vector<int>& pvpq, std::vector<int>& pq) {
    pvpq.clear();
    pq.clear();
    for (std::size_t i = 0; i < kind.size(); ++i) {
        if (kind[i] == kKindPv || kind[i] == kKindPq) pvpq.push_back(static_cast<int>(i));
        if (kind[i] == kKindPq) pq.push_back(static_cast<int>(i));
    }
}

}  // namespace

PFSolution solve_power_flow(const NetworkCase& net, const SolveSpec& spec,
                            const PFOptions& opts) {
    if (opts.tol <= 0.0 || opts.max_iter < 1)
        throw Error::input("power-flow options require tol > 0 and max_iter >= 1");
    Context ctx = make_context(net, spec);
    const int n = ctx.n;

    std::vector<int> kind = ctx.kind;
    Eigen::VectorXcd sbus = ctx.sbus;

    PFSolution sol;
    sol.vm.assign(static_cast<std::size_t>(n), 1.0);
    sol.va.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const std::size_t ui = static_cast<std::size_t>(i);
        if (kind[ui] == kKindPv) {
            sol.vm[ui] = ctx.gens[ui].vs;
        } else if (kind[ui] == kKindSlack) {
            sol.vm[ui] = ctx.gens[ui].count > 0 ? ctx.gens[ui].vs
                                                : net.buses[ui].vm;
        } else if (spec.vm0) {
            sol.vm[ui] = (*spec.vm0)[ui];
        }
        if (spec.va0 && kind[ui] != kKindSlack)
            sol.va[ui] = (*spec.va0)[ui] - (*spec.va0)[static_cast<std::size_t>(ctx.slack)];
    }
    sol.va[static_cast<std::size_t>(ctx.slack)] = 0.0;

    // -1: still PV; otherwise the bus was switched to PQ at +1 -> qmax, -1 -> qmin.
    std::vector<int> switched(static_cast<std::size_t>(n), 0);

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    std::vector<int> pvpq, pq;
    Eigen::VectorXd f;
    Eigen::SparseMatrix<double> jac;
    Eigen::VectorXcd s_calc;

    for (int round = 0;; ++round) {
        type_sets(kind, pvpq, pq);
        sol.converged = false;

        // Backtracking state: the last accepted point, the Newton direction
        // taken from it, and the current step fraction. A step whose mismatch
        // grows (or turns non-finite) is retried at half length a few times
        // before being accepted anyway; well-behaved cases always take full
        // steps and evaluate exactly once per iteration.
        Eigen::VectorXd dx;
        std::vector<double> vm_prev, va_prev;
        double accepted_maxm = std::numeric_limits<double>::infinity();
        double alpha = 1.0;
        int backtracks_left = 0;
        const auto apply_step = [&](double a) {
            const int npvpq = static_cast<int>(pvpq.size());
            sol.va = va_prev;
            sol.vm = vm_prev;
            for (int k = 0; k < npvpq; ++k)
                sol.va[static_cast<std::size_t>(pvpq[static_cast<std::size_t>(k)])] +=
                    a * dx(k);
            for (int k = 0; k < static_cast<int>(pq.size()); ++k)
                sol.vm[static_cast<std::size_t>(pq[static_cast<std::size_t>(k)])] +=
                    a * dx(npvpq + k);
        };

        for (int it = 0; it < opts.max_iter; ++it) {
            evaluate(ctx, kind, sbus, sol.vm, sol.va, pvpq, pq, f, &jac, &s_calc);
            const double maxm =
                f.size() == 0 ? 0.0 : kernels::max_abs(f.data(), static_cast<std::size_t>(f.size()));
            ++sol.iterations;
            sol.mismatch_trace.push_back(maxm);
            sol.max_mismatch = maxm;
            if (maxm < opts.tol) {
                sol.converged = true;
                break;
            }
            if (it + 1 >= opts.max_iter) break;  // budget exhausted, no point updating
            if (!(maxm <= accepted_maxm) && backtracks_left > 0) {
                alpha *= 0.5;
                --backtracks_left;
                apply_step(alpha);
                continue;  // re-evaluate the shortened step
            }
            if (!std::isfinite(maxm)) break;  // diverged beyond rescue
            lu.compute(jac);
            if (lu.info() != Eigen::Success)
                throw Error::numerical("power-flow jacobian is singular: " +
                                       std::string(lu.lastErrorMessage()));
            dx = lu.solve(-f);
            if (lu.info() != Eigen::Success)
                throw Error::numerical("power-flow jacobian solve failed");
            accepted_maxm = maxm;
            vm_prev = sol.vm;
            va_prev = sol.va;
            alpha = 1.0;
            backtracks_left = 8;
            apply_step(1.0);
        }
        if (!sol.converged) break;
        if (!opts.enforce_q_limits || spec.gen_model == GenModel::fixed_injection) break;
        if (round >= opts.max_qlimit_rounds) break;

        // PV buses whose aggregate generator reactive output left its limits
        // become PQ at the violated limit (one-way, all at once).
        int flips = 0;
        for (int i = 0; i < n; ++i) {
            const std::size_t ui = static_cast<std::size_t>(i);
            if (kind[ui] != kKindPv) continue;
            const BusGens& agg = ctx.gens[ui];
            const double qg_bus = std::imag(s_calc(i)) * ctx.base + ctx.qd[ui];
            double qfix = 0.0;
            if (qg_bus > agg.qmax + 1e-9) {
                qfix = agg.qmax;
                switched[ui] = +1;
            } else if (qg_bus < agg.qmin - 1e-9) {
                qfix = agg.qmin;
                switched[ui] = -1;
            } else {
                continue;
            }
            kind[ui] = kKindPq;
            sbus(i) = cd(std::real(sbus(i)), (qfix - ctx.qd[ui]) / ctx.base);
            ++flips;
        }
        if (flips == 0) break;
        ++sol.qlimit_rounds;
    }

    // Re-evaluate injections at the final state for outputs.
    type_sets(kind, pvpq, pq);
    evaluate(ctx, kind, sbus, sol.vm, sol.va, pvpq, pq, f, nullptr, &s_calc);

    double losses = 0.0;
    for (int i = 0; i < n; ++i) losses += std::real(s_calc(i));
    sol.losses_mw = losses * ctx.base;

    sol.gen_pg.assign(net.generators.size(), 0.0);
    sol.gen_qg.assign(net.generators.size(), 0.0);
    std::vector<std::vector<std::size_t>> bus_gens(static_cast<std::size_t>(n));
    for (std::size_t g = 0; g < net.generators.size(); ++g)
        if (net.generators[g].in_service)
            bus_gens[static_cast<std::size_t>(net.bus_index(net.generators[g].bus))].push_back(g);

    for (int i = 0; i < n; ++i) {
        const std::size_t ui = static_cast<std::size_t>(i);
        const auto& glist = bus_gens[ui];
        if (glist.empty()) continue;
        const auto setpoint_pg = [&](std::size_t g) {
            return spec.pg.empty() ? net.generators[g].pg : spec.pg[g];
        };
        const auto setpoint_qg = [&](std::size_t g) {
            return spec.qg.empty() ? net.generators[g].qg : spec.qg[g];
        };
        const double p_bus = std::real(s_calc(i)) * ctx.base + ctx.pd[ui];
        const double q_bus = std::imag(s_calc(i)) * ctx.base + ctx.qd[ui];

        if (kind[ui] == kKindSlack) {
            double rest = 0.0;
            for (std::size_t k = 1; k < glist.size(); ++k) {
                sol.gen_pg[glist[k]] = setpoint_pg(glist[k]);
                rest += setpoint_pg(glist[k]);
            }
            sol.gen_pg[glist[0]] = p_bus - rest;
        } else if (kind[ui] == kKindPq && spec.gen_model == GenModel::fixed_injection) {
            for (std::size_t g : glist) {
                sol.gen_pg[g] = setpoint_pg(g);
                sol.gen_qg[g] = setpoint_qg(g);
            }
            continue;
        } else {
            for (std::size_t g : glist) sol.gen_pg[g] = setpoint_pg(g);
        }

        if (switched[ui] != 0) {
            for (std::size_t g : glist)
                sol.gen_qg[g] =
                    switched[ui] > 0 ? net.generators[g].qmax : net.generators[g].qmin;
        } else if (glist.size() == 1) {
            sol.gen_qg[glist[0]] = q_bus;
        } else {
            // Split reactive power proportionally to each unit's Q range.
            double range = 0.0;
            for (std::size_t g : glist)
                range += net.generators[g].qmax - net.generators[g].qmin;
            for (std::size_t g : glist) {
                const double w =
                    range > 0.0
                        ? (net.generators[g].qmax - net.generators[g].qmin) / range
                        : 1.0 / static_cast<double>(glist.size());
                sol.gen_qg[g] = q_bus * w;
            }
        }
    }
    return sol;
}

PFSolution solve_acpf(const NetworkCase& net, const SolveSpec& spec, const PFOptions& opts) {
    PFSolution sol = solve_power_flow(net, spec, opts);
    if (!sol.converged) {
        std::ostringstream os;
        os << "power flow diverged after " << sol.iterations << " iterations ("
           << sol.qlimit_rounds << " q-limit rounds); mismatch trace:";
        const std::size_t start =
            sol.mismatch_trace.size() > 8 ? sol.mismatch_trace.size() - 8 : 0;
        if (start > 0) os << " ...";
        for (std::size_t k = start; k < sol.mismatch_trace.size(); ++k)
            os << " " << sol.mismatch_trace[k];
        throw Error::numerical(os.str());
    }
    return sol;
}

JacobianProbe probe_jacobian(const NetworkCase& net, const SolveSpec& spec,
                             const std::vector<double>& vm, const std::vector<double>& va) {
    Context ctx = make_context(net, spec);
    if (vm.size() != static_cast<std::size_t>(ctx.n) ||
        va.size() != static_cast<std::size_t>(ctx.n))
        throw Error::input("probe state size does not match bus count");
    JacobianProbe probe;
    type_sets(ctx.kind, probe.pvpq, probe.pq);
    evaluate(ctx, ctx.kind, ctx.sbus, vm, va, probe.pvpq, probe.pq, probe.f, &probe.jac,
             nullptr);
    return probe;
}

}  // namespace windgrid
