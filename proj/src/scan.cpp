#include "windgrid/scan.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "windgrid/errors.hpp"
#include "windgrid/kernels.hpp"
#include "windgrid/rng.hpp"

namespace windgrid {

const char* wind_mode_name(WindMode m) {
    switch (m) {
        case WindMode::mean: return "mean";
        case WindMode::vmin: return "min";
        case WindMode::vmax: return "max";
    }
    return "?";
}

WindMode wind_mode_from_name(const std::string& name) {
    for (WindMode m : all_wind_modes)
        if (name == wind_mode_name(m)) return m;
    throw Error::input("unknown wind mode: " + name + " (expected mean, min or max)");
}

const char* scan_approach_name(ScanApproach a) {
    return a == ScanApproach::season_focused ? "season-focused" : "season-independent";
}

ScanApproach scan_approach_from_name(const std::string& name) {
    if (name == "season-focused") return ScanApproach::season_focused;
    if (name == "season-independent") return ScanApproach::season_independent;
    throw Error::input("unknown scan approach: " + name +
                       " (expected season-focused or season-independent)");
}

namespace {

struct Candidate {
    int bus = 0;
    double capacity = 0.0;
};

// Walks the candidates in `order`, skipping draws that would overshoot, and
// reports success the first time the accumulated capacity enters the band.
bool walk_selection(const std::vector<Candidate>& candidates, const std::vector<std::size_t>& order,
                    double lo_mw, double hi_mw, std::vector<int>& buses, double& capacity) {
    buses.clear();
    capacity = 0.0;
    if (capacity >= lo_mw) return true;  // the empty set is already in the band
    for (std::size_t idx : order) {
        const Candidate& c = candidates[idx];
        if (capacity + c.capacity > hi_mw) continue;  // overshoot: skip this draw
        buses.push_back(c.bus);
        capacity += c.capacity;
        if (capacity >= lo_mw) return true;
    }
    return false;
}

}  // namespace

WindSelection select_wind_buses(const NetworkCase& net, const ScanConfig& cfg,
                                int selection_index) {
    if (selection_index < 0) throw Error::input("selection index must be non-negative");
    if (!(cfg.penetration_tol >= 0.0))
        throw Error::input("penetration tolerance must be non-negative");

    // Per-bus capacity of in-service generation.
    std::map<int, double> bus_capacity;
    double total = 0.0;
    for (const Generator& g : net.generators) {
        if (!g.in_service) continue;
        const double cap = std::max(g.pmax, 0.0);
        total += cap;
        if (cap > 0.0) bus_capacity[g.bus] += cap;
    }

    WindSelection sel;
    sel.is_wind_gen.assign(net.generators.size(), 0);
    if (cfg.penetration == 0.0) return sel;  // wind disabled

    if (!(cfg.penetration > 0.0 && cfg.penetration < 1.0))
        throw Error::input("penetration target must lie in (0, 1) or be 0 to disable wind");
    if (total <= 0.0) throw Error::input("case has no in-service generation capacity");

    std::vector<Candidate> candidates;
    candidates.reserve(bus_capacity.size());
    for (const auto& [bus, cap] : bus_capacity) candidates.push_back({bus, cap});

    const double lo_mw = (cfg.penetration - cfg.penetration_tol) * total;
    const double hi_mw = (cfg.penetration + cfg.penetration_tol) * total;

    constexpr int kAttemptsPerStream = 1000;
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int stream = 0; stream < 2; ++stream) {
        // The second stream reseeds the walk after the first budget runs out.
        SplitMix64 rng = stream == 0
                             ? SplitMix64::substream(cfg.seed,
                                                     static_cast<std::uint64_t>(selection_index))
                             : SplitMix64::substream(~cfg.seed,
                                                     static_cast<std::uint64_t>(selection_index));
        for (int attempt = 0; attempt < kAttemptsPerStream; ++attempt) {
            rng.shuffle(order);
            if (walk_selection(candidates, order, lo_mw, hi_mw, sel.buses, sel.capacity_mw)) {
                std::sort(sel.buses.begin(), sel.buses.end());
                sel.fraction = sel.capacity_mw / total;
                for (std::size_t g = 0; g < net.generators.size(); ++g) {
                    const Generator& gen = net.generators[g];
                    sel.is_wind_gen[g] =
                        gen.in_service &&
                        std::binary_search(sel.buses.begin(), sel.buses.end(), gen.bus);
                }
                return sel;
            }
        }
    }

    std::ostringstream os;
    os << "wind selection infeasible: no subset of " << candidates.size()
       << " generator buses reaches " << lo_mw << ".." << hi_mw << " MW of " << total
       << " MW capacity after " << 2 * kAttemptsPerStream << " attempts";
    throw Error::input(os.str());
}

SeasonalScaleFactors build_seasonal_scale_factors(const SeasonalWindModel& model) {
    // Numerators: the mode's per-unit trajectory converted to the season's
    // power scale. numer[mode][season][slot].
    std::array<std::array<std::array<double, kSlotsPerDay>, 4>, 3> numer{};
    for (Season s : all_seasons) {
        const NormativeDayProfile& p = model.season(s);
        const int si = static_cast<int>(s);
        for (int h = 0; h < kSlotsPerDay; ++h) {
            numer[static_cast<int>(WindMode::mean)][si][h] = p.representative[h] * p.actual_mean;
            numer[static_cast<int>(WindMode::vmax)][si][h] =
                (p.representative[h] + p.net_max[h]) * p.actual_max;
            numer[static_cast<int>(WindMode::vmin)][si][h] =
                std::max(0.0, p.representative[h] - p.net_min[h]) * p.actual_min;
        }
    }

    SeasonalScaleFactors out;
    for (WindMode m : all_wind_modes) {
        const int mi = static_cast<int>(m);
        for (int h = 0; h < kSlotsPerDay; ++h) {
            double denom = 0.0;
            int blame = 0;  // season that pins a vanishing normalizer
            if (m == WindMode::mean) {
                for (int si = 0; si < 4; ++si) denom += numer[mi][si][h];
                denom /= 4.0;
                for (int si = 0; si < 4; ++si)
                    if (numer[mi][si][h] <= 0.0) blame = si;
            } else if (m == WindMode::vmax) {
                denom = numer[mi][0][h];
                for (int si = 1; si < 4; ++si) denom = std::max(denom, numer[mi][si][h]);
                for (int si = 0; si < 4; ++si)
                    if (numer[mi][si][h] <= 0.0) blame = si;
            } else {
                denom = numer[mi][0][h];
                for (int si = 1; si < 4; ++si)
                    if (numer[mi][si][h] < denom) {
                        denom = numer[mi][si][h];
                        blame = si;
                    }
            }
            if (!(denom > 0.0)) {
                std::ostringstream os;
                os << "degenerate wind profile: " << wind_mode_name(m)
                   << "-mode scale normalizer vanishes at slot " << h << " ("
                   << season_name(static_cast<Season>(blame)) << ")";
                throw Error::input(os.str());
            }
            for (int si = 0; si < 4; ++si) out.factor[mi][si][h] = numer[mi][si][h] / denom;
        }
    }
    return out;
}

namespace {

// Per-slot case data shared by every selection of a group.
struct GroupPlan {
    std::string season;
    WindMode mode = WindMode::mean;
    const DispatchSchedule* sched = nullptr;
    std::array<double, kSlotsPerDay> factor{};  // wind injection multiplier
};

struct GroupAccumulator {
    std::int64_t solved = 0;
    std::int64_t diverged = 0;
    std::vector<std::int64_t> rel;
    std::vector<std::int64_t> abs;
};

void check_schedule(const DispatchSchedule* sched, const char* label, std::size_t nbus,
                    std::size_t ngen) {
    if (!sched) throw Error::input(std::string("scan requires the ") + label + " schedule");
    const auto has48 = [](std::size_t n) { return n == static_cast<std::size_t>(kSlotsPerDay); };
    if (!has48(sched->pg.size()) || !has48(sched->qg.size()) || !has48(sched->vm.size()) ||
        !has48(sched->va.size()) || !has48(sched->percent_of_peak.size()))
        throw Error::input(std::string(label) + " schedule does not cover 48 slots");
    for (int h = 0; h < kSlotsPerDay; ++h) {
        if (sched->pg[h].size() != ngen || sched->qg[h].size() != ngen)
            throw Error::input(std::string(label) + " schedule generator vectors mismatch the case");
        if (sched->vm[h].size() != nbus || sched->va[h].size() != nbus)
            throw Error::input(std::string(label) + " schedule voltage vectors mismatch the case");
    }
}

}  // namespace

ViolationReport run_scan(const NetworkCase& net, ScanApproach approach, const ScanData& data,
                         const ScanConfig& cfg) {
    const std::size_t nbus = net.buses.size();
    const std::size_t ngen = net.generators.size();

    if (cfg.selections <= 0) throw Error::input("scan requires at least one selection");
    if (cfg.threads < 1) throw Error::input("scan thread count must be at least 1");
    if (!(cfg.band_low > 0.0 && cfg.band_low < cfg.band_high))
        throw Error::input("absolute voltage band must satisfy 0 < low < high");
    if (!(cfg.relative_tol > 0.0))
        throw Error::input("relative voltage tolerance must be positive");

    std::vector<WindMode> modes = cfg.modes;
    if (approach == ScanApproach::season_independent) modes = {WindMode::mean};
    if (modes.empty()) throw Error::input("scan requires at least one wind mode");
    for (std::size_t i = 0; i < modes.size(); ++i)
        for (std::size_t j = i + 1; j < modes.size(); ++j)
            if (modes[i] == modes[j])
                throw Error::input(std::string("duplicate wind mode: ") +
                                   wind_mode_name(modes[i]));

    // Assemble the group plans up front so input problems surface before any
    // heavy work.
    std::vector<GroupPlan> plans;
    if (approach == ScanApproach::season_focused) {
        if (!data.wind) throw Error::input("season-focused scan requires the seasonal wind model");
        const SeasonalScaleFactors factors = build_seasonal_scale_factors(*data.wind);
        for (Season s : all_seasons)
            check_schedule(data.seasonal_schedules[static_cast<int>(s)], season_name(s), nbus,
                           ngen);
        for (Season s : all_seasons) {
            for (WindMode m : modes) {
                GroupPlan plan;
                plan.season = season_name(s);
                plan.mode = m;
                plan.sched = data.seasonal_schedules[static_cast<int>(s)];
                plan.factor = factors.factor[static_cast<int>(m)][static_cast<int>(s)];
                plans.push_back(std::move(plan));
            }
        }
    } else {
        if (!data.annual_wind)
            throw Error::input("season-independent scan requires the annual wind profile");
        check_schedule(data.annual_schedule, "annual", nbus, ngen);
        GroupPlan plan;
        plan.season = "annual";
        plan.mode = WindMode::mean;
        plan.sched = data.annual_schedule;
        plan.factor = data.annual_wind->pn;
        plans.push_back(std::move(plan));
    }

    ViolationReport report;
    report.approach = approach;
    report.seed = cfg.seed;
    report.selections = cfg.selections;
    report.penetration = cfg.penetration;
    report.penetration_tol = cfg.penetration_tol;
    report.band_low = cfg.band_low;
    report.band_high = cfg.band_high;
    report.relative_tol = cfg.relative_tol;
    report.bus_ids.reserve(nbus);
    for (const Bus& b : net.buses) report.bus_ids.push_back(b.id);

    // Reference voltages: the unmodified case solved at 100% load.
    {
        SolveSpec base;
        const PFSolution sol = solve_acpf(net, base, cfg.pf);
        report.base_vm = sol.vm;
    }

    // Violation bounds. The relative criterion brackets each bus's base
    // voltage; boundary contact is not a violation for either criterion.
    std::vector<double> rel_lo(nbus), rel_hi(nbus);
    std::vector<double> abs_lo(nbus, cfg.band_low), abs_hi(nbus, cfg.band_high);
    for (std::size_t i = 0; i < nbus; ++i) {
        rel_lo[i] = report.base_vm[i] * (1.0 - cfg.relative_tol);
        rel_hi[i] = report.base_vm[i] * (1.0 + cfg.relative_tol);
    }

    // One selection set, reused by every group.
    report.picks.reserve(static_cast<std::size_t>(cfg.selections));
    for (int k = 0; k < cfg.selections; ++k)
        report.picks.push_back(select_wind_buses(net, cfg, k));

    for (const GroupPlan& plan : plans) {
        // Loads for each slot are common to all selections.
        std::array<std::vector<double>, kSlotsPerDay> pd, qd;
        for (int h = 0; h < kSlotsPerDay; ++h)
            scaled_loads(net, plan.sched->percent_of_peak[h], {}, pd[h], qd[h]);

        const int threads =
            std::max(1, std::min(cfg.threads, cfg.selections));
        std::vector<GroupAccumulator> acc(static_cast<std::size_t>(threads));
        for (GroupAccumulator& a : acc) {
            a.rel.assign(nbus, 0);
            a.abs.assign(nbus, 0);
        }
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));

        auto worker = [&](int t, int k_begin, int k_end) {
            GroupAccumulator& a = acc[static_cast<std::size_t>(t)];
            try {
                for (int k = k_begin; k < k_end; ++k) {
                    const WindSelection& pick = report.picks[static_cast<std::size_t>(k)];
                    for (int h = 0; h < kSlotsPerDay; ++h) {
                        SolveSpec spec;
                        spec.gen_model = GenModel::fixed_injection;
                        spec.pd = pd[h];
                        spec.qd = qd[h];
                        spec.pg = plan.sched->pg[h];
                        spec.qg = plan.sched->qg[h];
                        const double f = plan.factor[h];
                        for (std::size_t g = 0; g < ngen; ++g)
                            if (pick.is_wind_gen[g]) {
                                spec.pg[g] *= f;
                                spec.qg[g] *= f;
                            }
                        spec.vm0 = &plan.sched->vm[h];
                        spec.va0 = &plan.sched->va[h];

                        PFSolution sol;
                        bool ok = false;
                        for (int retry = 0; retry < 2 && !ok; ++retry) {
                            if (retry == 1) {   // flat restart
                                spec.vm0 = nullptr;
                                spec.va0 = nullptr;
                            }
                            try {
                                sol = solve_power_flow(net, spec, cfg.pf);
                                ok = sol.converged;
                            } catch (const Error& e) {
                                if (e.kind() != ErrorKind::numerical) throw;
                                ok = false;  // factorization failure counts as divergence
                            }
                        }
                        if (!ok) {
                            ++a.diverged;
                            continue;
                        }
                        ++a.solved;
                        kernels::accumulate_outside(sol.vm, rel_lo, rel_hi, a.rel);
                        kernels::accumulate_outside(sol.vm, abs_lo, abs_hi, a.abs);
                    }
                }
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        };

        if (threads == 1) {
            worker(0, 0, cfg.selections);
        } else {
            std::vector<std::thread> pool;
            const int per = (cfg.selections + threads - 1) / threads;
            for (int t = 0; t < threads; ++t) {
                const int k0 = t * per;
                const int k1 = std::min(cfg.selections, k0 + per);
                pool.emplace_back(worker, t, k0, std::max(k0, k1));
            }
            for (std::thread& th : pool) th.join();
        }
        for (const std::exception_ptr& e : errors)
            if (e) std::rethrow_exception(e);

        ScanGroup group;
        group.season = plan.season;
        group.mode = plan.mode;
        group.cases = static_cast<std::int64_t>(cfg.selections) * kSlotsPerDay;
        group.relative_count.assign(nbus, 0);
        group.absolute_count.assign(nbus, 0);
        for (const GroupAccumulator& a : acc) {
            group.solved += a.solved;
            group.diverged += a.diverged;
            for (std::size_t i = 0; i < nbus; ++i) {
                group.relative_count[i] += a.rel[i];
                group.absolute_count[i] += a.abs[i];
            }
        }
        report.total_solved += group.solved;
        report.total_diverged += group.diverged;
        report.groups.push_back(std::move(group));
    }

    return report;
}

VulnerabilityRanking rank_vulnerability(const ViolationReport& report) {
    const std::size_t nbus = report.bus_ids.size();

    // Pool 1: representative-trajectory cases against the relative criterion.
    // Pool 2: envelope-edge cases against the absolute band.
    std::vector<std::int64_t> count1(nbus, 0), count2(nbus, 0);
    std::int64_t total1 = 0, total2 = 0;
    bool has_mean = false, has_extreme = false;
    for (const ScanGroup& g : report.groups) {
        if (g.mode == WindMode::mean) {
            has_mean = true;
            total1 += g.solved;
            for (std::size_t i = 0; i < nbus; ++i) count1[i] += g.relative_count[i];
        } else {
            has_extreme = true;
            total2 += g.solved;
            for (std::size_t i = 0; i < nbus; ++i) count2[i] += g.absolute_count[i];
        }
    }
    if (!has_mean || !has_extreme)
        throw Error::input(std::string("vulnerability ranking needs both criteria, but the "
                                       "report has no ") +
                           (has_mean ? "min/max-trajectory groups" : "mean-trajectory groups"));

    // Rank each pool by descending count; ties go to the lower bus id.
    const auto ranks = [&](const std::vector<std::int64_t>& count) {
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < nbus; ++i)
            if (count[i] > 0) order.push_back(i);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (count[a] != count[b]) return count[a] > count[b];
            return report.bus_ids[a] < report.bus_ids[b];
        });
        std::vector<int> alpha(nbus, 0);
        for (std::size_t r = 0; r < order.size(); ++r)
            alpha[order[r]] = static_cast<int>(r) + 1;
        return alpha;
    };
    const std::vector<int> alpha1 = ranks(count1);
    const std::vector<int> alpha2 = ranks(count2);

    VulnerabilityRanking ranking;
    ranking.mean_cases = total1;
    ranking.extreme_cases = total2;
    for (std::size_t i = 0; i < nbus; ++i) {
        if (count1[i] == 0 && count2[i] == 0) continue;
        RankedBus rb;
        rb.bus = report.bus_ids[i];
        rb.count1 = count1[i];
        rb.count2 = count2[i];
        if (count1[i] > 0) {
            rb.alpha1 = alpha1[i];
            rb.pv1 = static_cast<double>(count1[i]) / static_cast<double>(total1);
        }
        if (count2[i] > 0) {
            rb.alpha2 = alpha2[i];
            rb.pv2 = static_cast<double>(count2[i]) / static_cast<double>(total2);
        }
        if (count1[i] > 0 && count2[i] > 0) {
            rb.group = "both";
            rb.wv = rb.alpha1 / rb.pv1 + rb.alpha2 / rb.pv2;
        } else if (count1[i] > 0) {
            rb.group = "relative-only";
            rb.wv = rb.alpha1 / rb.pv1;
        } else {
            rb.group = "absolute-only";
            rb.wv = rb.alpha2 / rb.pv2;
        }
        ranking.entries.push_back(std::move(rb));
    }

    // Buses caught by both pools lead, ordered by ascending weight; the rest
    // follow ordered by their single defined term. Ties break to the lower id.
    std::sort(ranking.entries.begin(), ranking.entries.end(),
              [](const RankedBus& a, const RankedBus& b) {
                  const bool a_both = a.group == "both";
                  const bool b_both = b.group == "both";
                  if (a_both != b_both) return a_both;
                  if (a.wv != b.wv) return a.wv < b.wv;
                  return a.bus < b.bus;
              });
    return ranking;
}

}  // namespace windgrid
