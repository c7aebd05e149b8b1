#include "windgrid/network.hpp"

#include <cmath>
#include <numbers>
#include <queue>
#include <set>
#include <sstream>

#include "windgrid/errors.hpp"

namespace windgrid {

int NetworkCase::bus_index(int external_id) const {
    const auto& map = bus_index_map();
    const auto it = map.find(external_id);
    if (it == map.end())
        throw Error::input("unknown bus id " + std::to_string(external_id));
    return it->second;
}

const std::map<int, int>& NetworkCase::bus_index_map() const {
    if (index_cache_.size() != buses.size()) {
        index_cache_.clear();
        for (std::size_t i = 0; i < buses.size(); ++i)
            index_cache_[buses[i].id] = static_cast<int>(i);
    }
    return index_cache_;
}

void validate_case(const NetworkCase& net) {
    if (net.buses.empty()) throw Error::input("case has no buses");
    if (net.base_mva <= 0.0) throw Error::input("base MVA must be positive");

    std::set<int> ids;
    int slack_count = 0;
    for (const Bus& b : net.buses) {
        if (!ids.insert(b.id).second)
            throw Error::input("duplicate bus id " + std::to_string(b.id));
        if (b.type == BusType::slack) ++slack_count;
        if (b.vmin > b.vmax || b.vmin <= 0.0)
            throw Error::input("bus " + std::to_string(b.id) +
                               " has invalid voltage limits");
    }
    if (slack_count != 1)
        throw Error::input("case must have exactly one slack bus, found " +
                           std::to_string(slack_count));

    for (const Branch& br : net.branches) {
        if (!ids.count(br.from) || !ids.count(br.to)) {
            std::ostringstream os;
            os << "branch " << br.from << "-" << br.to << " references nonexistent bus "
               << (ids.count(br.from) ? br.to : br.from);
            throw Error::input(os.str());
        }
        if (br.in_service && br.r == 0.0 && br.x == 0.0) {
            std::ostringstream os;
            os << "branch " << br.from << "-" << br.to << " has zero impedance";
            throw Error::input(os.str());
        }
    }

    for (const Generator& g : net.generators) {
        if (!ids.count(g.bus))
            throw Error::input("generator references nonexistent bus " +
                               std::to_string(g.bus));
        if (g.pmin > g.pmax)
            throw Error::input("generator at bus " + std::to_string(g.bus) +
                               " has Pmin > Pmax");
        if (g.qmin > g.qmax)
            throw Error::input("generator at bus " + std::to_string(g.bus) +
                               " has Qmin > Qmax");
    }
    if (!net.costs.empty() && net.costs.size() != net.generators.size())
        throw Error::input("cost table size does not match generator count");

    // Connectivity of the in-service graph, searched from the slack bus.
    const int n = static_cast<int>(net.buses.size());
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (const Branch& br : net.branches) {
        if (!br.in_service) continue;
        const int f = net.bus_index(br.from);
        const int t = net.bus_index(br.to);
        adj[static_cast<std::size_t>(f)].push_back(t);
        adj[static_cast<std::size_t>(t)].push_back(f);
    }
    int slack_idx = 0;
    for (int i = 0; i < n; ++i)
        if (net.buses[static_cast<std::size_t>(i)].type == BusType::slack) slack_idx = i;
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::queue<int> frontier;
    frontier.push(slack_idx);
    seen[static_cast<std::size_t>(slack_idx)] = 1;
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop();
        for (int v : adj[static_cast<std::size_t>(u)])
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                frontier.push(v);
            }
    }
    std::vector<int> island;
    for (int i = 0; i < n; ++i)
        if (!seen[static_cast<std::size_t>(i)])
            island.push_back(net.buses[static_cast<std::size_t>(i)].id);
    if (!island.empty()) {
        std::ostringstream os;
        os << "disconnected island of " << island.size() << " buses:";
        for (std::size_t i = 0; i < island.size() && i < 12; ++i) os << " " << island[i];
        if (island.size() > 12) os << " ...";
        throw Error::input(os.str());
    }
}

Eigen::SparseMatrix<std::complex<double>> build_ybus(const NetworkCase& net) {
    using cd = std::complex<double>;
    const int n = static_cast<int>(net.buses.size());
    std::vector<Eigen::Triplet<cd>> trip;
    trip.reserve(net.branches.size() * 4 + net.buses.size());

    constexpr double deg = std::numbers::pi / 180.0;
    for (const Branch& br : net.branches) {
        if (!br.in_service) continue;
        const int f = net.bus_index(br.from);
        const int t = net.bus_index(br.to);
        const cd ys = 1.0 / cd(br.r, br.x);
        const cd ysh(0.0, br.b / 2.0);
        const double ratio = br.tap == 0.0 ? 1.0 : br.tap;
        const cd tap = std::polar(ratio, br.shift * deg);
        const cd yff = (ys + ysh) / (tap * std::conj(tap));
        const cd yft = -ys / std::conj(tap);
        const cd ytf = -ys / tap;
        const cd ytt = ys + ysh;
        trip.emplace_back(f, f, yff);
        trip.emplace_back(f, t, yft);
        trip.emplace_back(t, f, ytf);
        trip.emplace_back(t, t, ytt);
    }
    for (int i = 0; i < n; ++i) {
        const Bus& b = net.buses[static_cast<std::size_t>(i)];
        if (b.gs != 0.0 || b.bs != 0.0)
            trip.emplace_back(i, i, cd(b.gs, b.bs) / net.base_mva);
    }

    Eigen::SparseMatrix<cd> ybus(n, n);
    ybus.setFromTriplets(trip.begin(), trip.end());
    return ybus;
}

}  // namespace windgrid
