#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

namespace windgrid {

enum class BusType : int { pq = 1, pv = 2, slack = 3 };

struct Bus {
    int id = 0;  // external id, unique
    BusType type = BusType::pq;
    double pd = 0.0;  // MW
    double qd = 0.0;  // MVAr
    double gs = 0.0;  // MW consumed at V = 1 p.u.
    double bs = 0.0;  // MVAr injected at V = 1 p.u.
    double vm = 1.0;  // initial magnitude, p.u.
    double va = 0.0;  // initial angle, degrees (as in case files)
    double base_kv = 0.0;
    double vmin = 0.9;
    double vmax = 1.1;
};

struct Branch {
    int from = 0;  // external bus ids
    int to = 0;
    double r = 0.0;  // p.u.
    double x = 0.0;
    double b = 0.0;      // total line charging, p.u.
    double tap = 0.0;    // 0 means nominal (1.0)
    double shift = 0.0;  // degrees
    bool in_service = true;
};

struct Generator {
    int bus = 0;
    double pg = 0.0;  // MW setpoint
    double qg = 0.0;  // MVAr setpoint
    double qmax = 0.0;
    double qmin = 0.0;
    double vs = 1.0;  // voltage setpoint, p.u.
    double pmax = 0.0;
    double pmin = 0.0;
    bool in_service = true;
};

// Polynomial cost c2*P^2 + c1*P + c0 with P in MW.
struct CostCurve {
    double c2 = 0.0;
    double c1 = 0.0;
    double c0 = 0.0;
};

struct NetworkCase {
    std::string name;
    double base_mva = 100.0;
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<Generator> generators;
    std::vector<CostCurve> costs;  // parallel to generators; may be empty

    int bus_index(int external_id) const;  // throws Error::input for unknown ids
    const std::map<int, int>& bus_index_map() const;

  private:
    mutable std::map<int, int> index_cache_;
};

// Structural validation: unique bus ids, exactly one slack bus, valid
// branch/generator references, ordered limits, nonzero branch impedances,
// and connectivity of the in-service graph. Throws Error::input.
void validate_case(const NetworkCase& net);

// Full complex nodal admittance matrix (taps, phase shifts, line charging,
// bus shunts), indexed in case bus order.
Eigen::SparseMatrix<std::complex<double>> build_ybus(const NetworkCase& net);

}  // namespace windgrid
