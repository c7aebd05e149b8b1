#include "windgrid/case_io.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "windgrid/errors.hpp"

namespace windgrid {

namespace {

using json = nlohmann::json;

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// Strips MATLAB comments and trailing row/statement terminators.
std::string strip_matlab(const std::string& line) {
    std::string out = line;
    const std::size_t pct = out.find('%');
    if (pct != std::string::npos) out.erase(pct);
    return trim(out);
}

double to_number(const std::string& field, const std::string& src, std::size_t lineno) {
    const char* begin = field.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + field.size()) {
        std::ostringstream os;
        os << src << ":" << lineno << ": malformed number '" << field << "'";
        throw Error::input(os.str());
    }
    return v;
}

struct Matrix {
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 0;  // where the block started
};

BusType bus_type_from_code(int code, int bus_id, const std::string& src) {
    switch (code) {
        case 1: return BusType::pq;
        case 2: return BusType::pv;
        case 3: return BusType::slack;
        default:
            throw Error::input(src + ": bus " + std::to_string(bus_id) +
                               " has unsupported type code " + std::to_string(code));
    }
}

void require_columns(const Matrix& m, std::size_t need, const char* block,
                     const std::string& src) {
    for (const auto& row : m.rows)
        if (row.size() < need)
            throw Error::input(src + ": " + block + " matrix row has " +
                               std::to_string(row.size()) + " columns, need at least " +
                               std::to_string(need));
}

}  // namespace

NetworkCase parse_matpower_case(std::istream& in, const std::string& source_name,
                                std::vector<std::string>* warnings) {
    static constexpr const char* kKnownBlocks[] = {"bus", "gen", "branch", "gencost"};
    const auto known_block = [](const std::string& f) {
        for (const char* k : kKnownBlocks)
            if (f == k) return true;
        return false;
    };

    std::map<std::string, Matrix> blocks;
    double base_mva = 0.0;
    bool have_base = false;
    std::string name;

    std::string line;
    std::size_t lineno = 0;
    std::string current_block;
    bool current_known = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string s = strip_matlab(line);
        if (s.empty()) continue;

        if (current_block.empty()) {
            if (s.rfind("function", 0) == 0) {
                const std::size_t eq = s.find('=');
                if (eq != std::string::npos) name = trim(s.substr(eq + 1));
                continue;
            }
            const std::size_t dot = s.find('.');
            const std::size_t eq = s.find('=');
            if (dot == std::string::npos || eq == std::string::npos || dot > eq) continue;
            const std::string field = trim(s.substr(dot + 1, eq - dot - 1));
            std::string rhs = trim(s.substr(eq + 1));
            if (field == "baseMVA") {
                if (!rhs.empty() && rhs.back() == ';') rhs.pop_back();
                base_mva = to_number(trim(rhs), source_name, lineno);
                have_base = true;
                continue;
            }
            if (field == "version") continue;
            if (rhs.rfind('[', 0) == 0 || rhs.rfind('{', 0) == 0) {
                current_block = field;
                // Unknown blocks (names, cell arrays, ...) are recorded for
                // the warning pass but their contents are never parsed.
                current_known = known_block(field);
                blocks[field].lineno = lineno;
                rhs = trim(rhs.substr(1));
                if (rhs.empty()) continue;
                s = rhs;  // rows may start on the same line
            } else {
                if (warnings)
                    warnings->push_back("ignored non-matrix field '" + field + "' at " +
                                        source_name + ":" + std::to_string(lineno));
                continue;
            }
        }

        // Inside a matrix block: accumulate rows until the closing bracket.
        bool closing = false;
        const std::size_t close = s.find_first_of("]}");
        if (close != std::string::npos) {
            closing = true;
            s = trim(s.substr(0, close));
        }
        if (!s.empty() && current_known) {
            for (std::string& piece : [&] {
                     std::vector<std::string> rows;
                     std::string cur;
                     for (char c : s) {
                         if (c == ';') {
                             rows.push_back(cur);
                             cur.clear();
                         } else {
                             cur.push_back(c);
                         }
                     }
                     rows.push_back(cur);
                     return rows;
                 }()) {
                piece = trim(piece);
                if (piece.empty()) continue;
                std::vector<double> row;
                std::istringstream fields(piece);
                std::string tok;
                while (fields >> tok) row.push_back(to_number(tok, source_name, lineno));
                blocks[current_block].rows.push_back(std::move(row));
            }
        }
        if (closing) current_block.clear();
    }
    if (!current_block.empty())
        throw Error::input(source_name + ": unterminated matrix block '" + current_block + "'");
    if (!have_base) throw Error::input(source_name + ": missing baseMVA");

    for (const auto& [field, matrix] : blocks)
        if (!known_block(field) && warnings)
            warnings->push_back("ignored matrix block '" + field + "' at " + source_name +
                                ":" + std::to_string(matrix.lineno));
    if (!blocks.count("bus")) throw Error::input(source_name + ": missing bus matrix");
    if (!blocks.count("gen")) throw Error::input(source_name + ": missing gen matrix");
    if (!blocks.count("branch")) throw Error::input(source_name + ": missing branch matrix");

    NetworkCase net;
    net.name = name.empty() ? source_name : name;
    net.base_mva = base_mva;

    const Matrix& busm = blocks["bus"];
    require_columns(busm, 13, "bus", source_name);
    for (const auto& row : busm.rows) {
        Bus b;
        b.id = static_cast<int>(row[0]);
        b.type = bus_type_from_code(static_cast<int>(row[1]), b.id, source_name);
        b.pd = row[2];
        b.qd = row[3];
        b.gs = row[4];
        b.bs = row[5];
        b.vm = row[7];
        b.va = row[8];
        b.base_kv = row[9];
        b.vmax = row[11];
        b.vmin = row[12];
        net.buses.push_back(b);
    }

    const Matrix& genm = blocks["gen"];
    require_columns(genm, 10, "gen", source_name);
    for (const auto& row : genm.rows) {
        Generator g;
        g.bus = static_cast<int>(row[0]);
        g.pg = row[1];
        g.qg = row[2];
        g.qmax = row[3];
        g.qmin = row[4];
        g.vs = row[5];
        g.in_service = row[7] > 0.0;
        g.pmax = row[8];
        g.pmin = row[9];
        net.generators.push_back(g);
    }

    const Matrix& brm = blocks["branch"];
    require_columns(brm, 11, "branch", source_name);
    for (const auto& row : brm.rows) {
        Branch br;
        br.from = static_cast<int>(row[0]);
        br.to = static_cast<int>(row[1]);
        br.r = row[2];
        br.x = row[3];
        br.b = row[4];
        br.tap = row[8];
        br.shift = row[9];
        br.in_service = row[10] > 0.0;
        net.branches.push_back(br);
    }

    if (blocks.count("gencost")) {
        const Matrix& costm = blocks["gencost"];
        if (costm.rows.size() != net.generators.size())
            throw Error::input(source_name + ": gencost rows (" +
                               std::to_string(costm.rows.size()) +
                               ") do not match generator count (" +
                               std::to_string(net.generators.size()) + ")");
        for (const auto& row : costm.rows) {
            if (row.size() < 4)
                throw Error::input(source_name + ": gencost row too short");
            const int model = static_cast<int>(row[0]);
            if (model != 2)
                throw Error::input(source_name +
                                   ": only polynomial cost model 2 is supported");
            const int ncost = static_cast<int>(row[3]);
            if (ncost < 1 || row.size() < 4 + static_cast<std::size_t>(ncost))
                throw Error::input(source_name + ": gencost row declares " +
                                   std::to_string(ncost) + " coefficients but carries fewer");
            CostCurve c;
            // Coefficients arrive highest order first; orders above 2 are rejected.
            if (ncost > 3)
                throw Error::input(source_name +
                                   ": polynomial costs above quadratic are not supported");
            const std::size_t base = 4;
            if (ncost == 3) {
                c.c2 = row[base];
                c.c1 = row[base + 1];
                c.c0 = row[base + 2];
            } else if (ncost == 2) {
                c.c1 = row[base];
                c.c0 = row[base + 1];
            } else {
                c.c0 = row[base];
            }
            net.costs.push_back(c);
        }
    }

    validate_case(net);
    return net;
}

namespace {

const char* bus_type_name(BusType t) {
    switch (t) {
        case BusType::pq: return "pq";
        case BusType::pv: return "pv";
        case BusType::slack: return "slack";
    }
    return "?";
}

BusType bus_type_from_name(const std::string& s, const std::string& src) {
    if (s == "pq") return BusType::pq;
    if (s == "pv") return BusType::pv;
    if (s == "slack") return BusType::slack;
    throw Error::input(src + ": unknown bus type '" + s + "'");
}

}  // namespace

NetworkCase parse_case_json(const std::string& text, const std::string& source_name) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error::input(source_name + ": " + e.what());
    }
    try {
        if (doc.value("schema", "") != "network-case/1")
            throw Error::input(source_name + ": unsupported or missing case schema tag");
        NetworkCase net;
        net.name = doc.value("name", source_name);
        net.base_mva = doc.at("base_mva").get<double>();
        for (const json& jb : doc.at("buses")) {
            Bus b;
            b.id = jb.at("id").get<int>();
            b.type = bus_type_from_name(jb.at("type").get<std::string>(), source_name);
            b.pd = jb.at("pd").get<double>();
            b.qd = jb.at("qd").get<double>();
            b.gs = jb.value("gs", 0.0);
            b.bs = jb.value("bs", 0.0);
            b.vm = jb.value("vm", 1.0);
            b.va = jb.value("va", 0.0);
            b.base_kv = jb.value("base_kv", 0.0);
            b.vmin = jb.at("vmin").get<double>();
            b.vmax = jb.at("vmax").get<double>();
            net.buses.push_back(b);
        }
        for (const json& jb : doc.at("branches")) {
            Branch br;
            br.from = jb.at("from").get<int>();
            br.to = jb.at("to").get<int>();
            br.r = jb.at("r").get<double>();
            br.x = jb.at("x").get<double>();
            br.b = jb.value("b", 0.0);
            br.tap = jb.value("tap", 0.0);
            br.shift = jb.value("shift", 0.0);
            br.in_service = jb.value("in_service", true);
            net.branches.push_back(br);
        }
        for (const json& jg : doc.at("generators")) {
            Generator g;
            g.bus = jg.at("bus").get<int>();
            g.pg = jg.value("pg", 0.0);
            g.qg = jg.value("qg", 0.0);
            g.qmax = jg.at("qmax").get<double>();
            g.qmin = jg.at("qmin").get<double>();
            g.vs = jg.value("vs", 1.0);
            g.pmax = jg.at("pmax").get<double>();
            g.pmin = jg.at("pmin").get<double>();
            g.in_service = jg.value("in_service", true);
            net.generators.push_back(g);
        }
        if (doc.contains("costs")) {
            for (const json& jc : doc.at("costs")) {
                CostCurve c;
                c.c2 = jc.value("c2", 0.0);
                c.c1 = jc.value("c1", 0.0);
                c.c0 = jc.value("c0", 0.0);
                net.costs.push_back(c);
            }
        }
        validate_case(net);
        return net;
    } catch (const json::exception& e) {
        throw Error::input(source_name + ": " + e.what());
    }
}

std::string case_to_json(const NetworkCase& net) {
    json doc;
    doc["schema"] = "network-case/1";
    doc["name"] = net.name;
    doc["base_mva"] = net.base_mva;
    doc["buses"] = json::array();
    for (const Bus& b : net.buses) {
        doc["buses"].push_back(json{{"id", b.id},
                                    {"type", bus_type_name(b.type)},
                                    {"pd", b.pd},
                                    {"qd", b.qd},
                                    {"gs", b.gs},
                                    {"bs", b.bs},
                                    {"vm", b.vm},
                                    {"va", b.va},
                                    {"base_kv", b.base_kv},
                                    {"vmin", b.vmin},
                                    {"vmax", b.vmax}});
    }
    doc["branches"] = json::array();
    for (const Branch& br : net.branches) {
        doc["branches"].push_back(json{{"from", br.from},
                                       {"to", br.to},
                                       {"r", br.r},
                                       {"x", br.x},
                                       {"b", br.b},
                                       {"tap", br.tap},
                                       {"shift", br.shift},
                                       {"in_service", br.in_service}});
    }
    doc["generators"] = json::array();
    for (const Generator& g : net.generators) {
        doc["generators"].push_back(json{{"bus", g.bus},
                                         {"pg", g.pg},
                                         {"qg", g.qg},
                                         {"qmax", g.qmax},
                                         {"qmin", g.qmin},
                                         {"vs", g.vs},
                                         {"pmax", g.pmax},
                                         {"pmin", g.pmin},
                                         {"in_service", g.in_service}});
    }
    if (!net.costs.empty()) {
        doc["costs"] = json::array();
        for (const CostCurve& c : net.costs)
            doc["costs"].push_back(json{{"c2", c.c2}, {"c1", c.c1}, {"c0", c.c0}});
    }
    return doc.dump(2) + "\n";
}

void save_case_json(const NetworkCase& net, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error::input("cannot write '" + path + "'");
    f << case_to_json(net);
    if (!f) throw Error::input("failed while writing '" + path + "'");
}

NetworkCase import_case(const std::string& path, std::vector<std::string>* warnings) {
    const std::size_t dot = path.find_last_of('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
    std::ifstream f(path);
    if (!f) throw Error::input("cannot open '" + path + "'");
    if (ext == ".m") return parse_matpower_case(f, path, warnings);
    if (ext == ".json") {
        std::ostringstream buffer;
        buffer << f.rdbuf();
        return parse_case_json(buffer.str(), path);
    }
    throw Error::input("unsupported case file extension '" + ext +
                       "' (expected .m or .json)");
}

}  // namespace windgrid
