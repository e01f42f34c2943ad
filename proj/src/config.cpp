#include "fraclab/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fraclab {

Geometry ExperimentConfig::geometry() const {
    if (kind == "interval") return Geometry::interval(length, n);
    if (kind == "circle") return Geometry::circle(length, n);
    if (kind == "rectangle") return Geometry::rectangle(length, length_y, n, n_y);
    throw std::invalid_argument("config: geometry kind must be interval|rectangle|circle");
}

Region ExperimentConfig::region_o() const {
    return Region::from_coords(geometry(), RegionLabel::O, o0, o1);
}
Region ExperimentConfig::region_o_prime() const {
    return Region::from_coords(geometry(), RegionLabel::O_prime, oprime0, oprime1);
}
Region ExperimentConfig::region_o_plus() const {
    return Region::from_coords(geometry(), RegionLabel::O_plus, oplus0, oplus1);
}
Region ExperimentConfig::region_a() const {
    return Region::from_coords(geometry(), RegionLabel::A, a0, a1);
}
Region ExperimentConfig::region_a_plus() const {
    return Region::from_coords(geometry(), RegionLabel::A_plus, aplus0, aplus1);
}

std::vector<double> ExperimentConfig::tau_schedule() const {
    std::vector<double> taus;
    for (int p = 1; p <= tau_count; ++p) taus.push_back(std::pow(2.0, -p));
    return taus;
}

void ExperimentConfig::validate() const {
    if (!(s > 0.0 && s < 1.0))
        throw std::invalid_argument("config: s must lie in (0,1)");
    const Geometry g = geometry();  // validates extents and node counts
    if (modes > g.n_nodes[0] / 4)
        throw std::invalid_argument("config: K exceeds the n/4 Nyquist guard");
    if (dict_count < 1 || modes < 8 * dict_count)
        throw std::invalid_argument("config: ambient modes K must be >= 8 * J");
    const Region o = region_o(), opr = region_o_prime(), opl = region_o_plus();
    const Region a = region_a(), apl = region_a_plus();
    if (!regions_disjoint(a, o))
        throw std::invalid_argument("config: region A overlaps O (A and O must be disjoint)");
    if (!region_strictly_inside(a, apl))
        throw std::invalid_argument("config: A must be compactly contained in A_plus");
    if (!region_strictly_inside(opr, o))
        throw std::invalid_argument("config: O_prime must be compactly contained in O");
    if (!region_strictly_inside(o, opl))
        throw std::invalid_argument("config: O must be compactly contained in O_plus");
    if (!regions_disjoint(apl, o))
        throw std::invalid_argument("config: region A_plus overlaps O");
    if (tau_count < 2 || tau_count > 30)
        throw std::invalid_argument("config: tau_count outside [2,30]");
    if (comp_modes < 8 * comp_dict)
        throw std::invalid_argument("config: compression modes must be >= 8 * dict count");
}

namespace {

struct KeyRef {
    const char* section;
    const char* key;
};

double to_double(const std::string& v, const std::string& where) {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("config: malformed number for " + where);
    return x;
}

long to_long(const std::string& v, const std::string& where) {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("config: malformed integer for " + where);
    return x;
}

void assign_pair(const std::string& v, double& lo, double& hi, const std::string& where) {
    std::istringstream ss(v);
    if (!(ss >> lo >> hi)) throw std::invalid_argument("config: expected two numbers for " + where);
    std::string rest;
    if (ss >> rest) throw std::invalid_argument("config: trailing tokens for " + where);
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

}  // namespace

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    ExperimentConfig cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config: malformed section at line " +
                                            std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value at line " +
                                        std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        const std::string where = section + "." + key;

        if (section == "geometry") {
            if (key == "kind") cfg.kind = val;
            else if (key == "length") cfg.length = to_double(val, where);
            else if (key == "length_y") cfg.length_y = to_double(val, where);
            else if (key == "n") cfg.n = static_cast<int>(to_long(val, where));
            else if (key == "n_y") cfg.n_y = static_cast<int>(to_long(val, where));
            else throw std::invalid_argument("config: unknown key " + where);
        } else if (section == "regions") {
            if (key == "O") assign_pair(val, cfg.o0, cfg.o1, where);
            else if (key == "O_prime") assign_pair(val, cfg.oprime0, cfg.oprime1, where);
            else if (key == "O_plus") assign_pair(val, cfg.oplus0, cfg.oplus1, where);
            else if (key == "A") assign_pair(val, cfg.a0, cfg.a1, where);
            else if (key == "A_plus") assign_pair(val, cfg.aplus0, cfg.aplus1, where);
            else throw std::invalid_argument("config: unknown key " + where);
        } else if (section == "fractional") {
            if (key == "s") cfg.s = to_double(val, where);
            else if (key == "K") cfg.modes = static_cast<int>(to_long(val, where));
            else if (key == "J") cfg.dict_count = static_cast<int>(to_long(val, where));
            else throw std::invalid_argument("config: unknown key " + where);
        } else if (section == "family") {
            if (key == "tau_count") cfg.tau_count = static_cast<int>(to_long(val, where));
            else throw std::invalid_argument("config: unknown key " + where);
        } else if (section == "compression") {
            if (key == "R") cfg.comp_r = to_double(val, where);
            else if (key == "J") cfg.comp_dict = static_cast<int>(to_long(val, where));
            else if (key == "K") cfg.comp_modes = static_cast<int>(to_long(val, where));
            else if (key == "n") cfg.comp_n = static_cast<int>(to_long(val, where));
            else if (key == "nt") cfg.comp_nt = static_cast<int>(to_long(val, where));
            else if (key == "x_stride") cfg.comp_stride = static_cast<int>(to_long(val, where));
            else if (key == "O") assign_pair(val, cfg.comp_o0, cfg.comp_o1, where);
            else if (key == "O_plus") assign_pair(val, cfg.comp_oplus0, cfg.comp_oplus1, where);
            else throw std::invalid_argument("config: unknown key " + where);
        } else if (section == "runge") {
            if (key == "n") cfg.runge_n = static_cast<int>(to_long(val, where));
            else if (key == "O") assign_pair(val, cfg.runge_o0, cfg.runge_o1, where);
            else if (key == "A") assign_pair(val, cfg.runge_a0, cfg.runge_a1, where);
            else if (key == "A_plus") assign_pair(val, cfg.runge_aplus0, cfg.runge_aplus1, where);
            else throw std::invalid_argument("config: unknown key " + where);
        } else if (section == "weyl") {
            if (key == "count") cfg.weyl_count = static_cast<int>(to_long(val, where));
            else if (key == "R") cfg.weyl_r = to_double(val, where);
            else if (key == "base_length") cfg.weyl_base_length = to_double(val, where);
            else if (key == "base_n") cfg.weyl_base_n = static_cast<int>(to_long(val, where));
            else throw std::invalid_argument("config: unknown key " + where);
        } else if (section == "eigs") {
            if (key == "dump_vectors") cfg.dump_vectors = (val == "true" || val == "1");
            else throw std::invalid_argument("config: unknown key " + where);
        } else if (section == "run") {
            if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_long(val, where));
            else if (key == "out") cfg.out = val;
            else if (key == "threads") cfg.threads = static_cast<int>(to_long(val, where));
            else throw std::invalid_argument("config: unknown key " + where);
        } else {
            throw std::invalid_argument("config: unknown section [" + section + "]");
        }
    }
    cfg.validate();
    return cfg;
}

void apply_env_overrides(ExperimentConfig& cfg) {
    if (const char* v = std::getenv("FRACLAB_OUT")) cfg.out = v;
    if (const char* v = std::getenv("FRACLAB_SEED")) cfg.seed = std::strtoull(v, nullptr, 10);
    if (const char* v = std::getenv("FRACLAB_THREADS")) cfg.threads = std::atoi(v);
}

}  // namespace fraclab
