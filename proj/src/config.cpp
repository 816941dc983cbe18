#include "ecrom/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ecrom {

using nlohmann::json;

TimeMethod parse_method(const std::string& name) {
    if (name == "imr" || name == "implicit_midpoint") return TimeMethod::ImplicitMidpoint;
    if (name == "rk4" || name == "erk4") return TimeMethod::ExplicitRK4;
    throw std::invalid_argument("unknown time integration method '" + name + "' (expected imr or rk4)");
}

CaseConfig default_config(CaseKind kind, bool paper_scale) {
    CaseConfig c;
    c.kind = kind;
    c.paper_scale = paper_scale;
    switch (kind) {
        case CaseKind::ShearLayer:
            c.nx = c.ny = paper_scale ? 200 : 64;
            c.fom = {TimeMethod::ExplicitRK4, 0.01, 4.0};
            c.rom = {TimeMethod::ImplicitMidpoint, 0.01, 4.0};
            c.modes = {2, 4, 8, 16};
            break;
        case CaseKind::LidDrivenCavity:
            c.nx = c.ny = paper_scale ? 100 : 64;
            c.fom = {TimeMethod::ExplicitRK4, 0.01, 10.0};
            c.rom = {TimeMethod::ExplicitRK4, 0.01, 10.0};
            c.modes = {5, 10, 15, 20};
            break;
        case CaseKind::Actuator:
            c.nx = paper_scale ? 240 : 120;
            c.ny = paper_scale ? 80 : 40;
            c.fom = {TimeMethod::ExplicitRK4, 0.025, 20.0};
            c.rom = {TimeMethod::ExplicitRK4, 0.025, 20.0};
            c.modes = {10};
            break;
    }
    return c;
}

void CaseConfig::apply_defaults() {
    const CaseConfig d = default_config(kind, paper_scale);
    if (nx == 0) nx = d.nx;
    if (ny == 0) ny = d.ny;
    if (modes.empty()) modes = d.modes;
}

void CaseConfig::validate() const {
    if (nx < 2 || ny < 2) throw std::invalid_argument("config: grid must be at least 2x2");
    fom.validate();
    rom.validate();
    (void)fom.num_steps();
    (void)rom.num_steps();
    if (modes.empty()) throw std::invalid_argument("config: no mode counts given");
    for (int m : modes)
        if (m < 1) throw std::invalid_argument("config: mode counts must be positive");
    if (pressure_modes && *pressure_modes < 1) throw std::invalid_argument("config: pressure_modes must be positive");
    if (constrained && kind != CaseKind::ShearLayer)
        throw std::invalid_argument("config: the momentum-constrained basis needs a periodic case");
    const double ratio = fom.dt * fom.snapshot_stride / rom.dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 || std::round(ratio) < 1.0)
        throw std::invalid_argument("config: snapshot spacing must be a whole number of ROM steps");
    if (params.c_t < 0.0) throw std::invalid_argument("config: C_T must be non-negative");
}

namespace {

void read_integrator(const json& j, IntegratorConfig& c) {
    if (j.contains("method")) c.method = parse_method(j.at("method").get<std::string>());
    if (j.contains("dt")) c.dt = j.at("dt").get<double>();
    if (j.contains("t_end")) c.t_end = j.at("t_end").get<double>();
    if (j.contains("newton_tol")) c.newton_tol = j.at("newton_tol").get<double>();
    if (j.contains("newton_max_iter")) c.newton_max_iter = j.at("newton_max_iter").get<int>();
    if (j.contains("snapshot_stride")) c.snapshot_stride = j.at("snapshot_stride").get<int>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : keys) ok = ok || it.key() == k;
        if (!ok) throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
    }
}

}  // namespace

CaseConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    reject_unknown(j,
                   {"case", "params", "grid", "paper_scale", "fom", "rom", "modes", "pressure_modes", "constrained",
                    "svd_method", "seed", "output_dir"},
                   "top level");
    if (!j.contains("case")) throw std::invalid_argument("config: missing required key 'case'");
    const CaseKind kind = parse_case_name(j.at("case").get<std::string>());
    const bool paper = j.value("paper_scale", false);
    CaseConfig c = default_config(kind, paper);
    c.nx = c.ny = 0;
    c.modes.clear();
    if (j.contains("params")) {
        const json& p = j.at("params");
        reject_unknown(p, {"delta", "epsilon", "nu", "Re", "C_T"}, "params");
        c.params.delta = p.value("delta", c.params.delta);
        c.params.epsilon = p.value("epsilon", c.params.epsilon);
        c.params.nu = p.value("nu", c.params.nu);
        c.params.Re = p.value("Re", c.params.Re);
        c.params.c_t = p.value("C_T", c.params.c_t);
    }
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        reject_unknown(g, {"nx", "ny"}, "grid");
        c.nx = g.value("nx", 0);
        c.ny = g.value("ny", 0);
    }
    if (j.contains("fom")) read_integrator(j.at("fom"), c.fom);
    c.rom.dt = c.fom.dt;
    c.rom.t_end = c.fom.t_end;
    if (j.contains("rom")) read_integrator(j.at("rom"), c.rom);
    if (j.contains("modes")) c.modes = j.at("modes").get<std::vector<int>>();
    if (j.contains("pressure_modes")) {
        const json& pm = j.at("pressure_modes");
        if (pm.is_string()) {
            if (pm.get<std::string>() != "same")
                throw std::invalid_argument("config: pressure_modes must be an integer or \"same\"");
        } else {
            c.pressure_modes = pm.get<int>();
        }
    }
    c.constrained = j.value("constrained", false);
    if (j.contains("svd_method")) {
        const std::string m = j.at("svd_method").get<std::string>();
        if (m == "thin") c.svd_method = SvdMethod::ThinSvd;
        else if (m == "snapshots") c.svd_method = SvdMethod::Snapshots;
        else throw std::invalid_argument("config: svd_method must be \"thin\" or \"snapshots\"");
    }
    c.seed = j.value("seed", std::uint64_t(1));
    c.output_dir = j.value("output_dir", std::string("out"));
    return c;
}

CaseConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace ecrom
