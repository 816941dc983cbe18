#include "ecrom/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ecrom {

namespace {

double weighted_norm(const Vector& x, const Vector& w) { return std::sqrt(x.dot(w.cwiseProduct(x))); }

}  // namespace

double reference_velocity_norm(const FomOperators& ops, double v_ref) {
    const Index nu = ops.grid.num_u();
    return std::abs(v_ref) * std::sqrt(ops.omega.head(nu).sum());
}

double reference_pressure_norm(const FomOperators& ops, double p_ref) {
    return std::abs(p_ref) * std::sqrt(ops.omega_p.sum());
}

double error_velocity(const Vector& V_rom, const Vector& V_fom, const Vector& omega, double ref_norm) {
    if (!(ref_norm > 0.0)) throw std::invalid_argument("error_velocity: reference norm must be positive");
    if (V_rom.size() != V_fom.size() || V_rom.size() != omega.size())
        throw std::invalid_argument("error_velocity: length mismatch");
    return weighted_norm(V_rom - V_fom, omega) / ref_norm;
}

double error_pressure(const Vector& p_rom, const Vector& p_fom, const Vector& omega_p, double ref_norm) {
    if (!(ref_norm > 0.0)) throw std::invalid_argument("error_pressure: reference norm must be positive");
    if (p_rom.size() != p_fom.size() || p_rom.size() != omega_p.size())
        throw std::invalid_argument("error_pressure: length mismatch");
    const double w = omega_p.sum();
    const double mr = p_rom.dot(omega_p) / w;
    const double mf = p_fom.dot(omega_p) / w;
    const Vector d = (p_rom.array() - mr).matrix() - (p_fom.array() - mf).matrix();
    return weighted_norm(d, omega_p) / ref_norm;
}

double basis_projection_error(const Matrix& Phi, const Vector& omega, const Vector& V_fom, const Vector& V_bc) {
    const Vector h = V_fom - V_bc;
    const Vector r = h - Phi * (Phi.transpose() * omega.cwiseProduct(h));
    return weighted_norm(r, omega);
}

std::array<double, 3> energy_error_decomposition(double K_rom_n, double K_rom_0, double K_fom_0, double K_fom_n) {
    return {K_rom_n - K_rom_0, K_rom_0 - K_fom_0, K_fom_0 - K_fom_n};
}

double divergence_residual(const FomOperators& ops, const Vector& V) {
    if (V.size() != ops.num_velocity()) throw std::invalid_argument("divergence_residual: length mismatch");
    return (ops.M * V - ops.y_M).lpNorm<Eigen::Infinity>();
}

void write_trace_csv(const std::string& path, const DiagnosticsTrace& tr) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "t,K_fom,K_rom,P_u_fom,P_u_rom,P_v_fom,P_v_rom,eps_V,eps_p,eps_V_best,div_residual\n";
    char buf[64];
    auto put = [&](double v, bool last) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf << (last ? '\n' : ',');
    };
    for (std::size_t n = 0; n < tr.size(); ++n) {
        put(tr.times[n], false);
        put(tr.K_fom[n], false);
        put(tr.K_rom[n], false);
        put(tr.P_u_fom[n], false);
        put(tr.P_u_rom[n], false);
        put(tr.P_v_fom[n], false);
        put(tr.P_v_rom[n], false);
        put(tr.eps_V[n], false);
        put(tr.eps_p[n], false);
        put(tr.eps_V_best[n], false);
        put(tr.div_residual[n], true);
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace ecrom
