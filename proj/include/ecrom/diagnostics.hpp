#pragma once

#include <array>
#include <string>
#include <vector>

#include "ecrom/operators.hpp"

namespace ecrom {

/// Omega-norm of a constant reference velocity (u = v_ref, v = 0).
double reference_velocity_norm(const FomOperators& ops, double v_ref);
/// Omega_p-norm of a constant reference pressure.
double reference_pressure_norm(const FomOperators& ops, double p_ref);

/// ||V_rom - V_fom||_Omega / ||V_ref||_Omega
double error_velocity(const Vector& V_rom, const Vector& V_fom, const Vector& omega, double ref_norm);

/// Both fields mean-shifted, then ||p_rom - p_fom||_Omega_p / ||p_ref||_Omega_p.
double error_pressure(const Vector& p_rom, const Vector& p_fom, const Vector& omega_p, double ref_norm);

/// ||(I - Phi Phi^T Omega)(V_fom - V_bc)||_Omega, unscaled.
double basis_projection_error(const Matrix& Phi, const Vector& omega, const Vector& V_fom, const Vector& V_bc);

/// (K_r^n - K_r(0), K_r(0) - K_h(0), K_h(0) - K_h^n); their sum is K_r^n - K_h^n.
std::array<double, 3> energy_error_decomposition(double K_rom_n, double K_rom_0, double K_fom_0, double K_fom_n);

/// ||M V - y_M||_inf
double divergence_residual(const FomOperators& ops, const Vector& V);

struct DiagnosticsTrace {
    std::vector<double> times;
    std::vector<double> K_fom, K_rom, K_rom_total;
    std::vector<double> P_u_fom, P_v_fom, P_u_rom, P_v_rom;
    std::vector<double> eps_V, eps_p, eps_V_best, div_residual;
    std::vector<std::array<double, 3>> energy_error_terms;

    std::size_t size() const { return times.size(); }
};

/// CSV with header t,K_fom,K_rom,P_u_fom,P_u_rom,P_v_fom,P_v_rom,eps_V,eps_p,eps_V_best,div_residual.
void write_trace_csv(const std::string& path, const DiagnosticsTrace& trace);

}  // namespace ecrom
