#include "ecrom/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ecrom/diagnostics.hpp"
#include "ecrom/io.hpp"
#include "ecrom/pod.hpp"
#include "ecrom/rom.hpp"

namespace ecrom {

Stage parse_stage(const std::string& name) {
    if (name == "fom") return Stage::Fom;
    if (name == "pod") return Stage::Pod;
    if (name == "rom") return Stage::Rom;
    if (name == "compare") return Stage::Compare;
    if (name == "all") return Stage::All;
    throw std::invalid_argument("unknown stage '" + name + "' (expected fom, pod, rom, compare or all)");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// timings.csv is merged across separate stage invocations.
class TimingLog {
public:
    explicit TimingLog(std::string path) : path_(std::move(path)) {
        std::ifstream in(path_);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            const auto comma = line.find(',');
            if (comma == std::string::npos) continue;
            entries_[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
        }
    }
    void set(const std::string& stage, double s) { entries_[stage] = s; }
    void write() const {
        std::ofstream out(path_);
        if (!out) throw std::runtime_error("cannot open for writing: " + path_);
        out << "stage,seconds\n";
        char buf[64];
        for (const auto& [k, v] : entries_) {
            std::snprintf(buf, sizeof buf, "%.6f", v);
            out << k << ',' << buf << '\n';
        }
    }

private:
    std::string path_;
    std::map<std::string, double> entries_;
};

SnapshotSet load_snapshots_or_fail(const ArtifactPaths& paths) {
    if (!io::file_exists(paths.snapshots()))
        throw std::runtime_error("missing snapshot file: " + paths.snapshots() + " (run the fom stage first)");
    return read_snapshots(paths.snapshots());
}

void require_file(const std::string& path, const std::string& stage) {
    if (!io::file_exists(path)) throw std::runtime_error("missing file " + path + " (run the " + stage + " stage first)");
}

IntegratorConfig rom_integrator(const CaseConfig& cfg) {
    IntegratorConfig r = cfg.rom;
    r.snapshot_stride = int(std::lround(cfg.fom.dt * cfg.fom.snapshot_stride / cfg.rom.dt));
    return r;
}

CaseSetup build_case(const CaseConfig& cfg) { return make_case(cfg.kind, cfg.nx, cfg.ny, cfg.params); }

void check_snapshots_match(const SnapshotSet& s, const FomOperators& ops) {
    if (s.X.rows() != ops.num_velocity() || s.P.rows() != ops.num_pressure())
        throw std::runtime_error("snapshot file does not match the configured grid");
}

void stage_fom(const CaseConfig& cfg, const ArtifactPaths& paths, TimingLog& timings, std::ostream& log) {
    const auto t0 = Clock::now();
    CaseSetup cs = build_case(cfg);
    const FomSolver solver(*cs.ops, cs.nu);
    const Vector V_bc = compute_lifting(*cs.ops, solver.poisson(), cs.ops->y_M);
    log << "fom: " << case_name(cfg.kind) << " " << cfg.nx << "x" << cfg.ny << ", N_V=" << cs.ops->num_velocity()
        << ", N_p=" << cs.ops->num_pressure() << ", " << cfg.fom.num_steps() << " steps\n";
    const SnapshotSet snaps = solver.run(cs.init, cfg.fom, V_bc);
    write_snapshots(paths.snapshots(), snaps);
    double max_div = 0.0;
    for (Index k = 0; k < snaps.count(); ++k)
        max_div = std::max(max_div, divergence_residual(*cs.ops, snaps.X.col(k) + V_bc));
    const double secs = seconds_since(t0);
    timings.set("fom", secs);
    log << "fom: " << snaps.count() << " snapshots, max divergence residual " << max_div << ", " << secs << " s\n";
}

void stage_pod(const CaseConfig& cfg, const ArtifactPaths& paths, TimingLog& timings, std::ostream& log) {
    const SnapshotSet snaps = load_snapshots_or_fail(paths);
    CaseSetup cs = build_case(cfg);
    check_snapshots_match(snaps, *cs.ops);
    const FomOperators& ops = *cs.ops;
    const auto t0 = Clock::now();

    int max_m = 0, max_mp = 0;
    for (int m : cfg.modes) {
        max_m = std::max(max_m, m);
        max_mp = std::max(max_mp, cfg.pressure_modes_for(m));
    }
    // One decomposition serves every truncation level.
    VelocityBasis vb = cfg.constrained
                           ? constrained_pod(snaps.X, ops.omega, momentum_indicators(ops.grid), max_m, cfg.svd_method)
                           : weighted_pod(snaps.X, ops.omega, max_m, cfg.svd_method);
    Vector sigma_p;
    const Matrix Pi_all = pressure_pod(snaps.P, ops.omega_p, max_mp, &sigma_p, cfg.svd_method);
    const double secs = seconds_since(t0);
    timings.set("SVD", secs);

    for (int m : cfg.modes) {
        RomBasis b;
        b.Phi = vb.Phi.leftCols(m);
        b.E = vb.E;
        b.sigma = vb.sigma;
        b.Pi = Pi_all.leftCols(cfg.pressure_modes_for(m));
        b.sigma_p = sigma_p;
        write_basis(paths.basis(m), b);
    }
    log << "pod: " << (cfg.constrained ? "constrained" : "standard") << " basis, leading singular values";
    for (Index k = 0; k < std::min<Index>(4, vb.sigma.size()); ++k) log << ' ' << vb.sigma[k];
    log << ", " << secs << " s\n";
}

void stage_rom(const CaseConfig& cfg, const ArtifactPaths& paths, TimingLog& timings, std::ostream& log) {
    const SnapshotSet snaps = load_snapshots_or_fail(paths);
    CaseSetup cs = build_case(cfg);
    check_snapshots_match(snaps, *cs.ops);
    const FomOperators& ops = *cs.ops;
    const IntegratorConfig rcfg = rom_integrator(cfg);
    const FomSolver solver(ops, cs.nu);
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal;

    double total_pre = 0.0, total_online = 0.0;
    for (int m : cfg.modes) {
        require_file(paths.basis(m), "pod");
        const RomBasis basis = read_basis(paths.basis(m));
        auto t0 = Clock::now();
        const RomOperators rops = precompute_rom_operators(ops, basis, snaps.V_bc, cs.nu);
        const double pre = seconds_since(t0);
        write_rom_operators(paths.rom_operators(m), rops);

        // Spot check of the reduced right-hand side against the projected FOM one.
        double worst = 0.0;
        const Vector a_ref = basis.Phi.transpose() * ops.omega.cwiseProduct(snaps.X.col(0));
        for (int trial = 0; trial < 3; ++trial) {
            Vector a(m);
            for (Index i = 0; i < m; ++i) a[i] = normal(rng) * (1.0 + std::abs(a_ref[i]));
            const Vector V = reconstruct_velocity(basis.Phi, a, snaps.V_bc);
            const Vector full = basis.Phi.transpose() * (solver.rhs_cd(V, 0.3) - ops.y_G);
            const Vector red = rom_rhs(rops, a, 0.3);
            worst = std::max(worst, (full - red).lpNorm<Eigen::Infinity>() /
                                        std::max(1.0, full.lpNorm<Eigen::Infinity>()));
        }

        const Vector a0 = initial_coeffs(basis.Phi, ops.omega, snaps.X.col(0) + snaps.V_bc, snaps.V_bc);
        const RomTrajectory traj = run_rom(rops, a0, rcfg, snaps.times.front());
        write_trajectory(paths.coefficients(m), traj);
        total_pre += pre;
        total_online += traj.online_seconds;
        timings.set("precompute_M" + std::to_string(m), pre);
        timings.set("online_M" + std::to_string(m), traj.online_seconds);
        log << "rom: M=" << m << " precompute " << pre << " s, online " << traj.online_seconds
            << " s, oracle mismatch " << worst << "\n";
    }
    timings.set("precompute", total_pre);
    timings.set("online", total_online);
}

void stage_compare(const CaseConfig& cfg, const ArtifactPaths& paths, std::ostream& log) {
    const SnapshotSet snaps = load_snapshots_or_fail(paths);
    CaseSetup cs = build_case(cfg);
    check_snapshots_match(snaps, *cs.ops);
    const FomOperators& ops = *cs.ops;
    const double vref = reference_velocity_norm(ops, cs.v_ref);
    const double pref = reference_pressure_norm(ops, cs.p_ref);

    for (int m : cfg.modes) {
        require_file(paths.basis(m), "pod");
        require_file(paths.rom_operators(m), "rom");
        require_file(paths.coefficients(m), "rom");
        const RomBasis basis = read_basis(paths.basis(m));
        const RomOperators rops = read_rom_operators(paths.rom_operators(m), ops.force.schedule);
        const RomTrajectory traj = read_trajectory(paths.coefficients(m));
        if (Index(traj.times.size()) != snaps.count())
            throw std::runtime_error("ROM trajectory and snapshots have different lengths");
        std::optional<PressureRecovery> prec;
        if (rops.has_pressure()) prec.emplace(rops);

        DiagnosticsTrace tr;
        const double K_fom0 = 0.5 * snaps.X.col(0).dot(ops.omega.cwiseProduct(snaps.X.col(0)));
        const double K_rom0 = rom_kinetic_energy(traj.A.col(0));
        for (Index n = 0; n < snaps.count(); ++n) {
            if (std::abs(traj.times[std::size_t(n)] - snaps.times[std::size_t(n)]) >
                1e-9 * std::max(1.0, std::abs(snaps.times[std::size_t(n)])))
                throw std::runtime_error("ROM and snapshot time grids do not align");
            const Vector a = traj.A.col(n);
            const Vector V_fom = snaps.X.col(n) + snaps.V_bc;
            const Vector V_rom = reconstruct_velocity(basis.Phi, a, snaps.V_bc);
            const double t = snaps.times[std::size_t(n)];
            const double K_fom = 0.5 * snaps.X.col(n).dot(ops.omega.cwiseProduct(snaps.X.col(n)));
            const double K_rom = rom_kinetic_energy(a);
            const auto [puf, pvf] = momentum(ops, V_fom);
            const auto [pur, pvr] = momentum(ops, V_rom);
            tr.times.push_back(t);
            tr.K_fom.push_back(K_fom);
            tr.K_rom.push_back(K_rom);
            tr.K_rom_total.push_back(kinetic_energy(ops, V_rom));
            tr.P_u_fom.push_back(puf);
            tr.P_v_fom.push_back(pvf);
            tr.P_u_rom.push_back(pur);
            tr.P_v_rom.push_back(pvr);
            tr.eps_V.push_back(error_velocity(V_rom, V_fom, ops.omega, vref));
            if (prec) {
                const auto [q, p_rom] = prec->recover(rops, basis.Pi, a, t);
                tr.eps_p.push_back(error_pressure(p_rom, snaps.P.col(n), ops.omega_p, pref));
            } else {
                tr.eps_p.push_back(std::nan(""));
            }
            tr.eps_V_best.push_back(basis_projection_error(basis.Phi, ops.omega, V_fom, snaps.V_bc));
            tr.div_residual.push_back(divergence_residual(ops, V_rom));
            tr.energy_error_terms.push_back(energy_error_decomposition(K_rom, K_rom0, K_fom0, K_fom));
        }
        write_trace_csv(paths.trace(m), tr);
        double drift = 0.0, eps_max = 0.0;
        for (std::size_t n = 0; n < tr.size(); ++n) {
            drift = std::max(drift, std::abs(tr.K_rom[n] - K_rom0));
            eps_max = std::max(eps_max, tr.eps_V[n]);
        }
        log << "compare: M=" << m << " max |K_r - K_r(0)| " << drift;
        if (K_rom0 > 0.0) log << " (relative " << drift / K_rom0 << ")";
        log << ", max eps_V " << eps_max << " -> " << paths.trace(m) << "\n";
    }
}

}  // namespace

void run_stage(Stage stage, CaseConfig cfg, std::ostream& log) {
    cfg.apply_defaults();
    cfg.validate();
    std::filesystem::create_directories(cfg.output_dir);
    const ArtifactPaths paths{cfg.output_dir};
    TimingLog timings(paths.timings());
    const bool all = stage == Stage::All;
    if (all || stage == Stage::Fom) stage_fom(cfg, paths, timings, log);
    if (all || stage == Stage::Pod) stage_pod(cfg, paths, timings, log);
    if (all || stage == Stage::Rom) stage_rom(cfg, paths, timings, log);
    if (all || stage == Stage::Compare) stage_compare(cfg, paths, log);
    if (stage != Stage::Compare) timings.write();
}

}  // namespace ecrom
