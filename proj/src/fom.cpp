#include "ecrom/fom.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "ecrom/io.hpp"

namespace ecrom {

void IntegratorConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("integrator: dt must be positive");
    if (!(t_end > 0.0)) throw std::invalid_argument("integrator: t_end must be positive");
    if (!(newton_tol > 0.0)) throw std::invalid_argument("integrator: newton_tol must be positive");
    if (newton_max_iter < 1) throw std::invalid_argument("integrator: newton_max_iter must be >= 1");
    if (snapshot_stride < 1) throw std::invalid_argument("integrator: snapshot_stride must be >= 1");
}

int IntegratorConfig::num_steps() const {
    validate();
    const double n = std::round(t_end / dt);
    if (n < 1.0 || std::abs(n * dt - t_end) > 1e-9 * t_end)
        throw std::invalid_argument("integrator: t_end is not a whole number of steps");
    return int(n);
}

using ColSparse = Eigen::SparseMatrix<double>;

struct PoissonSolver::Impl {
    Eigen::SimplicialLDLT<ColSparse> ldlt;
    double compat_floor = 0.0;
};

PoissonSolver::PoissonSolver(const FomOperators& ops) : impl_(std::make_unique<Impl>()) {
    singular_ = !ops.grid.has_outflow();
    ColSparse A = -ColSparse(ops.L);
    if (singular_) {
        // Pin the first pressure: drop its couplings and put 1 on the diagonal.
        for (Index c = 0; c < A.outerSize(); ++c)
            for (ColSparse::InnerIterator it(A, c); it; ++it)
                if (it.row() == 0 || it.col() == 0) it.valueRef() = (it.row() == it.col()) ? 1.0 : 0.0;
        A.prune(0.0);
    }
    impl_->ldlt.compute(A);
    if (impl_->ldlt.info() != Eigen::Success) throw std::runtime_error("pressure Poisson factorization failed");
    double lmax = 0.0;
    for (Index k = 0; k < ops.L.nonZeros(); ++k) lmax = std::max(lmax, std::abs(ops.L.valuePtr()[k]));
    impl_->compat_floor = 1e-14 * double(ops.L.rows()) * lmax;
}

PoissonSolver::~PoissonSolver() = default;
PoissonSolver::PoissonSolver(PoissonSolver&&) noexcept = default;
PoissonSolver& PoissonSolver::operator=(PoissonSolver&&) noexcept = default;

void remove_mean(Vector& p) {
    if (p.size() > 0) p.array() -= p.mean();
}

Vector PoissonSolver::solve(const Vector& rhs_in) const {
    Vector rhs = -rhs_in;
    if (singular_) {
        const double sum = rhs.sum();
        const double tol = 1e-10 * rhs.cwiseAbs().sum() + impl_->compat_floor;
        if (std::abs(sum) > tol)
            throw std::invalid_argument("pressure Poisson right-hand side is incompatible (nonzero sum)");
        rhs.array() -= rhs.mean();
        rhs[0] = 0.0;
    }
    Vector p = impl_->ldlt.solve(rhs);
    if (impl_->ldlt.info() != Eigen::Success) throw std::runtime_error("pressure Poisson solve failed");
    if (singular_) remove_mean(p);
    return p;
}

FomSolver::FomSolver(const FomOperators& ops, double nu, bool with_convection)
    : ops_(&ops), nu_(nu), with_convection_(with_convection), poisson_(ops),
      omega_inv_(ops.omega.cwiseInverse()) {
    if (nu < 0.0) throw std::invalid_argument("viscosity must be non-negative");
}

Vector FomSolver::rhs_cd(const Vector& V, double t) const {
    if (V.size() != ops_->num_velocity()) throw std::invalid_argument("rhs_cd: velocity length mismatch");
    Vector F = nu_ * (ops_->D * V + ops_->y_D);
    if (with_convection_) F -= convection(*ops_, V, V);
    if (ops_->force.spatial.size() == F.size()) F += ops_->force.at(t);
    return F;
}

Vector FomSolver::project(const Vector& V) const {
    const Vector phi = poisson_.solve(ops_->M * V - ops_->y_M);
    return V - omega_inv_.asDiagonal() * (ops_->G * phi);
}

Vector FomSolver::pressure(const Vector& V, double t) const {
    const Vector rhs = ops_->M * (omega_inv_.asDiagonal() * (rhs_cd(V, t) - ops_->y_G));
    return poisson_.solve(rhs);
}

StateVector FomSolver::step_erk4(const StateVector& s, double dt) const {
    static constexpr double c[4] = {0.0, 0.5, 0.5, 1.0};
    // Shifted tableau: row i gives the weights for stage i+1; the last row is b.
    static constexpr double a[4][4] = {{0.5, 0, 0, 0},
                                       {0, 0.5, 0, 0},
                                       {0, 0, 1.0, 0},
                                       {1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6}};
    Vector k[4];
    Vector V = s.V;
    for (int i = 0; i < 4; ++i) {
        k[i] = omega_inv_.asDiagonal() * (rhs_cd(V, s.t + c[i] * dt) - ops_->y_G);
        Vector Vhat = s.V;
        for (int j = 0; j <= i; ++j)
            if (a[i][j] != 0.0) Vhat += (dt * a[i][j]) * k[j];
        V = project(Vhat);
    }
    StateVector out;
    out.V = std::move(V);
    out.t = s.t + dt;
    out.p = pressure(out.V, out.t);
    return out;
}

StateVector FomSolver::step_implicit_midpoint(const StateVector& s, const IntegratorConfig& cfg,
                                              NewtonStats* stats) const {
    const FomOperators& ops = *ops_;
    const Index nv = ops.num_velocity();
    const Index np = ops.num_pressure();
    const double dt = cfg.dt;
    const double h = 0.5 * dt;
    const double tm = s.t + h;
    const double pscale = 1.0 / std::max(ops.grid.dx(), ops.grid.dy());

    Vector V1 = s.V;
    Vector p = s.p.size() == np ? s.p : Vector::Zero(np);
    const Vector hOinv = h * omega_inv_;

    auto residual = [&](Vector& rv, Vector& rp) {
        rv = (V1 - s.V) - hOinv.asDiagonal() * (rhs_cd(V1, tm) - ops.G * p - ops.y_G);
        rp = ops.M * V1 - ops.y_M;
        if (poisson_.singular()) rp[0] = 0.0;
        return std::max(rv.lpNorm<Eigen::Infinity>(), pscale * rp.lpNorm<Eigen::Infinity>());
    };

    Vector rv, rp;
    double res = residual(rv, rp);
    int it = 0;
    Eigen::SparseLU<ColSparse> lu;
    while (res > cfg.newton_tol) {
        if (it >= cfg.newton_max_iter)
            throw std::runtime_error("implicit midpoint Newton did not converge (residual " +
                                     std::to_string(res) + ")");
        SparseMatrix JF = nu_ * ops.D;
        if (with_convection_) JF -= convection_jacobian(ops, V1);
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(std::size_t(JF.nonZeros() + 3 * ops.G.nonZeros() + nv));
        for (Index r = 0; r < nv; ++r) trip.emplace_back(r, r, 1.0);
        for (Index r = 0; r < nv; ++r)
            for (SparseMatrix::InnerIterator itj(JF, r); itj; ++itj)
                trip.emplace_back(r, itj.col(), -hOinv[r] * itj.value());
        for (Index r = 0; r < nv; ++r)
            for (SparseMatrix::InnerIterator itg(ops.G, r); itg; ++itg)
                trip.emplace_back(r, nv + itg.col(), hOinv[r] * itg.value());
        for (Index r = 0; r < np; ++r) {
            if (poisson_.singular() && r == 0) {
                trip.emplace_back(nv, nv, 1.0);
                continue;
            }
            for (SparseMatrix::InnerIterator itm(ops.M, r); itm; ++itm)
                trip.emplace_back(nv + r, itm.col(), itm.value());
        }
        ColSparse J(nv + np, nv + np);
        J.setFromTriplets(trip.begin(), trip.end());
        J.makeCompressed();
        lu.compute(J);
        if (lu.info() != Eigen::Success) throw std::runtime_error("implicit midpoint: singular Newton matrix");
        Vector rhs(nv + np);
        rhs << -rv, -rp;
        const Vector delta = lu.solve(rhs);
        V1 += delta.head(nv);
        p += delta.tail(np);
        ++it;
        res = residual(rv, rp);
    }
    if (it > 0 && res > 0.0) {
        // Extra correction with the last factorization, accepted only if it
        // lowers the residual; brings the stage equations to round-off.
        Vector rhs(nv + np);
        rhs << -rv, -rp;
        const Vector delta = lu.solve(rhs);
        const Vector V_keep = V1, p_keep = p;
        V1 += delta.head(nv);
        p += delta.tail(np);
        Vector rv2, rp2;
        const double res2 = residual(rv2, rp2);
        if (res2 < res) {
            res = res2;
        } else {
            V1 = V_keep;
            p = p_keep;
        }
    }
    if (stats) *stats = {it, res};

    StateVector out;
    out.V = 2.0 * V1 - s.V;
    out.t = s.t + dt;
    out.p = pressure(out.V, out.t);
    return out;
}

StateVector FomSolver::step(const StateVector& s, const IntegratorConfig& cfg) const {
    if (cfg.method == TimeMethod::ExplicitRK4) return step_erk4(s, cfg.dt);
    return step_implicit_midpoint(s, cfg);
}

SnapshotSet FomSolver::run(const StateVector& init, const IntegratorConfig& cfg, const Vector& V_bc) const {
    const int n = cfg.num_steps();
    if (init.V.size() != ops_->num_velocity() || V_bc.size() != ops_->num_velocity())
        throw std::invalid_argument("run: state length mismatch");
    const int count = n / cfg.snapshot_stride + 1;
    SnapshotSet snaps;
    snaps.X.resize(ops_->num_velocity(), count);
    snaps.P.resize(ops_->num_pressure(), count);
    snaps.V_bc = V_bc;
    snaps.nu = nu_;

    StateVector s = init;
    s.p = pressure(s.V, s.t);
    int col = 0;
    auto store = [&](const StateVector& st) {
        snaps.X.col(col) = st.V - V_bc;
        snaps.P.col(col) = st.p;
        snaps.times.push_back(st.t);
        ++col;
    };
    store(s);
    const double t0 = init.t;
    for (int k = 1; k <= n; ++k) {
        s = step(s, cfg);
        s.t = t0 + k * cfg.dt;
        if (k % cfg.snapshot_stride == 0) store(s);
    }
    return snaps;
}

double kinetic_energy(const FomOperators& ops, const Vector& V) {
    return 0.5 * V.dot(ops.omega.cwiseProduct(V));
}

std::pair<double, double> momentum(const FomOperators& ops, const Vector& V) {
    const Index nu = ops.grid.num_u();
    const Vector w = ops.omega.cwiseProduct(V);
    return {w.head(nu).sum(), w.tail(V.size() - nu).sum()};
}

void write_snapshots(const std::string& path, const SnapshotSet& s) {
    io::BinaryWriter w(path);
    w.magic("ECSNAP1");
    w.u32(std::uint32_t(s.X.rows()));
    w.u32(std::uint32_t(s.P.rows()));
    w.u32(std::uint32_t(s.X.cols()));
    w.f64(s.nu);
    w.f64s(s.times.data(), s.times.size());
    w.vector(s.V_bc);
    w.matrix(s.X);
    w.matrix(s.P);
    w.close();
}

SnapshotSet read_snapshots(const std::string& path) {
    io::BinaryReader r(path);
    r.expect_magic("ECSNAP1");
    const Index nv = r.u32();
    const Index np = r.u32();
    const Index k = r.u32();
    SnapshotSet s;
    s.nu = r.f64();
    s.times.resize(std::size_t(k));
    r.f64s(s.times.data(), s.times.size());
    s.V_bc = r.vector(nv);
    s.X = r.matrix(nv, k);
    s.P = r.matrix(np, k);
    return s;
}

}  // namespace ecrom
