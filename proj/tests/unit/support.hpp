#pragma once

#include <cmath>
#include <random>

#include "ecrom/cases.hpp"
#include "ecrom/fom.hpp"
#include "ecrom/operators.hpp"

namespace testing {

using namespace ecrom;

/// Small seeded generator for property tests.
struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
    Vector vector(Index n, double scale = 1.0) {
        Vector v(n);
        for (Index i = 0; i < n; ++i) v[i] = scale * uniform();
        return v;
    }
    Matrix matrix(Index r, Index c) {
        Matrix m(r, c);
        for (Index k = 0; k < m.size(); ++k) m.data()[k] = uniform();
        return m;
    }
};

inline Grid periodic_grid(int nx, int ny, double lx = 2.0 * std::numbers::pi, double ly = 2.0 * std::numbers::pi) {
    GridSpec s;
    s.nx = nx;
    s.ny = ny;
    s.x_range = {0.0, lx};
    s.y_range = {0.0, ly};
    s.west = s.east = s.south = s.north = BoundaryCondition::periodic();
    return build_grid(s);
}

inline Grid cavity_grid(int nx, int ny, double lid = 1.0) {
    GridSpec s;
    s.nx = nx;
    s.ny = ny;
    s.west = s.east = s.south = BoundaryCondition::no_slip();
    s.north = BoundaryCondition::dirichlet([lid](double) { return std::array<double, 2>{lid, 0.0}; });
    return build_grid(s);
}

/// Channel with inflow on the west, outflow east, walls south and north.
inline Grid channel_grid(int nx, int ny) {
    GridSpec s;
    s.nx = nx;
    s.ny = ny;
    s.x_range = {0.0, 2.0};
    s.west = BoundaryCondition::dirichlet([](double y) { return std::array<double, 2>{4.0 * y * (1.0 - y), 0.0}; });
    s.east = BoundaryCondition::outflow(0.0);
    s.south = s.north = BoundaryCondition::no_slip();
    return build_grid(s);
}

inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }
inline double max_abs(const SparseMatrix& m) { return max_abs(Matrix(m)); }

/// Random field made divergence-free (M V = y_M) by one projection.
inline Vector projected_random(const FomSolver& s, Gen& g) { return s.project(g.vector(s.ops().num_velocity())); }

}  // namespace testing
