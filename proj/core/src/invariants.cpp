#include "qhop/invariants.hpp"

#include <Eigen/SVD>

#include <stdexcept>

namespace qhop {

std::vector<SymmetryGenerator> spin_half_generators() {
    std::vector<SymmetryGenerator> gens;
    for (int axis : {3, 1}) {
        const CubicRotation r = rotation_90(axis);
        gens.push_back({r, spin_double_cover(r)});
    }
    return gens;
}

std::vector<SymmetryGenerator> trivial_generators() {
    std::vector<SymmetryGenerator> gens;
    for (int axis : {3, 1})
        gens.push_back({rotation_90(axis), Eigen::MatrixXcd::Identity(1, 1)});
    return gens;
}

std::vector<SymmetryGenerator> spin_half_group() {
    std::vector<SymmetryGenerator> group;
    for (const CubicRotation& r : enumerate_cubic_group())
        group.push_back({r, spin_double_cover(r)});
    return group;
}

namespace {

constexpr int kDirections[7] = {0, +1, -1, +2, -2, +3, -3};

int coord_index(int rep_dim, int slot, int r, int c, int im) {
    return ((slot * rep_dim + r) * rep_dim + c) * 2 + im;
}

}  // namespace

Eigen::VectorXd family_to_vector(const HoppingFamily& fam) {
    Eigen::VectorXd v(56);
    for (int slot = 0; slot < 7; ++slot)
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) {
                const cdouble z = fam.h[size_t(slot)](r, c);
                v(coord_index(2, slot, r, c, 0)) = z.real();
                v(coord_index(2, slot, r, c, 1)) = z.imag();
            }
    return v;
}

HoppingFamily family_from_vector(const Eigen::VectorXd& v) {
    if (v.size() != 56) throw std::invalid_argument("hopping-family coordinates must have 56 entries");
    HoppingFamily fam;
    for (int slot = 0; slot < 7; ++slot)
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                fam.h[size_t(slot)](r, c) = cdouble(v(coord_index(2, slot, r, c, 0)),
                                                    v(coord_index(2, slot, r, c, 1)));
    return fam;
}

Eigen::MatrixXd invariance_constraints(const std::vector<SymmetryGenerator>& generators,
                                       int rep_dim, bool enforce_parity) {
    if (rep_dim < 1) throw std::invalid_argument("rep_dim must be >= 1");
    const int ds = rep_dim;
    const int per_slot = 2 * ds * ds;  // real dims of one matrix
    const int cols = 7 * per_slot;

    // Real matrix of the conjugation X -> u X u^{-1} on ds x ds matrices.
    auto conjugation_map = [ds, per_slot](const Eigen::MatrixXcd& u) {
        const Eigen::MatrixXcd uinv = u.inverse();
        Eigen::MatrixXd map(per_slot, per_slot);
        for (int r = 0; r < ds; ++r)
            for (int c = 0; c < ds; ++c)
                for (int im = 0; im < 2; ++im) {
                    Eigen::MatrixXcd basis = Eigen::MatrixXcd::Zero(ds, ds);
                    basis(r, c) = im ? cdouble(0, 1) : cdouble(1, 0);
                    const Eigen::MatrixXcd image = u * basis * uinv;
                    const int col = (r * ds + c) * 2 + im;
                    for (int rr = 0; rr < ds; ++rr)
                        for (int cc = 0; cc < ds; ++cc) {
                            map((rr * ds + cc) * 2 + 0, col) = image(rr, cc).real();
                            map((rr * ds + cc) * 2 + 1, col) = image(rr, cc).imag();
                        }
                }
        return map;
    };

    const int block_rows = 7 * per_slot;
    const int parity_rows = enforce_parity ? 3 * per_slot : 0;
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(
        std::int64_t(generators.size()) * block_rows + parity_rows, cols);

    int row0 = 0;
    for (const auto& gen : generators) {
        if (gen.spin.rows() != ds || gen.spin.cols() != ds)
            throw std::invalid_argument("generator spin block has the wrong dimension");
        const Eigen::MatrixXd conj = conjugation_map(gen.spin);
        for (int slot = 0; slot < 7; ++slot) {
            const int n = kDirections[slot];
            const int m = gen.rotation.map_direction(n);
            const int mslot = HoppingFamily::slot(m);
            // Rows: H_m - u H_n u^{-1} = 0.
            for (int q = 0; q < per_slot; ++q) L(row0 + q, mslot * per_slot + q) += 1.0;
            L.block(row0, slot * per_slot, per_slot, per_slot) -= conj;
            row0 += per_slot;
        }
    }
    if (enforce_parity)
        for (int j = 1; j <= 3; ++j) {
            const int plus = HoppingFamily::slot(+j);
            const int minus = HoppingFamily::slot(-j);
            for (int q = 0; q < per_slot; ++q) {
                L(row0, plus * per_slot + q) += 1.0;
                L(row0, minus * per_slot + q) -= 1.0;
                ++row0;
            }
        }
    return L;
}

InvariantFamilySolution solve_invariant_family(const std::vector<SymmetryGenerator>& generators,
                                               int rep_dim, bool enforce_parity) {
    InvariantFamilySolution sol;
    sol.rep_dim = rep_dim;
    sol.constraints = invariance_constraints(generators, rep_dim, enforce_parity);
    const int cols = int(sol.constraints.cols());

    if (sol.constraints.rows() == 0 || sol.constraints.norm() == 0) {
        sol.rank = 0;
        sol.nullity = cols;
        sol.basis = Eigen::MatrixXd::Identity(cols, cols);
        sol.singular_values = Eigen::VectorXd::Zero(std::min<int>(int(sol.constraints.rows()), cols));
        return sol;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sol.constraints, Eigen::ComputeFullV);
    sol.singular_values = svd.singularValues();
    const double smax = sol.singular_values(0);
    sol.threshold = 1e-10 * smax;

    int rank = 0;
    for (int i = 0; i < sol.singular_values.size(); ++i) {
        const double s = sol.singular_values(i);
        if (s > sol.threshold) ++rank;
        if (s > sol.threshold / 10 && s < sol.threshold * 10) sol.threshold_warning = true;
    }
    sol.rank = rank;
    sol.nullity = cols - rank;
    sol.basis = svd.matrixV().rightCols(sol.nullity);

    for (int b = 0; b < sol.basis.cols(); ++b)
        sol.max_basis_residual =
            std::max(sol.max_basis_residual, (sol.constraints * sol.basis.col(b)).norm());
    return sol;
}

double nullspace_residual(const InvariantFamilySolution& sol, const Eigen::VectorXd& v) {
    if (v.size() != sol.basis.rows())
        throw std::invalid_argument("coordinate vector does not match the solution space");
    const double n = v.norm();
    if (n == 0) return 0.0;
    const Eigen::VectorXd proj = sol.basis * (sol.basis.transpose() * v);
    return (v - proj).norm() / n;
}

double verify_family(const HoppingFamily& fam, const std::vector<SymmetryGenerator>& group) {
    double worst = 0.0;
    for (const auto& gen : group) {
        if (gen.spin.rows() != 2 || gen.spin.cols() != 2)
            throw std::invalid_argument("verify_family needs 2x2 spin blocks");
        const Mat2 u = gen.spin;
        const Mat2 uinv = u.inverse();
        for (int n : kDirections) {
            const int m = gen.rotation.map_direction(n);
            const Mat2 res = fam.matrix(m) - u * fam.matrix(n) * uinv;
            worst = std::max(worst, res.norm());
        }
    }
    return worst;
}

}  // namespace qhop
