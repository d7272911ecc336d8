#pragma once

#include <vector>

#include "qhop/cubic_group.hpp"
#include "qhop/spinor.hpp"

namespace qhop {

/// A lattice rotation together with its action on the internal (spin)
/// index.  The spin block may have any dimension ds >= 1: ds = 2 with the
/// double-cover lift describes spin-1/2, ds = 1 with spin = [1] describes
/// a scalar particle.
struct SymmetryGenerator {
    CubicRotation rotation;
    Eigen::MatrixXcd spin;
};

/// The two 90-degree generators (axes 3 and 1) with their spin-1/2 lifts.
std::vector<SymmetryGenerator> spin_half_generators();
/// Same rotations acting trivially on a one-component amplitude.
std::vector<SymmetryGenerator> trivial_generators();
/// All 24 rotations with spin-1/2 lifts.
std::vector<SymmetryGenerator> spin_half_group();

/// Real coordinates of a direction-indexed family of ds x ds complex
/// matrices.  Layout: direction slots in HoppingFamily order
/// {0,+1,-1,+2,-2,+3,-3}, entries row-major within a slot, (re, im) pairs
/// innermost — index = ((slot*ds + r)*ds + c)*2 + (0|1).  ds = 2 gives the
/// 56-real-dimensional hopping-family space.
Eigen::VectorXd family_to_vector(const HoppingFamily& fam);
HoppingFamily family_from_vector(const Eigen::VectorXd& v);

/// Stacked linear constraint map L with L(family) = 0 iff the family is
/// invariant under every generator:  for each generator (R, u) and each
/// direction n, the rows encode  H_{R(n)} - u H_n u^{-1} = 0.
/// enforce_parity additionally appends  H_{+j} - H_{-j} = 0  (spatial
/// inversion acting trivially on spin).
Eigen::MatrixXd invariance_constraints(const std::vector<SymmetryGenerator>& generators,
                                       int rep_dim, bool enforce_parity = false);

struct InvariantFamilySolution {
    int rep_dim = 2;
    Eigen::MatrixXd constraints;       // the stacked L
    Eigen::VectorXd singular_values;   // descending
    int rank = 0;
    int nullity = 0;
    Eigen::MatrixXd basis;             // orthonormal null-space basis, one family per column
    double max_basis_residual = 0;     // max ||L b|| over basis columns
    bool threshold_warning = false;    // singular value within 10x of the rank cut
    double threshold = 0;
};

/// Null space of the invariance constraints via SVD.  Singular values
/// below 1e-10 x the largest count as zero; values within a factor 10 of
/// that cut raise threshold_warning.
InvariantFamilySolution solve_invariant_family(const std::vector<SymmetryGenerator>& generators,
                                               int rep_dim = 2, bool enforce_parity = false);

/// Distance of (the coordinates of) a family from the solved null space:
/// ||v - P v|| / ||v|| with P the orthogonal projector onto the basis.
double nullspace_residual(const InvariantFamilySolution& sol, const Eigen::VectorXd& v);

/// max over elements and directions of ||H_{R(n)} - u H_n u^{-1}||_F.
/// Pass the full group (spin_half_group()) for a complete check or any
/// subset for generator-level checks; spin blocks must be 2x2.
double verify_family(const HoppingFamily& fam, const std::vector<SymmetryGenerator>& group);

}  // namespace qhop
