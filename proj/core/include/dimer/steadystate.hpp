// steadystate.hpp - Normal, symmetric and antisymmetric superradiant steady states
//
// For identical cavities the superradiant fixed points come in two families,
// symmetric (gamma_1 = gamma_2) and antisymmetric (gamma_1 = -gamma_2), with
//
//   Z  = -(w_a / 8 l^2) (w_c +- 2J + k^2 / w_c)          (+ symmetric, - antisymmetric)
//   Re = s (w_a / 4 l) sqrt(1 / (4 Z^2) - 1),   s = +-1
//   Im = k Re / w_c
//   X  = 4 l Z Re / w_a,                       Y = 0
//
// Of the four sign pairings of (Re, X) only the two with X = 4 l Z Re / w_a are
// fixed points; for Z < 0 this means X and Re(gamma) have opposite signs.

#pragma once

#include <optional>

#include "dimer/model.hpp"

namespace dimer {

enum class Symmetry { Symmetric, Antisymmetric };
enum class Sign { Plus, Minus };

/// Plus means Re(gamma_1) > 0. The two signs of one symmetry are total-Z2 partners.
struct SrpBranch {
    Symmetry symmetry{Symmetry::Antisymmetric};
    Sign sign{Sign::Plus};

    bool operator==(const SrpBranch&) const = default;

    SrpBranch flipped() const { return {symmetry, sign == Sign::Plus ? Sign::Minus : Sign::Plus}; }
};

inline double sign_value(Sign s) { return s == Sign::Plus ? 1.0 : -1.0; }

DimerState np_solution(const DimerParams& params);

/// Spin-z of a superradiant fixed point of one cavity that sees an effective
/// extra photon frequency `shift` (2J, -2J or 0 for an isolated cavity).
double srp_spin_z(const CavityParams& cavity, double shift);

/// Steady state of an isolated cavity (J = 0). Throws NonexistenceError when
/// the cavity is not superradiant.
CavityState single_cavity_srp(const CavityParams& cavity, Sign sign);

/// Closed-form SSRP/ASRP state. Requires identical cavities with chi = 0
/// (UnsupportedConfiguration otherwise) and 0 < |Z| < 1/2 (NonexistenceError otherwise).
DimerState symmetric_srp_solution(const DimerParams& params, SrpBranch branch);

/// Same, returning nullopt instead of throwing NonexistenceError.
std::optional<DimerState> try_symmetric_srp_solution(const DimerParams& params, SrpBranch branch);

struct NewtonOptions {
    double tol{1e-10};
    int max_iterations{100};
};

/// Newton root of the steady-state equations starting at `guess`.
///
/// Unknowns are all ten components; the equations are the eight photon and
/// planar-spin rows of eom_rhs plus the two spin-norm constraints. This keeps
/// the system regular at Z = 0, and the sign of Z follows the guess. Steps are
/// damped by Armijo backtracking on the squared residual.
///
/// Throws ConvergenceError (with the last residual) when the iteration budget
/// is exhausted, ConstraintViolation when the root has |Z_j| > 1/2.
DimerState solve_steady_numeric(const DimerParams& params, const DimerState& guess,
                                const NewtonOptions& options = {});

enum class PhaseVerdict { BothNormal, BothSuperradiant, Mixed };

const char* to_string(PhaseVerdict v);

inline constexpr double kDefaultPhotonTolerance = 1e-3;

PhaseVerdict verify_same_phase(const DimerState& state,
                               double tol_photon = kDefaultPhotonTolerance);

}  // namespace dimer
