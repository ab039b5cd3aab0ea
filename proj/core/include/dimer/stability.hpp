// stability.hpp - Linear stability of steady states and the analytic phase boundaries

#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dimer/model.hpp"

namespace dimer {

using ComplexVector = std::vector<std::complex<double>>;

inline constexpr double kDefaultStabilityMargin = 1e-9;
inline constexpr double kDefaultZFloor = 1e-6;

enum class StabilityVerdict { Stable, Marginal, Unstable };

const char* to_string(StabilityVerdict v);

struct BlockEigenvalues {
    ComplexVector symmetric;      // spectrum of M_S
    ComplexVector antisymmetric;  // spectrum of M_A
};

struct StabilityReport {
    ComplexVector eigenvalues;  // sorted by descending real part
    double max_real_part{0.0};
    StabilityVerdict verdict{StabilityVerdict::Unstable};
    bool stable{false};  // verdict == Stable, i.e. max_real_part < -margin
    std::optional<BlockEigenvalues> block_eigs;
};

/// Jacobian of the reduced flow in (Re g_j, Im g_j, X_j, Y_j), with Z_j slaved
/// to the spin sphere on the hemisphere of the given state:
/// dZ_j/dX_j = -X_j / Z_j, dZ_j/dY_j = -Y_j / Z_j.
/// Throws NearSingularElimination when |Z_j| < z_floor.
Matrix8 jacobian(const DimerParams& params, const DimerState& state,
                 double z_floor = kDefaultZFloor);

/// Ten-dimensional linearization restricted to the tangent spaces of the two
/// spin spheres (photon coordinates plus an orthonormal tangent frame per
/// cavity). Regular at the equator; at steady states its spectrum equals that
/// of jacobian().
Matrix8 tangent_jacobian(const DimerParams& params, const DimerState& state);

/// Dense nonsymmetric eigen-decomposition and verdict. Eigenvalues with
/// |Re| <= margin make the verdict Marginal.
StabilityReport stability_eigs(const Eigen::MatrixXd& matrix,
                               double margin = kDefaultStabilityMargin);

struct BlockMatrices {
    Eigen::Matrix4d symmetric;      // M_S, acting on [d, d]
    Eigen::Matrix4d antisymmetric;  // M_A, acting on [d, -d]
};

/// Splits the reduced Jacobian [[A1, B12], [B21, A2]] of an identical-cavity
/// state with symmetric or antisymmetric pattern into M_S = A + B and
/// M_A = A - B. Throws UnsupportedConfiguration when the cavities differ or the
/// state has neither pattern (tolerance `pattern_tol`).
BlockMatrices block_decompose(const DimerParams& params, const DimerState& state,
                              double pattern_tol = 1e-8);

/// True when the state has gamma_1 = +-gamma_2, X_1 = +-X_2, Y_1 = +-Y_2, Z_1 = Z_2.
bool has_parity_pattern(const DimerState& state, double tol = 1e-8);

/// Full report for a steady state: Z-eliminated Jacobian (tangent-space
/// fallback near the equator), eigenvalues, and block spectra when the block
/// decomposition applies.
StabilityReport analyze_stability(const DimerParams& params, const DimerState& state,
                                  double margin = kDefaultStabilityMargin);

/// Largest distance in a greedy nearest-neighbour matching of two spectra;
/// infinity if the sizes differ.
double spectrum_distance(const ComplexVector& a, const ComplexVector& b);

/// NP-ASRP boundary J = (w_c + k^2 / w_c) / 2 - 2 l^2 / w_a. Throws DomainError
/// when negative (lambda above lambda_c: NP is already unstable at J = 0).
double np_asrp_boundary(double lambda, double kappa, double omega_c = 1.0,
                        double omega_a = 1.0);

/// All roots in (0, J_usp] of the SSRP stability condition
/// J = (w_c + k^2 / w_c) / 2 + 16 l^2 Z_s(J)^3 / w_a where SSRP exists, ascending.
std::vector<double> ssrp_boundary_roots(double lambda, double kappa, double omega_c = 1.0,
                                        double omega_a = 1.0);

/// Smallest root of ssrp_boundary_roots; NoBoundary if there is none (SSRP
/// stable or nonexistent throughout).
double ssrp_boundary(double lambda, double kappa, double omega_c = 1.0, double omega_a = 1.0);

}  // namespace dimer
