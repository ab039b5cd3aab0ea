// model.hpp - Mean-field model of two Dicke cavities coupled by photon hopping
//
// Per cavity j the mean-field variables are the scaled photon amplitude
// gamma_j = <a_j>/sqrt(N) and the collective spin per atom (X_j, Y_j, Z_j).
// With hopping J the flow is
//
//   dRe(g_j)/dt = -k_j Re(g_j) + w_cj Im(g_j)
//   dIm(g_j)/dt = -w_cj Re(g_j) - k_j Im(g_j) - 2 J Re(g_{3-j}) - 2 l_j X_j
//   dX_j/dt     = -w_aj Y_j
//   dY_j/dt     =  w_aj X_j - 4 l_j Z_j Re(g_j)
//   dZ_j/dt     =  4 l_j Y_j Re(g_j)
//
// The Kerr term chi a^dag a^dag a a adds, in the thermodynamic limit with
// chi_N = chi * N held fixed (CavityParams::chi stores chi_N),
//
//   d(g_j)/dt += -2 i chi_N |g_j|^2 g_j
//
// i.e. the cavity frequency is shifted to w_cj + 2 chi_N |g_j|^2. The matching
// energy per atom is chi_N |g_j|^4.

#pragma once

#include <array>
#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace dimer {

inline constexpr std::size_t kStateDim = 10;
inline constexpr std::size_t kReducedDim = 8;

struct CavityParams {
    double omega_c{1.0};
    double omega_a{1.0};
    double lambda{0.0};
    double kappa{0.2};
    double chi{0.0};  // Kerr coefficient chi * N

    bool operator==(const CavityParams&) const = default;
};

struct DimerParams {
    CavityParams cavity1{};
    CavityParams cavity2{};
    double hopping{0.0};

    bool operator==(const DimerParams&) const = default;

    const CavityParams& cavity(int j) const { return j == 0 ? cavity1 : cavity2; }
    CavityParams& cavity(int j) { return j == 0 ? cavity1 : cavity2; }
    bool identical_cavities() const { return cavity1 == cavity2; }
};

/// Identical cavities with the given shared parameters.
DimerParams symmetric_dimer(const CavityParams& cavity, double hopping);

struct CavityState {
    double re_gamma{0.0};
    double im_gamma{0.0};
    double x{0.0};
    double y{0.0};
    double z{-0.5};

    bool operator==(const CavityState&) const = default;

    double photon_amplitude() const;
};

struct DimerState {
    CavityState cavity1{};
    CavityState cavity2{};

    bool operator==(const DimerState&) const = default;

    const CavityState& cavity(int j) const { return j == 0 ? cavity1 : cavity2; }
    CavityState& cavity(int j) { return j == 0 ? cavity1 : cavity2; }
};

/// Flat layout (re_g1, im_g1, x1, y1, z1, re_g2, im_g2, x2, y2, z2).
using StateVector = std::array<double, kStateDim>;
using Matrix10 = Eigen::Matrix<double, 10, 10>;
using Matrix8 = Eigen::Matrix<double, 8, 8>;

StateVector to_vector(const DimerState& state);
DimerState from_vector(const StateVector& v);

/// Throws InvalidParameters when a type invariant is violated.
void validate(const CavityParams& cavity);
void validate(const DimerParams& params);

bool is_finite(const DimerState& state);

/// Total Z2 map (gamma_j, X_j, Y_j) -> -(gamma_j, X_j, Y_j) on both cavities.
DimerState total_z2_flip(const DimerState& state);

/// Unchecked right-hand side on the flat layout; used inside integrators.
void eom_rhs_raw(const DimerParams& params, const double* state, double* out, double j_now);

/// Time derivative of all ten components. `j_now` overrides params.hopping.
/// Throws InvalidState for non-finite input.
StateVector eom_rhs(const DimerParams& params, const DimerState& state, double j_now);
StateVector eom_rhs(const DimerParams& params, const DimerState& state);

/// Euclidean norm of eom_rhs.
double residual_norm(const DimerParams& params, const DimerState& state);
double residual_norm(const DimerParams& params, const DimerState& state, double j_now);

/// Analytic Jacobian of the ten-component flow.
Matrix10 full_jacobian(const DimerParams& params, const DimerState& state, double j_now);

/// Superradiant threshold of an isolated cavity, (1/2) sqrt(w_a (w_c + k^2 / w_c)).
double critical_coupling(const CavityParams& cavity);

/// Hopping that drives NP&NP into SRP&SRP. Both cavities must be subcritical
/// (or exactly critical); otherwise DomainError, since any J > 0 already
/// yields SRP&SRP.
double critical_hopping(const DimerParams& params);

/// Mean-field energy per atom of H_sys (plus Kerr).
double mean_field_energy(const DimerParams& params, const DimerState& state);
double mean_field_energy(const DimerParams& params, const DimerState& state, double j_now);

struct PhotonBranches {
    std::complex<double> upper;  // sqrt(w_c (w_c + 2J))
    std::complex<double> lower;  // sqrt(w_c (w_c - 2J)), imaginary for J > w_c / 2
    double j_usp{0.0};           // (w_c^2 + k^2) / (2 w_c)
};

/// Bogoliubov energies of the hopping-coupled photon modes. Requires w_c1 == w_c2.
PhotonBranches photon_branch_energies(const DimerParams& params);

/// Onset of the unstable phase for a symmetric photon sector.
double unstable_hopping(const CavityParams& cavity);

struct SpinNormError {
    double cavity1{0.0};
    double cavity2{0.0};

    double max() const { return cavity1 > cavity2 ? cavity1 : cavity2; }
};

/// |X^2 + Y^2 + Z^2 - 1/4| per cavity.
SpinNormError spin_norm_error(const DimerState& state);

}  // namespace dimer
