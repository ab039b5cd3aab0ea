// dynamics.hpp - Time integration, quench and ramp protocols, steady-state detection

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dimer/model.hpp"
#include "dimer/steadystate.hpp"

namespace dimer {

struct ConstantHopping {
    double j{0.0};
};

/// J = j_initial for t < t_switch, j_final afterwards.
struct QuenchHopping {
    double j_initial{0.0};
    double j_final{0.0};
    double t_switch{0.0};
};

/// J(t) = ((J_f - J_i) / pi) atan(k (t - t_f / 2)) + (J_f + J_i) / 2.
struct AtanRamp {
    double j_initial{0.0};
    double j_final{0.4};
    double k{0.02};
    double t_final{4000.0};

    double at(double t) const;
    /// k t_f >= 10; smaller products are accepted but flagged.
    bool adiabatic() const { return k * t_final >= 10.0; }
};

class HoppingSchedule {
public:
    using Kind = std::variant<ConstantHopping, QuenchHopping, AtanRamp>;

    HoppingSchedule() = default;
    HoppingSchedule(ConstantHopping c) : kind_(c) {}
    HoppingSchedule(QuenchHopping q) : kind_(q) {}
    HoppingSchedule(AtanRamp r) : kind_(r) {}

    double at(double t) const;
    bool is_constant() const { return std::holds_alternative<ConstantHopping>(kind_); }
    const Kind& kind() const { return kind_; }
    std::string describe() const;

private:
    Kind kind_{ConstantHopping{}};
};

struct SteadyDetectOptions {
    double tol_ss{1e-8};
    double window{50.0};
};

/// Attractor certification for constant-J runs: every `interval` time units a
/// Newton root is sought from the current state; the run is declared steady
/// when the same linearly stable root is found within `radius` (max norm) of
/// the trajectory at two consecutive checks.
///
/// Weakly damped orbits that stay far from the root for a long time are also
/// certified by contraction: over windows of `contraction_window` the root is
/// sought from the time-averaged state, and the run is steady once the same
/// stable root is found and the orbit's max distance from it shrinks over
/// `contraction_checks` consecutive windows while below `contraction_radius`.
/// A window of 0 disables this.
struct CertifyOptions {
    double interval{50.0};
    double radius{1e-2};
    double same_root_tol{1e-8};
    int newton_iterations{30};
    double contraction_window{500.0};
    int contraction_checks{3};
    double contraction_radius{1.0};
};

struct IntegrateOptions {
    double rtol{1e-9};
    double atol{1e-12};
    double initial_step{1e-2};
    double min_step{1e-8};
    double gamma_max{1e3};
    /// Output stride in time; 0 records every accepted step.
    double sample_interval{1.0};
    /// Stop as soon as the residual stays below tol_ss over the window.
    std::optional<SteadyDetectOptions> stop_on_steady;
    /// Also stop on a certified attractor (only used with a constant schedule).
    std::optional<CertifyOptions> certify;
};

enum class Outcome { Completed, Diverged, SteadyReached };

const char* to_string(Outcome o);

struct Sample {
    double t{0.0};
    DimerState state{};
    double hopping{0.0};
    SpinNormError norm_error{};
    std::optional<double> energy;  // recorded for closed systems with constant J
};

struct Trajectory {
    std::vector<Sample> samples;
    Outcome outcome{Outcome::Completed};
    double outcome_time{0.0};  // divergence crossing, steady detection or end time
    bool records_energy{false};
    /// Set when SteadyReached came from attractor certification rather than
    /// the sustained-residual rule.
    std::optional<DimerState> certified_root;

    const Sample& back() const { return samples.back(); }
    double max_spin_norm_error() const;
};

/// Adaptive Dormand-Prince 5(4) integration of the ten-component flow over
/// [t_span[0], t_span[1]].
///
/// Divergence is declared when any |gamma_j| exceeds gamma_max; the crossing
/// time is located on the dense output. A step size below min_step raises
/// IntegratorFailure. The initial state must satisfy the spin norm to 1e-10.
Trajectory integrate(const DimerParams& params, const DimerState& state0,
                     const HoppingSchedule& schedule, std::array<double, 2> t_span,
                     const IntegrateOptions& options = {});

/// Fires when every sample of the trailing `window` has residual below tol_ss;
/// the samples must span at least the window duration. Returns the last state.
std::optional<DimerState> steady_state_detect(const DimerParams& params,
                                              std::span<const Sample> samples,
                                              const SteadyDetectOptions& options = {});

/// steady_state_detect followed by a Newton polish of the detected state.
std::optional<DimerState> steady_state_detect_polished(const DimerParams& params,
                                                       std::span<const Sample> samples,
                                                       const SteadyDetectOptions& options = {},
                                                       const NewtonOptions& newton = {});

// ---------------------------------------------------------------------------
// Quench protocol

enum class CavityStart { Normal, SuperradiantPlus, SuperradiantMinus };

const char* to_string(CavityStart s);

/// Initial branch per cavity together with the seed perturbation signs.
/// Unequal seed weights keep identical cavities off the invariant
/// symmetric/antisymmetric subspaces.
struct InitialBranchSpec {
    std::array<CavityStart, 2> start{CavityStart::Normal, CavityStart::Normal};
    std::array<int, 2> seed_signs{1, 1};
    std::array<double, 2> seed_weights{1.0, 0.5};

    /// Normal for a subcritical cavity, otherwise the superradiant state with
    /// the given sign. Seed signs follow the branch signs.
    static InitialBranchSpec basin_seed(const DimerParams& params, int sign1, int sign2);
};

inline constexpr double kDefaultSeedEps = 1e-6;

/// Adds sign_j * w_j * eps to Re(gamma_j) and -sign_j * w_j * eps to X_j, then
/// re-slaves Z_j onto the spin sphere keeping its hemisphere.
DimerState seed_perturb(const DimerState& state, double eps, std::array<int, 2> signs,
                        std::array<double, 2> weights = {1.0, 1.0});

/// Steady state of the dimer at hopping j_initial on the requested branches:
/// isolated-cavity states at J = 0, Newton-continued from them otherwise.
DimerState prepare_initial_state(const DimerParams& params, double j_initial,
                                 const InitialBranchSpec& spec);

struct QuenchOptions {
    double t_max{5000.0};
    double seed_eps{kDefaultSeedEps};
    SteadyDetectOptions steady{};
    std::optional<CertifyOptions> certify{CertifyOptions{}};
    IntegrateOptions integrate{};
    NewtonOptions newton{};
    double tol_photon{kDefaultPhotonTolerance};
};

enum class QuenchOutcome { Steady, Diverged, Undetermined };

const char* to_string(QuenchOutcome o);

struct QuenchResult {
    Trajectory trajectory;
    QuenchOutcome outcome{QuenchOutcome::Undetermined};
    DimerState initial{};
    DimerState final_state{};         // last integrated state
    std::optional<DimerState> steady;  // Newton-polished steady state
    double polish_shift{0.0};          // max-norm move of the polish
    bool certified{false};             // steady via attractor certification
    double steady_residual{0.0};
    std::optional<PhaseVerdict> label;
};

/// Prepare the J_i steady state, seed it, evolve under constant J_f until a
/// steady state, divergence, or t_max.
QuenchResult quench(const DimerParams& params, double j_initial, double j_final,
                    const InitialBranchSpec& spec, const QuenchOptions& options = {});

// ---------------------------------------------------------------------------
// Adiabatic ramp

/// Branch followed by the tracking reference; Normal tracks the NP fixed point.
struct TrackedBranch {
    bool normal{false};
    SrpBranch branch{};
};

/// Classifies a state of identical cavities as NP, SSRP or ASRP (with sign)
/// by its parity pattern; nullopt if none applies.
std::optional<TrackedBranch> infer_branch(const DimerState& state, double tol = 1e-6);

struct RampResult {
    Trajectory trajectory;
    std::optional<TrackedBranch> tracked;
    /// Per-sample max-norm distance to the instantaneous steady state of the
    /// tracked branch; NaN where that branch does not exist.
    std::vector<double> tracking_error;
    double max_tracking_error{0.0};
};

struct RampOptions {
    IntegrateOptions integrate{};
    std::optional<TrackedBranch> track;  // inferred from state0 when empty
};

RampResult adiabatic_ramp(const DimerParams& params, const AtanRamp& ramp,
                          const DimerState& state0, const RampOptions& options = {});

/// Instantaneous steady state of a tracked branch at hopping j; nullopt where
/// the branch does not exist.
std::optional<DimerState> instantaneous_steady(const DimerParams& params,
                                               const TrackedBranch& branch, double j);

double max_norm_distance(const DimerState& a, const DimerState& b);

/// Re(gamma_1) + Re(gamma_2) and Re(gamma_1) - Re(gamma_2).
inline double re_gamma_plus(const DimerState& s) {
    return s.cavity1.re_gamma + s.cavity2.re_gamma;
}
inline double re_gamma_minus(const DimerState& s) {
    return s.cavity1.re_gamma - s.cavity2.re_gamma;
}

}  // namespace dimer
