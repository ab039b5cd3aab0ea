// phasemap.hpp - Phase classification of parameter points, grid sweeps and boundary search

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dimer/dynamics.hpp"
#include "dimer/model.hpp"
#include "dimer/stability.hpp"
#include "dimer/steadystate.hpp"

namespace dimer {

enum class Phase { NP_NP, SRP_SRP, SSRP_only, ASRP_only, Multistable, Unstable, Undetermined };

const char* to_string(Phase p);
std::optional<Phase> phase_from_string(const std::string& s);

enum class Strategy { Analytic, Basin };

const char* to_string(Strategy s);
std::optional<Strategy> strategy_from_string(const std::string& s);

/// One analytic candidate (NP, SSRP or ASRP) and its linear stability.
struct CandidateEvidence {
    std::string name;
    bool exists{false};
    double max_real_part{0.0};
    StabilityVerdict verdict{StabilityVerdict::Unstable};
    bool dynamically_stable{false};
    std::optional<DimerState> state;
};

/// One basin quench: seed description, outcome and the Z2 class of its final.
struct BasinRunEvidence {
    std::string seed;
    QuenchOutcome outcome{QuenchOutcome::Undetermined};
    double t_end{0.0};
    bool certified{false};
    std::optional<DimerState> final_state;
    std::optional<PhaseVerdict> verdict;
    int cluster{-1};  // index into PhaseEvidence::clusters, -1 when not converged
};

struct PhaseEvidence {
    Strategy strategy{Strategy::Analytic};
    std::vector<CandidateEvidence> candidates;  // Analytic
    std::vector<BasinRunEvidence> runs;         // Basin
    std::vector<DimerState> clusters;           // Basin: representative per Z2 class
    int diverged{0};
    int undetermined{0};
    /// Analytic boundary positions for identical cavities, when defined.
    std::optional<double> np_asrp_boundary;
    std::optional<double> ssrp_boundary;
    std::optional<double> critical_hopping;
    std::vector<std::string> notes;
};

struct PhaseLabel {
    Phase value{Phase::Undetermined};
    PhaseEvidence evidence;
};

inline constexpr double kDefaultDistinctTolerance = 1e-4;

struct ClassifyOptions {
    Strategy strategy{Strategy::Analytic};
    double margin{kDefaultStabilityMargin};
    /// Basin: hopping before the quench (the seeds are J = 0 steady states).
    double j_initial{0.0};
    double distinct_tol{kDefaultDistinctTolerance};
    QuenchOptions quench{};
};

/// Two steady states are the same class when they agree to `tol` in max norm
/// after optimally applying the total Z2 flip.
bool same_z2_class(const DimerState& a, const DimerState& b, double tol = kDefaultDistinctTolerance);

/// Analytic (identical cavities, chi = 0): stability of the NP, SSRP and ASRP
/// candidates. A candidate counts as dynamically stable when its verdict is
/// Stable, or Marginal for a closed system (both kappa = 0).
///
/// Basin: quenches from the NP seed and the four single-cavity sign seeds,
/// clusters the converged finals modulo total Z2. Runs that diverge or stay
/// undetermined are recorded; the label follows the converged runs, Unstable
/// when all diverge, Undetermined when none converge.
///
/// Throws InvariantViolation if a converged final is Mixed at J > 0.
PhaseLabel classify_phase(const DimerParams& params, const ClassifyOptions& options = {});

/// Named parameter range. n = 1 is a single point at `lo`.
struct Axis {
    std::string name;
    double lo{0.0};
    double hi{0.0};
    int n{1};

    double value(int i) const;
};

/// Sets the named field: lambda, lambda1, lambda2, J, kappa, kappa1, kappa2,
/// chi, omega_c, omega_a (unsuffixed names set both cavities). Throws
/// InvalidParameters for an unknown name.
void apply_axis(DimerParams& params, const std::string& name, double value);

bool is_known_axis(const std::string& name);

struct PhaseCell {
    std::vector<double> coords;  // one value per axis
    PhaseLabel label;
    std::optional<std::string> error;  // per-cell failure message
};

struct PhaseDiagram {
    DimerParams base{};
    std::vector<Axis> axes;
    ClassifyOptions options{};
    /// Row-major: the first axis varies slowest.
    std::vector<PhaseCell> cells;
};

/// classify_phase at every grid point with at most `workers` threads
/// (0 = hardware concurrency). Cell order and content do not depend on the
/// worker count. Per-cell library errors are recorded and labelled
/// Undetermined; InvariantViolation propagates.
PhaseDiagram sweep_grid(const DimerParams& base, const std::vector<Axis>& axes,
                        const ClassifyOptions& options = {}, unsigned workers = 0);

inline constexpr double kDefaultBoundaryResolution = 1e-3;

using PhasePredicate = std::function<bool(const PhaseLabel&)>;

/// Bisection on the named parameter for a change of `predicate`; returns the
/// bracket midpoint once narrower than `resolution`. Throws BracketError when
/// the predicate agrees at both ends.
double phase_boundary(const DimerParams& base, const std::string& axis, double lo, double hi,
                      const PhasePredicate& predicate, const ClassifyOptions& options = {},
                      double resolution = kDefaultBoundaryResolution);

/// phase_boundary with "label is Multistable" as the predicate.
double multistable_boundary(const DimerParams& base, const std::string& axis, double lo,
                            double hi, const ClassifyOptions& options = {},
                            double resolution = kDefaultBoundaryResolution);

}  // namespace dimer
