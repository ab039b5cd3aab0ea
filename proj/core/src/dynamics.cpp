#include "dimer/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "dimer/errors.hpp"
#include "dimer/stability.hpp"

namespace dimer {

namespace odeint = boost::numeric::odeint;

double AtanRamp::at(double t) const {
    return (j_final - j_initial) / std::numbers::pi * std::atan(k * (t - 0.5 * t_final)) +
           0.5 * (j_final + j_initial);
}

double HoppingSchedule::at(double t) const {
    return std::visit(
        [t](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ConstantHopping>) {
                return s.j;
            } else if constexpr (std::is_same_v<T, QuenchHopping>) {
                return t < s.t_switch ? s.j_initial : s.j_final;
            } else {
                return s.at(t);
            }
        },
        kind_);
}

std::string HoppingSchedule::describe() const {
    std::ostringstream out;
    out.precision(17);
    std::visit(
        [&out](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ConstantHopping>) {
                out << "constant(J=" << s.j << ")";
            } else if constexpr (std::is_same_v<T, QuenchHopping>) {
                out << "quench(J_i=" << s.j_initial << ", J_f=" << s.j_final
                    << ", t_switch=" << s.t_switch << ")";
            } else {
                out << "atan_ramp(J_i=" << s.j_initial << ", J_f=" << s.j_final
                    << ", k=" << s.k << ", t_f=" << s.t_final << ")";
            }
        },
        kind_);
    return out.str();
}

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Completed: return "Completed";
        case Outcome::Diverged: return "Diverged";
        case Outcome::SteadyReached: return "SteadyReached";
    }
    return "?";
}

double Trajectory::max_spin_norm_error() const {
    double worst = 0.0;
    for (const auto& s : samples) worst = std::max(worst, s.norm_error.max());
    return worst;
}

namespace {

double max_photon_amplitude(const StateVector& v) {
    return std::max(std::hypot(v[0], v[1]), std::hypot(v[5], v[6]));
}

bool finite(const StateVector& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

class Recorder {
public:
    Recorder(const DimerParams& params, const HoppingSchedule& schedule, bool energy,
             Trajectory& out)
        : params_(params), schedule_(schedule), energy_(energy), out_(out) {}

    void record(double t, const StateVector& v) {
        Sample s;
        s.t = t;
        s.state = from_vector(v);
        s.hopping = schedule_.at(t);
        s.norm_error = spin_norm_error(s.state);
        if (energy_) s.energy = mean_field_energy(params_, s.state, s.hopping);
        out_.samples.push_back(s);
    }

private:
    const DimerParams& params_;
    const HoppingSchedule& schedule_;
    bool energy_;
    Trajectory& out_;
};

// Linearly stable Newton root within the certification radius of `state`.
std::optional<DimerState> certified_attractor(const DimerParams& params, double j_now,
                                              const DimerState& state,
                                              const CertifyOptions& opts) {
    DimerParams at_j = params;
    at_j.hopping = j_now;
    try {
        const DimerState root =
            solve_steady_numeric(at_j, state, NewtonOptions{1e-10, opts.newton_iterations});
        if (max_norm_distance(root, state) > opts.radius) return std::nullopt;
        if (!analyze_stability(at_j, root).stable) return std::nullopt;
        return root;
    } catch (const Error&) {
        return std::nullopt;
    }
}

// Time-averaged root finding over long windows with an envelope check; see
// CertifyOptions.
class ContractionTracker {
public:
    explicit ContractionTracker(const CertifyOptions& opts) : opts_(opts) {}

    void add_step(const StateVector& from, const StateVector& to, double dt) {
        for (std::size_t i = 0; i < kStateDim; ++i) sum_[i] += 0.5 * (from[i] + to[i]) * dt;
        span_ += dt;
        if (reference_) {
            envelope_ = std::max(envelope_, max_norm_distance(from_vector(to), *reference_));
        }
    }

    bool window_full() const { return span_ >= opts_.contraction_window; }

    std::optional<DimerState> close_window(const DimerParams& params, double j_now) {
        StateVector mean{};
        for (std::size_t i = 0; i < kStateDim; ++i) mean[i] = sum_[i] / span_;
        std::optional<DimerState> root = stable_root(params, j_now, from_vector(mean));
        const bool same = root && reference_ &&
                          max_norm_distance(*root, *reference_) <= opts_.same_root_tol;
        if (same && envelope_ < last_envelope_ && envelope_ <= opts_.contraction_radius) {
            ++streak_;
        } else {
            streak_ = 0;
        }
        last_envelope_ = same ? envelope_ : std::numeric_limits<double>::infinity();
        reference_ = root;
        sum_ = {};
        span_ = 0.0;
        envelope_ = 0.0;
        if (streak_ >= opts_.contraction_checks) return root;
        return std::nullopt;
    }

private:
    std::optional<DimerState> stable_root(const DimerParams& params, double j_now,
                                          const DimerState& guess) const {
        DimerParams at_j = params;
        at_j.hopping = j_now;
        try {
            // The window mean is off the spin sphere; project before Newton.
            DimerState g = guess;
            for (int j = 0; j < 2; ++j) {
                CavityState& c = g.cavity(j);
                const double r = std::sqrt(c.x * c.x + c.y * c.y + c.z * c.z);
                if (r == 0.0) return std::nullopt;
                c.x *= 0.5 / r;
                c.y *= 0.5 / r;
                c.z *= 0.5 / r;
            }
            const DimerState root =
                solve_steady_numeric(at_j, g, NewtonOptions{1e-10, opts_.newton_iterations});
            if (max_norm_distance(root, g) > opts_.contraction_radius) return std::nullopt;
            if (!analyze_stability(at_j, root).stable) return std::nullopt;
            return root;
        } catch (const Error&) {
            return std::nullopt;
        }
    }

    const CertifyOptions& opts_;
    StateVector sum_{};
    double span_{0.0};
    double envelope_{0.0};
    double last_envelope_{std::numeric_limits<double>::infinity()};
    int streak_{0};
    std::optional<DimerState> reference_;
};

}  // namespace

Trajectory integrate(const DimerParams& params, const DimerState& state0,
                     const HoppingSchedule& schedule, std::array<double, 2> t_span,
                     const IntegrateOptions& options) {
    validate(params);
    if (!is_finite(state0)) throw InvalidState("integrate: non-finite initial state");
    if (spin_norm_error(state0).max() > 1e-10) {
        throw InvalidState("integrate: initial state is off the spin sphere");
    }
    const double t0 = t_span[0];
    const double t_end = t_span[1];
    if (!(t_end >= t0)) throw InvalidParameters("integrate: t_span must be increasing");

    Trajectory traj;
    traj.records_energy = schedule.is_constant() && params.cavity1.kappa == 0.0 &&
                          params.cavity2.kappa == 0.0;
    Recorder rec(params, schedule, traj.records_energy, traj);

    StateVector x = to_vector(state0);
    rec.record(t0, x);
    if (t_end == t0) {
        traj.outcome_time = t0;
        return traj;
    }

    auto system = [&params, &schedule](const StateVector& s, StateVector& d, double t) {
        eom_rhs_raw(params, s.data(), d.data(), schedule.at(t));
    };
    auto residual_at = [&params, &schedule](const StateVector& s, double t) {
        StateVector d{};
        eom_rhs_raw(params, s.data(), d.data(), schedule.at(t));
        double sum = 0.0;
        for (double v : d) sum += v * v;
        return std::sqrt(sum);
    };

    auto stepper = odeint::make_dense_output(options.atol, options.rtol,
                                             odeint::runge_kutta_dopri5<StateVector>());
    stepper.initialize(x, t0, std::min(options.initial_step, t_end - t0));

    const double interval = options.sample_interval;
    double next_sample = interval > 0.0 ? t0 + interval : t0;
    std::optional<double> quiet_since;
    if (options.stop_on_steady && residual_at(x, t0) < options.stop_on_steady->tol_ss) {
        quiet_since = t0;
    }

    const bool certify = options.certify && schedule.is_constant();
    double next_certify = certify ? t0 + options.certify->interval : t_end;
    std::optional<DimerState> candidate_root;
    std::optional<ContractionTracker> contraction;
    if (certify && options.certify->contraction_window > 0.0) contraction.emplace(*options.certify);
    StateVector prev = x;

    StateVector tmp{};
    while (true) {
        std::pair<double, double> step;
        try {
            step = stepper.do_step(system);
        } catch (const odeint::odeint_error& e) {
            throw IntegratorFailure(std::string("integrate: ") + e.what(),
                                    stepper.current_time(),
                                    from_vector(stepper.current_state()));
        }
        const auto [t_old, t_new] = step;
        const StateVector& cur = stepper.current_state();
        const bool reached_end = t_new >= t_end;

        if (!finite(cur) || max_photon_amplitude(cur) > options.gamma_max) {
            // Locate the crossing on the dense output.
            double a = t_old, b = std::min(t_new, t_end);
            for (int i = 0; i < 60; ++i) {
                const double mid = 0.5 * (a + b);
                stepper.calc_state(mid, tmp);
                if (finite(tmp) && max_photon_amplitude(tmp) <= options.gamma_max) {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            stepper.calc_state(b, tmp);
            if (finite(tmp)) rec.record(b, tmp);
            traj.outcome = Outcome::Diverged;
            traj.outcome_time = b;
            return traj;
        }

        if (interval > 0.0) {
            while (next_sample <= t_new && next_sample <= t_end) {
                stepper.calc_state(next_sample, tmp);
                rec.record(next_sample, tmp);
                next_sample = t0 + interval * std::round((next_sample - t0) / interval + 1.0);
            }
        } else if (!reached_end) {
            rec.record(t_new, cur);
        }

        if (reached_end) {
            if (traj.samples.back().t < t_end) {
                stepper.calc_state(t_end, tmp);
                rec.record(t_end, tmp);
            }
            traj.outcome = Outcome::Completed;
            traj.outcome_time = t_end;
            return traj;
        }

        if (options.stop_on_steady) {
            if (residual_at(cur, t_new) < options.stop_on_steady->tol_ss) {
                if (!quiet_since) quiet_since = t_new;
                if (t_new - *quiet_since >= options.stop_on_steady->window) {
                    if (traj.samples.back().t < t_new) rec.record(t_new, cur);
                    traj.outcome = Outcome::SteadyReached;
                    traj.outcome_time = t_new;
                    return traj;
                }
            } else {
                quiet_since.reset();
            }
        }

        if (certify && t_new >= next_certify) {
            next_certify = t_new + options.certify->interval;
            const auto root = certified_attractor(params, schedule.at(t_new), from_vector(cur),
                                                  *options.certify);
            if (root && candidate_root &&
                max_norm_distance(*root, *candidate_root) <= options.certify->same_root_tol) {
                if (traj.samples.back().t < t_new) rec.record(t_new, cur);
                traj.outcome = Outcome::SteadyReached;
                traj.outcome_time = t_new;
                traj.certified_root = root;
                return traj;
            }
            candidate_root = root;
        }

        if (contraction) {
            contraction->add_step(prev, cur, t_new - t_old);
            if (contraction->window_full()) {
                if (auto root = contraction->close_window(params, schedule.at(t_new))) {
                    if (traj.samples.back().t < t_new) rec.record(t_new, cur);
                    traj.outcome = Outcome::SteadyReached;
                    traj.outcome_time = t_new;
                    traj.certified_root = root;
                    return traj;
                }
            }
        }
        prev = cur;

        if (t_new - t_old < options.min_step) {
            std::ostringstream msg;
            msg << "integrate: step size " << (t_new - t_old) << " below floor "
                << options.min_step << " at t=" << t_new;
            throw IntegratorFailure(msg.str(), t_new, from_vector(cur));
        }
    }
}

std::optional<DimerState> steady_state_detect(const DimerParams& params,
                                              std::span<const Sample> samples,
                                              const SteadyDetectOptions& options) {
    if (samples.empty()) return std::nullopt;
    const double t_last = samples.back().t;
    if (t_last - samples.front().t < options.window) return std::nullopt;
    for (auto it = samples.rbegin(); it != samples.rend(); ++it) {
        if (residual_norm(params, it->state, it->hopping) >= options.tol_ss) return std::nullopt;
        if (t_last - it->t >= options.window) return samples.back().state;
    }
    return std::nullopt;
}

std::optional<DimerState> steady_state_detect_polished(const DimerParams& params,
                                                       std::span<const Sample> samples,
                                                       const SteadyDetectOptions& options,
                                                       const NewtonOptions& newton) {
    auto detected = steady_state_detect(params, samples, options);
    if (!detected) return std::nullopt;
    DimerParams at_end = params;
    at_end.hopping = samples.back().hopping;
    return solve_steady_numeric(at_end, *detected, newton);
}

// ---------------------------------------------------------------------------

const char* to_string(CavityStart s) {
    switch (s) {
        case CavityStart::Normal: return "NP";
        case CavityStart::SuperradiantPlus: return "SRP+";
        case CavityStart::SuperradiantMinus: return "SRP-";
    }
    return "?";
}

InitialBranchSpec InitialBranchSpec::basin_seed(const DimerParams& params, int sign1,
                                                int sign2) {
    InitialBranchSpec spec;
    const int signs[2] = {sign1 >= 0 ? 1 : -1, sign2 >= 0 ? 1 : -1};
    for (int j = 0; j < 2; ++j) {
        const CavityParams& c = params.cavity(j);
        if (c.lambda > critical_coupling(c)) {
            spec.start[j] = signs[j] > 0 ? CavityStart::SuperradiantPlus
                                         : CavityStart::SuperradiantMinus;
        } else {
            spec.start[j] = CavityStart::Normal;
        }
        spec.seed_signs[j] = signs[j];
    }
    return spec;
}

DimerState seed_perturb(const DimerState& state, double eps, std::array<int, 2> signs,
                        std::array<double, 2> weights) {
    DimerState out = state;
    for (int j = 0; j < 2; ++j) {
        CavityState& c = out.cavity(j);
        const double s = (signs[j] >= 0 ? 1.0 : -1.0) * weights[j];
        c.re_gamma += s * eps;
        c.x -= s * eps;
        const double planar = c.x * c.x + c.y * c.y;
        if (planar > 0.25) throw InvalidState("seed_perturb: perturbation leaves the spin sphere");
        const double hemisphere = c.z > 0.0 ? 1.0 : -1.0;
        c.z = hemisphere * std::sqrt(0.25 - planar);
    }
    return out;
}

DimerState prepare_initial_state(const DimerParams& params, double j_initial,
                                 const InitialBranchSpec& spec) {
    DimerState s;
    for (int j = 0; j < 2; ++j) {
        switch (spec.start[j]) {
            case CavityStart::Normal:
                s.cavity(j) = CavityState{};
                break;
            case CavityStart::SuperradiantPlus:
                s.cavity(j) = single_cavity_srp(params.cavity(j), Sign::Plus);
                break;
            case CavityStart::SuperradiantMinus:
                s.cavity(j) = single_cavity_srp(params.cavity(j), Sign::Minus);
                break;
        }
    }
    if (j_initial == 0.0) return s;
    DimerParams at_initial = params;
    at_initial.hopping = j_initial;
    return solve_steady_numeric(at_initial, s);
}

const char* to_string(QuenchOutcome o) {
    switch (o) {
        case QuenchOutcome::Steady: return "Steady";
        case QuenchOutcome::Diverged: return "Diverged";
        case QuenchOutcome::Undetermined: return "Undetermined";
    }
    return "?";
}

QuenchResult quench(const DimerParams& params, double j_initial, double j_final,
                    const InitialBranchSpec& spec, const QuenchOptions& options) {
    QuenchResult result;
    result.initial = seed_perturb(prepare_initial_state(params, j_initial, spec),
                                  options.seed_eps, spec.seed_signs, spec.seed_weights);

    DimerParams final_params = params;
    final_params.hopping = j_final;
    IntegrateOptions integ = options.integrate;
    integ.stop_on_steady = options.steady;
    integ.certify = options.certify;
    result.trajectory = integrate(final_params, result.initial, ConstantHopping{j_final},
                                  {0.0, options.t_max}, integ);
    result.final_state = result.trajectory.back().state;

    switch (result.trajectory.outcome) {
        case Outcome::Diverged:
            result.outcome = QuenchOutcome::Diverged;
            return result;
        case Outcome::Completed:
            result.outcome = QuenchOutcome::Undetermined;
            result.steady_residual = residual_norm(final_params, result.final_state);
            return result;
        case Outcome::SteadyReached:
            break;
    }
    result.outcome = QuenchOutcome::Steady;
    if (result.trajectory.certified_root) {
        result.certified = true;
        result.steady = result.trajectory.certified_root;
        result.polish_shift = max_norm_distance(*result.steady, result.final_state);
        result.steady_residual = residual_norm(final_params, *result.steady);
        result.label = verify_same_phase(*result.steady, options.tol_photon);
        return result;
    }
    try {
        result.steady = solve_steady_numeric(final_params, result.final_state, options.newton);
        result.polish_shift = max_norm_distance(*result.steady, result.final_state);
    } catch (const ConvergenceError&) {
        result.steady = result.final_state;
        result.polish_shift = 0.0;
    }
    result.steady_residual = residual_norm(final_params, *result.steady);
    result.label = verify_same_phase(*result.steady, options.tol_photon);
    return result;
}

// ---------------------------------------------------------------------------

double max_norm_distance(const DimerState& a, const DimerState& b) {
    const StateVector va = to_vector(a);
    const StateVector vb = to_vector(b);
    double worst = 0.0;
    for (std::size_t i = 0; i < kStateDim; ++i) worst = std::max(worst, std::abs(va[i] - vb[i]));
    return worst;
}

std::optional<TrackedBranch> infer_branch(const DimerState& state, double tol) {
    const bool normal = state.cavity1.photon_amplitude() < tol &&
                        state.cavity2.photon_amplitude() < tol &&
                        std::abs(state.cavity1.z + 0.5) < tol &&
                        std::abs(state.cavity2.z + 0.5) < tol;
    if (normal) return TrackedBranch{true, {}};
    if (!has_parity_pattern(state, tol)) return std::nullopt;
    TrackedBranch t;
    const bool symmetric =
        std::abs(state.cavity1.re_gamma - state.cavity2.re_gamma) <= tol;
    t.branch.symmetry = symmetric ? Symmetry::Symmetric : Symmetry::Antisymmetric;
    t.branch.sign = state.cavity1.re_gamma >= 0.0 ? Sign::Plus : Sign::Minus;
    return t;
}

std::optional<DimerState> instantaneous_steady(const DimerParams& params,
                                               const TrackedBranch& branch, double j) {
    DimerParams at_j = params;
    at_j.hopping = j;
    if (branch.normal) return np_solution(at_j);
    return try_symmetric_srp_solution(at_j, branch.branch);
}

RampResult adiabatic_ramp(const DimerParams& params, const AtanRamp& ramp,
                          const DimerState& state0, const RampOptions& options) {
    RampResult result;
    result.trajectory =
        integrate(params, state0, HoppingSchedule(ramp), {0.0, ramp.t_final}, options.integrate);
    result.tracked = options.track ? options.track : infer_branch(state0);
    result.tracking_error.reserve(result.trajectory.samples.size());
    for (const auto& s : result.trajectory.samples) {
        double err = std::numeric_limits<double>::quiet_NaN();
        if (result.tracked && params.identical_cavities() && params.cavity1.chi == 0.0) {
            if (auto ref = instantaneous_steady(params, *result.tracked, s.hopping)) {
                err = max_norm_distance(s.state, *ref);
                result.max_tracking_error = std::max(result.max_tracking_error, err);
            }
        }
        result.tracking_error.push_back(err);
    }
    return result;
}

}  // namespace dimer
