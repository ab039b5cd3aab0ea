#include "dimer/phasemap.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "dimer/errors.hpp"

namespace dimer {

const char* to_string(Phase p) {
    switch (p) {
        case Phase::NP_NP: return "NP_NP";
        case Phase::SRP_SRP: return "SRP_SRP";
        case Phase::SSRP_only: return "SSRP_only";
        case Phase::ASRP_only: return "ASRP_only";
        case Phase::Multistable: return "Multistable";
        case Phase::Unstable: return "Unstable";
        case Phase::Undetermined: return "Undetermined";
    }
    return "?";
}

std::optional<Phase> phase_from_string(const std::string& s) {
    for (Phase p : {Phase::NP_NP, Phase::SRP_SRP, Phase::SSRP_only, Phase::ASRP_only,
                    Phase::Multistable, Phase::Unstable, Phase::Undetermined}) {
        if (s == to_string(p)) return p;
    }
    return std::nullopt;
}

const char* to_string(Strategy s) {
    return s == Strategy::Analytic ? "analytic" : "basin";
}

std::optional<Strategy> strategy_from_string(const std::string& s) {
    if (s == "analytic") return Strategy::Analytic;
    if (s == "basin") return Strategy::Basin;
    return std::nullopt;
}

bool same_z2_class(const DimerState& a, const DimerState& b, double tol) {
    return std::min(max_norm_distance(a, b), max_norm_distance(a, total_z2_flip(b))) <= tol;
}

namespace {

bool closed_system(const DimerParams& p) {
    return p.cavity1.kappa == 0.0 && p.cavity2.kappa == 0.0;
}

void add_boundaries(const DimerParams& params, PhaseEvidence& ev) {
    const CavityParams& c = params.cavity1;
    try {
        ev.critical_hopping = critical_hopping(params);
    } catch (const DomainError&) {
    }
    if (!params.identical_cavities()) return;
    try {
        ev.np_asrp_boundary = np_asrp_boundary(c.lambda, c.kappa, c.omega_c, c.omega_a);
    } catch (const DomainError&) {
    }
    try {
        ev.ssrp_boundary = ssrp_boundary(c.lambda, c.kappa, c.omega_c, c.omega_a);
    } catch (const DomainError&) {
    }
}

CandidateEvidence candidate(const DimerParams& params, const std::string& name,
                            const std::optional<DimerState>& state, double margin) {
    CandidateEvidence c;
    c.name = name;
    c.exists = state.has_value();
    if (!state) return c;
    c.state = state;
    const StabilityReport r = analyze_stability(params, *state, margin);
    c.max_real_part = r.max_real_part;
    c.verdict = r.verdict;
    c.dynamically_stable =
        r.stable || (r.verdict == StabilityVerdict::Marginal && closed_system(params));
    return c;
}

PhaseLabel classify_analytic(const DimerParams& params, const ClassifyOptions& options) {
    if (!params.identical_cavities()) {
        throw UnsupportedConfiguration(
            "classify_phase: the analytic strategy needs identical cavities; use basin");
    }
    if (params.cavity1.chi != 0.0) {
        throw UnsupportedConfiguration(
            "classify_phase: the analytic strategy has no Kerr steady states; use basin");
    }
    PhaseLabel label;
    PhaseEvidence& ev = label.evidence;
    ev.strategy = Strategy::Analytic;
    add_boundaries(params, ev);

    ev.candidates.push_back(candidate(params, "NP", np_solution(params), options.margin));
    ev.candidates.push_back(candidate(
        params, "SSRP",
        try_symmetric_srp_solution(params, {Symmetry::Symmetric, Sign::Plus}), options.margin));
    ev.candidates.push_back(candidate(
        params, "ASRP",
        try_symmetric_srp_solution(params, {Symmetry::Antisymmetric, Sign::Plus}),
        options.margin));

    const bool np = ev.candidates[0].dynamically_stable;
    const bool ssrp = ev.candidates[1].dynamically_stable;
    const bool asrp = ev.candidates[2].dynamically_stable;
    const int count = int(np) + int(ssrp) + int(asrp);
    const bool marginal = std::any_of(ev.candidates.begin(), ev.candidates.end(), [](const auto& c) {
        return c.exists && c.verdict == StabilityVerdict::Marginal;
    });
    if (count == 0 && marginal) {
        // A candidate within the margin of zero may still attract, just very slowly.
        label.value = Phase::Undetermined;
        ev.notes.push_back("no candidate is stable beyond the margin; some are marginal");
    } else if (count == 0) {
        label.value = Phase::Unstable;
    } else if (count >= 2) {
        label.value = Phase::Multistable;
    } else if (np) {
        label.value = Phase::NP_NP;
    } else {
        label.value = ssrp ? Phase::SSRP_only : Phase::ASRP_only;
    }
    return label;
}

struct Seed {
    std::string name;
    InitialBranchSpec spec;
};

std::vector<Seed> basin_seeds(const DimerParams& params) {
    std::vector<Seed> seeds;
    seeds.push_back({"NP", InitialBranchSpec{}});
    for (int s1 : {1, -1}) {
        for (int s2 : {1, -1}) {
            std::string name = "SRP";
            name += s1 > 0 ? '+' : '-';
            name += s2 > 0 ? '+' : '-';
            seeds.push_back({name, InitialBranchSpec::basin_seed(params, s1, s2)});
        }
    }
    return seeds;
}

Phase superradiant_label(const DimerParams& params, const DimerState& s) {
    if (params.identical_cavities() && has_parity_pattern(s, 1e-6)) {
        const bool symmetric = std::abs(s.cavity1.re_gamma - s.cavity2.re_gamma) <= 1e-6;
        return symmetric ? Phase::SSRP_only : Phase::ASRP_only;
    }
    return Phase::SRP_SRP;
}

PhaseLabel classify_basin(const DimerParams& params, const ClassifyOptions& options) {
    validate(params);
    PhaseLabel label;
    PhaseEvidence& ev = label.evidence;
    ev.strategy = Strategy::Basin;
    add_boundaries(params, ev);

    QuenchOptions qopt = options.quench;
    std::vector<PhaseVerdict> cluster_verdicts;
    for (const Seed& seed : basin_seeds(params)) {
        const QuenchResult q = quench(params, options.j_initial, params.hopping, seed.spec, qopt);
        BasinRunEvidence run;
        run.seed = seed.name;
        run.outcome = q.outcome;
        run.t_end = q.trajectory.outcome_time;
        run.certified = q.certified;
        if (q.outcome == QuenchOutcome::Diverged) ++ev.diverged;
        if (q.outcome == QuenchOutcome::Undetermined) ++ev.undetermined;
        if (q.outcome == QuenchOutcome::Steady && q.steady) {
            run.final_state = q.steady;
            run.verdict = q.label;
            if (q.label == PhaseVerdict::Mixed && params.hopping > 0.0) {
                std::ostringstream msg;
                msg << "classify_phase: mixed NP/SRP steady state at J = " << params.hopping
                    << " from seed " << seed.name;
                throw InvariantViolation(msg.str());
            }
            for (std::size_t k = 0; k < ev.clusters.size(); ++k) {
                if (same_z2_class(*q.steady, ev.clusters[k], options.distinct_tol)) {
                    run.cluster = int(k);
                    break;
                }
            }
            if (run.cluster < 0) {
                run.cluster = int(ev.clusters.size());
                ev.clusters.push_back(*q.steady);
                cluster_verdicts.push_back(*q.label);
            }
        }
        ev.runs.push_back(std::move(run));
    }

    const int runs = int(ev.runs.size());
    if (ev.diverged > 0 && ev.diverged < runs) {
        ev.notes.push_back(std::to_string(ev.diverged) + " of " + std::to_string(runs) +
                           " basin runs diverged; label from the converged runs");
    }
    if (ev.undetermined > 0) {
        ev.notes.push_back(std::to_string(ev.undetermined) +
                           " basin runs neither converged nor diverged by t_max");
    }

    if (ev.diverged == runs) {
        label.value = Phase::Unstable;
    } else if (ev.clusters.empty()) {
        label.value = Phase::Undetermined;
    } else if (ev.clusters.size() >= 2) {
        label.value = Phase::Multistable;
    } else if (cluster_verdicts[0] == PhaseVerdict::BothNormal) {
        label.value = Phase::NP_NP;
    } else if (cluster_verdicts[0] == PhaseVerdict::Mixed) {
        // Only reachable at J = 0, where the cavities are independent.
        ev.notes.push_back("mixed NP/SRP final at J = 0 (decoupled cavities)");
        label.value = Phase::Undetermined;
    } else {
        label.value = superradiant_label(params, ev.clusters[0]);
    }
    return label;
}

}  // namespace

PhaseLabel classify_phase(const DimerParams& params, const ClassifyOptions& options) {
    validate(params);
    return options.strategy == Strategy::Analytic ? classify_analytic(params, options)
                                                  : classify_basin(params, options);
}

double Axis::value(int i) const {
    if (n <= 1) return lo;
    if (i == n - 1) return hi;
    return lo + (hi - lo) * double(i) / double(n - 1);
}

bool is_known_axis(const std::string& name) {
    static const char* const names[] = {"lambda", "lambda1", "lambda2", "J",      "kappa",
                                        "kappa1", "kappa2",  "chi",     "omega_c", "omega_a"};
    return std::find(std::begin(names), std::end(names), name) != std::end(names);
}

void apply_axis(DimerParams& p, const std::string& name, double v) {
    if (name == "lambda") {
        p.cavity1.lambda = p.cavity2.lambda = v;
    } else if (name == "lambda1") {
        p.cavity1.lambda = v;
    } else if (name == "lambda2") {
        p.cavity2.lambda = v;
    } else if (name == "J") {
        p.hopping = v;
    } else if (name == "kappa") {
        p.cavity1.kappa = p.cavity2.kappa = v;
    } else if (name == "kappa1") {
        p.cavity1.kappa = v;
    } else if (name == "kappa2") {
        p.cavity2.kappa = v;
    } else if (name == "chi") {
        p.cavity1.chi = p.cavity2.chi = v;
    } else if (name == "omega_c") {
        p.cavity1.omega_c = p.cavity2.omega_c = v;
    } else if (name == "omega_a") {
        p.cavity1.omega_a = p.cavity2.omega_a = v;
    } else {
        throw InvalidParameters("unknown axis name '" + name + "'");
    }
}

PhaseDiagram sweep_grid(const DimerParams& base, const std::vector<Axis>& axes,
                        const ClassifyOptions& options, unsigned workers) {
    if (axes.empty() || axes.size() > 3) {
        throw InvalidParameters("sweep_grid: between one and three axes are required");
    }
    std::size_t total = 1;
    for (const Axis& a : axes) {
        if (!is_known_axis(a.name)) throw InvalidParameters("unknown axis name '" + a.name + "'");
        if (a.n < 1) throw InvalidParameters("sweep_grid: axis '" + a.name + "' has n < 1");
        total *= std::size_t(a.n);
    }

    PhaseDiagram diagram;
    diagram.base = base;
    diagram.axes = axes;
    diagram.options = options;
    diagram.cells.resize(total);

    auto run_cell = [&](std::size_t index) {
        PhaseCell& cell = diagram.cells[index];
        cell.coords.resize(axes.size());
        DimerParams p = base;
        std::size_t rest = index;
        for (std::size_t k = axes.size(); k-- > 0;) {
            const int i = int(rest % std::size_t(axes[k].n));
            rest /= std::size_t(axes[k].n);
            cell.coords[k] = axes[k].value(i);
            apply_axis(p, axes[k].name, cell.coords[k]);
        }
        try {
            cell.label = classify_phase(p, options);
        } catch (const InvariantViolation&) {
            throw;
        } catch (const Error& e) {
            cell.error = e.what();
            cell.label = PhaseLabel{};
            cell.label.evidence.strategy = options.strategy;
            cell.label.evidence.notes.push_back(e.what());
        }
    };

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = unsigned(std::min<std::size_t>(workers, total));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= total) return;
            try {
                run_cell(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(total);
                return;
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return diagram;
}

double phase_boundary(const DimerParams& base, const std::string& axis, double lo, double hi,
                      const PhasePredicate& predicate, const ClassifyOptions& options,
                      double resolution) {
    if (!is_known_axis(axis)) throw InvalidParameters("unknown axis name '" + axis + "'");
    if (!(resolution > 0.0)) throw InvalidParameters("phase_boundary: resolution must be > 0");
    auto eval = [&](double v) {
        DimerParams p = base;
        apply_axis(p, axis, v);
        return predicate(classify_phase(p, options));
    };
    const bool at_lo = eval(lo);
    const bool at_hi = eval(hi);
    if (at_lo == at_hi) {
        std::ostringstream msg;
        msg << "phase_boundary: predicate is " << (at_lo ? "true" : "false")
            << " at both ends of [" << lo << ", " << hi << "] on axis " << axis;
        throw BracketError(msg.str());
    }
    while (std::abs(hi - lo) > resolution) {
        const double mid = 0.5 * (lo + hi);
        if (eval(mid) == at_lo) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double multistable_boundary(const DimerParams& base, const std::string& axis, double lo,
                            double hi, const ClassifyOptions& options, double resolution) {
    return phase_boundary(
        base, axis, lo, hi, [](const PhaseLabel& l) { return l.value == Phase::Multistable; },
        options, resolution);
}

}  // namespace dimer
