#include "dimer_cli/io.hpp"

#include <cmath>
#include <cstdio>

namespace dimer::io {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,re_g1,im_g1,x1,y1,z1,re_g2,im_g2,x2,y2,z2,J,norm_err1,norm_err2";
    if (traj.records_energy) out << ",energy";
    out << '\n';
    for (const Sample& s : traj.samples) {
        out << fmt(s.t);
        for (double v : to_vector(s.state)) out << ',' << fmt(v);
        out << ',' << fmt(s.hopping) << ',' << fmt(s.norm_error.cavity1) << ','
            << fmt(s.norm_error.cavity2);
        if (traj.records_energy) out << ',' << fmt(s.energy.value_or(std::nan("")));
        out << '\n';
    }
}

namespace {

// NaN and infinities are not valid JSON numbers.
json number(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

template <class T>
json optional_json(const std::optional<T>& v) {
    if (!v) return nullptr;
    if constexpr (std::is_same_v<T, double>) {
        return number(*v);
    } else {
        return to_json(*v);
    }
}

}  // namespace

json to_json(const CavityParams& c) {
    return {{"omega_c", c.omega_c}, {"omega_a", c.omega_a}, {"lambda", c.lambda},
            {"kappa", c.kappa},     {"chi", c.chi}};
}

json to_json(const DimerParams& p) {
    return {{"cavity1", to_json(p.cavity1)}, {"cavity2", to_json(p.cavity2)}, {"J", p.hopping}};
}

json to_json(const DimerState& s) {
    auto cavity = [](const CavityState& c) {
        return json{{"re_gamma", c.re_gamma}, {"im_gamma", c.im_gamma},
                    {"x", c.x},               {"y", c.y},
                    {"z", c.z}};
    };
    return {{"cavity1", cavity(s.cavity1)}, {"cavity2", cavity(s.cavity2)}};
}

json to_json(const ComplexVector& v) {
    json arr = json::array();
    for (const auto& z : v) arr.push_back({z.real(), z.imag()});
    return arr;
}

json to_json(const StabilityReport& r) {
    json j{{"verdict", to_string(r.verdict)},
           {"stable", r.stable},
           {"max_real_part", r.max_real_part},
           {"eigenvalues", to_json(r.eigenvalues)}};
    if (r.block_eigs) {
        j["block_eigenvalues"] = {{"symmetric", to_json(r.block_eigs->symmetric)},
                                  {"antisymmetric", to_json(r.block_eigs->antisymmetric)}};
    }
    return j;
}

json to_json(const Trajectory& t) {
    json j{{"outcome", to_string(t.outcome)},
           {"outcome_time", t.outcome_time},
           {"samples", t.samples.size()},
           {"records_energy", t.records_energy},
           {"max_spin_norm_error", t.max_spin_norm_error()}};
    if (!t.samples.empty()) j["final_state"] = to_json(t.back().state);
    if (t.certified_root) j["certified_root"] = to_json(*t.certified_root);
    return j;
}

json to_json(const QuenchResult& q) {
    json j{{"outcome", to_string(q.outcome)},
           {"trajectory", to_json(q.trajectory)},
           {"initial_state", to_json(q.initial)},
           {"final_state", to_json(q.final_state)},
           {"steady_state", optional_json(q.steady)},
           {"polish_shift", q.polish_shift},
           {"certified", q.certified},
           {"steady_residual", q.steady_residual},
           {"label", q.label ? json(to_string(*q.label)) : json(nullptr)}};
    return j;
}

json to_json(const RampResult& r) {
    json j{{"trajectory", to_json(r.trajectory)},
           {"max_tracking_error", number(r.max_tracking_error)}};
    if (r.tracked) {
        if (r.tracked->normal) {
            j["tracked_branch"] = "NP";
        } else {
            std::string name =
                r.tracked->branch.symmetry == Symmetry::Symmetric ? "SSRP" : "ASRP";
            name += r.tracked->branch.sign == Sign::Plus ? '+' : '-';
            j["tracked_branch"] = name;
        }
    } else {
        j["tracked_branch"] = nullptr;
    }
    if (!r.tracking_error.empty()) j["final_tracking_error"] = number(r.tracking_error.back());
    return j;
}

json to_json(const PhaseLabel& l) {
    const PhaseEvidence& ev = l.evidence;
    json e{{"strategy", to_string(ev.strategy)},
           {"np_asrp_boundary", optional_json(ev.np_asrp_boundary)},
           {"ssrp_boundary", optional_json(ev.ssrp_boundary)},
           {"critical_hopping", optional_json(ev.critical_hopping)},
           {"notes", ev.notes}};
    if (ev.strategy == Strategy::Analytic) {
        json cands = json::array();
        for (const CandidateEvidence& c : ev.candidates) {
            cands.push_back({{"name", c.name},
                             {"exists", c.exists},
                             {"max_real_part", c.exists ? json(c.max_real_part) : json(nullptr)},
                             {"verdict", c.exists ? json(to_string(c.verdict)) : json(nullptr)},
                             {"dynamically_stable", c.dynamically_stable},
                             {"state", optional_json(c.state)}});
        }
        e["candidates"] = cands;
    } else {
        json runs = json::array();
        for (const BasinRunEvidence& r : ev.runs) {
            runs.push_back({{"seed", r.seed},
                            {"outcome", to_string(r.outcome)},
                            {"t_end", r.t_end},
                            {"certified", r.certified},
                            {"final_state", optional_json(r.final_state)},
                            {"verdict", r.verdict ? json(to_string(*r.verdict)) : json(nullptr)},
                            {"cluster", r.cluster}});
        }
        json clusters = json::array();
        for (const DimerState& s : ev.clusters) clusters.push_back(to_json(s));
        e["runs"] = runs;
        e["clusters"] = clusters;
        e["diverged"] = ev.diverged;
        e["undetermined"] = ev.undetermined;
    }
    return {{"label", to_string(l.value)}, {"evidence", e}};
}

json to_json(const Axis& a) {
    return {{"name", a.name}, {"lo", a.lo}, {"hi", a.hi}, {"n", a.n}};
}

json to_json(const PhaseDiagram& d) {
    json axes = json::array();
    for (const Axis& a : d.axes) axes.push_back(to_json(a));
    const ClassifyOptions& o = d.options;
    json options{{"strategy", to_string(o.strategy)},
                 {"stability_margin", o.margin},
                 {"distinct_tol", o.distinct_tol}};
    if (o.strategy == Strategy::Basin) {
        options["j_initial"] = o.j_initial;
        options["t_max"] = o.quench.t_max;
        options["seed_eps"] = o.quench.seed_eps;
        options["tol_ss"] = o.quench.steady.tol_ss;
        options["tol_photon"] = o.quench.tol_photon;
        options["rtol"] = o.quench.integrate.rtol;
        options["atol"] = o.quench.integrate.atol;
    }
    json cells = json::array();
    for (const PhaseCell& c : d.cells) {
        json cell = to_json(c.label);
        cell["coords"] = c.coords;
        cell["error"] = c.error ? json(*c.error) : json(nullptr);
        cells.push_back(std::move(cell));
    }
    return {{"base", to_json(d.base)}, {"axes", axes}, {"options", options}, {"cells", cells}};
}

void write_phase_diagram_csv(std::ostream& out, const PhaseDiagram& d) {
    for (const Axis& a : d.axes) out << a.name << ',';
    out << "label\n";
    for (const PhaseCell& c : d.cells) {
        for (double v : c.coords) out << fmt(v) << ',';
        out << to_string(c.label.value) << '\n';
    }
}

void write_polylines_csv(std::ostream& out, const std::string& x_name, const std::string& y_name,
                         const std::vector<Polyline>& curves) {
    out << "curve," << x_name << ',' << y_name << '\n';
    for (const Polyline& c : curves) {
        for (const auto& p : c.points) out << c.name << ',' << fmt(p[0]) << ',' << fmt(p[1]) << '\n';
    }
}

}  // namespace dimer::io
