#include "dimer_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "dimer/errors.hpp"
#include "dimer/phasemap.hpp"
#include "dimer_cli/io.hpp"

namespace dimer::cli {

namespace {

using io::json;

// Bad user input detected after CLI11 parsing (axis specs, branch names, ...).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    double omega_c{1.0};
    double omega_a{1.0};
    double lambda{0.0};
    std::optional<double> lambda1;
    std::optional<double> lambda2;
    double kappa{0.2};
    std::optional<double> kappa1;
    std::optional<double> kappa2;
    double hopping{0.0};
    double chi{0.0};
    std::string out_dir;
    std::string format{"json"};
    double tol_newton{1e-10};
    double tol_ss{1e-8};
    double tol_photon{kDefaultPhotonTolerance};
    double tol_stability{kDefaultStabilityMargin};
    double tol_distinct{kDefaultDistinctTolerance};
    double rtol{1e-9};
    double atol{1e-12};

    DimerParams params() const {
        DimerParams p;
        p.cavity1 = CavityParams{omega_c, omega_a, lambda1.value_or(lambda),
                                 kappa1.value_or(kappa), chi};
        p.cavity2 = CavityParams{omega_c, omega_a, lambda2.value_or(lambda),
                                 kappa2.value_or(kappa), chi};
        p.hopping = hopping;
        validate(p);
        return p;
    }

    NewtonOptions newton() const { return {tol_newton, 100}; }
};

struct QuenchArgs {
    double j_initial{0.0};
    std::optional<double> j_final;
    std::string start1;
    std::string start2;
    std::string seed_signs{"++"};
    std::vector<double> seed_weights{1.0, 0.5};
    double seed_eps{kDefaultSeedEps};
    double t_max{5000.0};
    double sample_interval{1.0};
    bool no_certify{false};
};

struct RampArgs {
    double j_initial{0.0};
    double j_final{0.4};
    double k{0.02};
    double t_final{4000.0};
    std::string start{"NP"};
    std::string track;
    std::string seed_signs{"+-"};
    std::vector<double> seed_weights{1.0, 0.5};
    double seed_eps{kDefaultSeedEps};
    double sample_interval{1.0};
};

struct BasinArgs {
    std::string strategy{"analytic"};
    double t_max{5000.0};
    double j_initial{0.0};
    double seed_eps{kDefaultSeedEps};
};

struct SweepArgs {
    std::vector<std::string> axes;
    unsigned workers{0};
};

struct BoundaryArgs {
    std::string kind{"np-asrp"};
    std::string over;
    std::string scan_axis{"J"};
    std::vector<double> bracket;
    double resolution{kDefaultBoundaryResolution};
};

struct StateArgs {
    std::string branch;
    std::string state;
    std::vector<std::string> guesses;
};

std::vector<double> parse_numbers(const std::string& text, char sep) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("not a number: '" + item + "' in '" + text + "'");
        }
    }
    return out;
}

DimerState parse_state(const std::string& text) {
    const auto v = parse_numbers(text, ',');
    if (v.size() != kStateDim) {
        throw ConfigError("a state needs 10 comma-separated values "
                          "(re_g1,im_g1,x1,y1,z1,re_g2,im_g2,x2,y2,z2)");
    }
    StateVector sv{};
    std::copy(v.begin(), v.end(), sv.begin());
    return from_vector(sv);
}

Axis parse_axis(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("axis must be name:lo:hi:n, got '" + text + "'");
    Axis a;
    a.name = text.substr(0, colon);
    if (!is_known_axis(a.name)) throw ConfigError("unknown axis name '" + a.name + "'");
    const auto v = parse_numbers(text.substr(colon + 1), ':');
    if (v.size() != 3 || v[2] < 1 || v[2] != std::floor(v[2])) {
        throw ConfigError("axis must be name:lo:hi:n with integer n >= 1, got '" + text + "'");
    }
    a.lo = v[0];
    a.hi = v[1];
    a.n = int(v[2]);
    return a;
}

std::array<int, 2> parse_signs(const std::string& s) {
    if (s.size() != 2) throw ConfigError("seed signs must be two of '+'/'-', got '" + s + "'");
    std::array<int, 2> out{};
    for (int j = 0; j < 2; ++j) {
        if (s[j] == '+') {
            out[j] = 1;
        } else if (s[j] == '-') {
            out[j] = -1;
        } else {
            throw ConfigError("seed signs must be two of '+'/'-', got '" + s + "'");
        }
    }
    return out;
}

std::array<double, 2> parse_weights(const std::vector<double>& w) {
    if (w.size() != 2) throw ConfigError("--seed-weights takes exactly two values");
    return {w[0], w[1]};
}

CavityStart parse_start(const std::string& s) {
    if (s == "NP") return CavityStart::Normal;
    if (s == "SRP+") return CavityStart::SuperradiantPlus;
    if (s == "SRP-") return CavityStart::SuperradiantMinus;
    throw ConfigError("cavity start must be NP, SRP+ or SRP-, got '" + s + "'");
}

// NP, SSRP+, SSRP-, ASRP+, ASRP-
TrackedBranch parse_branch(const std::string& s) {
    if (s == "NP") return TrackedBranch{true, {}};
    if (s.size() == 5 && (s.starts_with("SSRP") || s.starts_with("ASRP")) &&
        (s[4] == '+' || s[4] == '-')) {
        TrackedBranch t;
        t.branch.symmetry = s[0] == 'S' ? Symmetry::Symmetric : Symmetry::Antisymmetric;
        t.branch.sign = s[4] == '+' ? Sign::Plus : Sign::Minus;
        return t;
    }
    throw ConfigError("branch must be NP, SSRP+, SSRP-, ASRP+ or ASRP-, got '" + s + "'");
}

std::string branch_name(const TrackedBranch& t) {
    if (t.normal) return "NP";
    std::string s = t.branch.symmetry == Symmetry::Symmetric ? "SSRP" : "ASRP";
    s += t.branch.sign == Sign::Plus ? '+' : '-';
    return s;
}

std::optional<DimerState> branch_state(const DimerParams& p, const TrackedBranch& t) {
    if (t.normal) return np_solution(p);
    return try_symmetric_srp_solution(p, t.branch);
}

class Output {
public:
    Output(const Common& c, std::ostream& out) : dir_(c.out_dir), out_(out) {
        if (!dir_.empty()) std::filesystem::create_directories(dir_);
    }

    bool to_files() const { return !dir_.empty(); }

    void file(const std::string& name, const std::function<void(std::ostream&)>& write) const {
        const auto path = std::filesystem::path(dir_) / name;
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
        write(f);
        if (!f) throw std::runtime_error("error writing " + path.string());
    }

    void json_file(const std::string& name, const json& j) const {
        file(name, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
    }

    std::ostream& stdout_stream() const { return out_; }

private:
    std::string dir_;
    std::ostream& out_;
};

void check_format(const Common& c) {
    if (c.format != "json" && c.format != "csv") {
        throw ConfigError("--format must be csv or json, got '" + c.format + "'");
    }
}

json stability_json(const DimerParams& p, const DimerState& s, double margin) {
    try {
        return io::to_json(analyze_stability(p, s, margin));
    } catch (const Error& e) {
        return json{{"error", e.what()}};
    }
}

json branch_entry(const std::string& name, const DimerParams& p,
                  const std::optional<DimerState>& s, double margin) {
    json j{{"name", name}, {"exists", s.has_value()}};
    if (s) {
        j["state"] = io::to_json(*s);
        j["residual"] = residual_norm(p, *s);
        j["stability"] = stability_json(p, *s, margin);
    }
    return j;
}

void write_branch_csv(std::ostream& o, const json& branches) {
    o << "name,exists,stable,max_real_part,residual,re_g1,im_g1,x1,y1,z1,re_g2,im_g2,x2,y2,z2\n";
    for (const json& b : branches) {
        o << b["name"].get<std::string>() << ',' << (b["exists"].get<bool>() ? "true" : "false");
        if (!b["exists"].get<bool>()) {
            o << ",,,,,,,,,,,,,\n";
            continue;
        }
        const json& st = b["stability"];
        if (st.contains("stable")) {
            o << ',' << (st["stable"].get<bool>() ? "true" : "false") << ','
              << io::fmt(st["max_real_part"].get<double>());
        } else {
            o << ",,";
        }
        o << ',' << io::fmt(b["residual"].get<double>());
        for (const char* cav : {"cavity1", "cavity2"}) {
            for (const char* k : {"re_gamma", "im_gamma", "x", "y", "z"}) {
                o << ',' << io::fmt(b["state"][cav][k].get<double>());
            }
        }
        o << '\n';
    }
}

json analytic_quantities(const DimerParams& p) {
    json j;
    try {
        j["critical_hopping"] = critical_hopping(p);
    } catch (const DomainError&) {
        j["critical_hopping"] = nullptr;
    }
    if (p.cavity1.omega_c == p.cavity2.omega_c && p.cavity1.kappa == p.cavity2.kappa) {
        j["J_usp"] = unstable_hopping(p.cavity1);
    }
    if (p.identical_cavities()) {
        const CavityParams& c = p.cavity1;
        try {
            j["np_asrp_boundary"] = np_asrp_boundary(c.lambda, c.kappa, c.omega_c, c.omega_a);
        } catch (const DomainError&) {
            j["np_asrp_boundary"] = nullptr;
        }
        j["ssrp_boundary_roots"] = ssrp_boundary_roots(c.lambda, c.kappa, c.omega_c, c.omega_a);
    }
    return j;
}

ClassifyOptions classify_options(const Common& c, const BasinArgs& b) {
    ClassifyOptions o;
    const auto s = strategy_from_string(b.strategy);
    if (!s) throw ConfigError("--strategy must be analytic or basin, got '" + b.strategy + "'");
    o.strategy = *s;
    o.margin = c.tol_stability;
    o.distinct_tol = c.tol_distinct;
    o.j_initial = b.j_initial;
    o.quench.t_max = b.t_max;
    o.quench.seed_eps = b.seed_eps;
    o.quench.steady.tol_ss = c.tol_ss;
    o.quench.tol_photon = c.tol_photon;
    o.quench.newton = c.newton();
    o.quench.integrate.rtol = c.rtol;
    o.quench.integrate.atol = c.atol;
    // Basin runs only need their endpoints.
    o.quench.integrate.sample_interval = 10.0;
    return o;
}

// ---------------------------------------------------------------------------

void cmd_steady(const Common& c, const StateArgs& a, const BasinArgs& b, std::ostream& out) {
    const DimerParams p = c.params();
    json branches = json::array();
    json doc{{"command", "steady"}, {"params", io::to_json(p)}, {"analytic", analytic_quantities(p)}};

    if (p.identical_cavities() && p.cavity1.chi == 0.0 && a.guesses.empty()) {
        doc["method"] = "closed_form";
        for (const char* name : {"NP", "SSRP+", "SSRP-", "ASRP+", "ASRP-"}) {
            branches.push_back(
                branch_entry(name, p, branch_state(p, parse_branch(name)), c.tol_stability));
        }
    } else {
        doc["method"] = "newton";
        branches.push_back(branch_entry("NP", p, np_solution(p), c.tol_stability));
        std::vector<DimerState> guesses;
        for (const std::string& g : a.guesses) guesses.push_back(parse_state(g));
        if (a.guesses.empty()) {
            for (int s1 : {1, -1}) {
                for (int s2 : {1, -1}) {
                    try {
                        guesses.push_back(prepare_initial_state(
                            p, p.hopping, InitialBranchSpec::basin_seed(p, s1, s2)));
                    } catch (const Error&) {
                    }
                }
            }
            BasinArgs basin = b;
            basin.strategy = "basin";
            const PhaseLabel label = classify_phase(p, classify_options(c, basin));
            for (const DimerState& s : label.evidence.clusters) {
                guesses.push_back(s);
                guesses.push_back(total_z2_flip(s));
            }
        }
        std::vector<DimerState> roots;
        roots.push_back(np_solution(p));
        for (const DimerState& g : guesses) {
            try {
                const DimerState r = solve_steady_numeric(p, g, c.newton());
                const bool seen = std::any_of(roots.begin(), roots.end(), [&](const DimerState& q) {
                    return max_norm_distance(q, r) <= 1e-8;
                });
                if (!seen) {
                    roots.push_back(r);
                    branches.push_back(branch_entry("root" + std::to_string(roots.size() - 1), p,
                                                    r, c.tol_stability));
                }
            } catch (const Error&) {
            }
        }
    }
    doc["branches"] = branches;

    Output o(c, out);
    if (o.to_files()) {
        o.json_file("steady.json", doc);
        o.file("steady.csv", [&](std::ostream& f) { write_branch_csv(f, branches); });
    }
    if (c.format == "csv") {
        write_branch_csv(out, branches);
    } else {
        out << doc.dump(2) << '\n';
    }
}

void cmd_stability(const Common& c, const StateArgs& a, std::ostream& out) {
    const DimerParams p = c.params();
    if (a.branch.empty() == a.state.empty()) {
        throw ConfigError("stability needs exactly one of --branch or --state");
    }
    std::optional<DimerState> s;
    std::string name;
    if (!a.branch.empty()) {
        name = a.branch;
        s = branch_state(p, parse_branch(a.branch));
    } else {
        name = "state";
        s = parse_state(a.state);
    }
    json doc{{"command", "stability"},
             {"params", io::to_json(p)},
             {"analytic", analytic_quantities(p)},
             {"target", branch_entry(name, p, s, c.tol_stability)}};

    auto write_csv = [&](std::ostream& f) {
        f << "kind,real,imag\n";
        if (!s) return;
        const StabilityReport r = analyze_stability(p, *s, c.tol_stability);
        for (const auto& z : r.eigenvalues) f << "full," << io::fmt(z.real()) << ',' << io::fmt(z.imag()) << '\n';
        if (r.block_eigs) {
            for (const auto& z : r.block_eigs->symmetric)
                f << "symmetric," << io::fmt(z.real()) << ',' << io::fmt(z.imag()) << '\n';
            for (const auto& z : r.block_eigs->antisymmetric)
                f << "antisymmetric," << io::fmt(z.real()) << ',' << io::fmt(z.imag()) << '\n';
        }
    };
    Output o(c, out);
    if (o.to_files()) {
        o.json_file("stability.json", doc);
        o.file("eigenvalues.csv", write_csv);
    }
    if (c.format == "csv") {
        write_csv(out);
    } else {
        out << doc.dump(2) << '\n';
    }
}

void cmd_quench(const Common& c, const QuenchArgs& q, std::ostream& out) {
    const DimerParams p = c.params();
    const auto signs = parse_signs(q.seed_signs);
    InitialBranchSpec spec = InitialBranchSpec::basin_seed(p, signs[0], signs[1]);
    if (!q.start1.empty()) spec.start[0] = parse_start(q.start1);
    if (!q.start2.empty()) spec.start[1] = parse_start(q.start2);
    spec.seed_weights = parse_weights(q.seed_weights);

    QuenchOptions opt;
    opt.t_max = q.t_max;
    opt.seed_eps = q.seed_eps;
    opt.steady.tol_ss = c.tol_ss;
    opt.newton = c.newton();
    opt.tol_photon = c.tol_photon;
    opt.integrate.rtol = c.rtol;
    opt.integrate.atol = c.atol;
    opt.integrate.sample_interval = q.sample_interval;
    if (q.no_certify) opt.certify.reset();

    const double j_final = q.j_final.value_or(p.hopping);
    const QuenchResult r = quench(p, q.j_initial, j_final, spec, opt);

    json doc = io::to_json(r);
    doc["command"] = "quench";
    doc["params"] = io::to_json(p);
    doc["J_initial"] = q.j_initial;
    doc["J_final"] = j_final;
    doc["start"] = {to_string(spec.start[0]), to_string(spec.start[1])};
    doc["seed_signs"] = q.seed_signs;
    if (r.label) {
        doc["final_label"] = *r.label == PhaseVerdict::BothNormal         ? "NP_NP"
                             : *r.label == PhaseVerdict::BothSuperradiant ? "SRP_SRP"
                                                                          : "Mixed";
    } else {
        doc["final_label"] = nullptr;
    }
    if (r.steady) {
        DimerParams at_f = p;
        at_f.hopping = j_final;
        doc["steady_stability"] = stability_json(at_f, *r.steady, c.tol_stability);
    }

    Output o(c, out);
    if (o.to_files()) {
        o.json_file("quench.json", doc);
        o.file("trajectory.csv", [&](std::ostream& f) { io::write_trajectory_csv(f, r.trajectory); });
    }
    if (c.format == "csv") {
        io::write_trajectory_csv(out, r.trajectory);
    } else {
        out << doc.dump(2) << '\n';
    }
}

void cmd_ramp(const Common& c, const RampArgs& a, std::ostream& out, std::ostream& err) {
    const DimerParams p = c.params();
    const AtanRamp ramp{a.j_initial, a.j_final, a.k, a.t_final};
    if (!ramp.adiabatic()) {
        err << "warning: k * t_final = " << ramp.k * ramp.t_final
            << " < 10; the ramp is not adiabatic\n";
    }
    DimerParams at_i = p;
    at_i.hopping = a.j_initial;
    const TrackedBranch start = parse_branch(a.start);
    const auto s0 = branch_state(at_i, start);
    if (!s0) throw ConfigError("branch " + a.start + " does not exist at J_initial");
    const DimerState seeded =
        a.seed_eps > 0.0 ? seed_perturb(*s0, a.seed_eps, parse_signs(a.seed_signs),
                                        parse_weights(a.seed_weights))
                         : *s0;

    RampOptions opt;
    opt.integrate.rtol = c.rtol;
    opt.integrate.atol = c.atol;
    opt.integrate.sample_interval = a.sample_interval;
    // The seed would defeat branch inference, so follow the start branch by default.
    opt.track = a.track.empty() ? start : parse_branch(a.track);
    const RampResult r = adiabatic_ramp(p, ramp, seeded, opt);

    json doc = io::to_json(r);
    doc["command"] = "ramp";
    doc["params"] = io::to_json(p);
    doc["ramp"] = {{"J_initial", ramp.j_initial}, {"J_final", ramp.j_final},
                   {"k", ramp.k},                 {"t_final", ramp.t_final},
                   {"adiabatic", ramp.adiabatic()}};
    doc["start"] = branch_name(start);
    doc["seed_eps"] = a.seed_eps;

    auto write_tracking = [&](std::ostream& f) {
        f << "t,J,tracking_error\n";
        for (std::size_t i = 0; i < r.trajectory.samples.size(); ++i) {
            const Sample& s = r.trajectory.samples[i];
            f << io::fmt(s.t) << ',' << io::fmt(s.hopping) << ','
              << io::fmt(i < r.tracking_error.size() ? r.tracking_error[i] : std::nan("")) << '\n';
        }
    };
    Output o(c, out);
    if (o.to_files()) {
        o.json_file("ramp.json", doc);
        o.file("trajectory.csv", [&](std::ostream& f) { io::write_trajectory_csv(f, r.trajectory); });
        o.file("tracking.csv", write_tracking);
    }
    if (c.format == "csv") {
        io::write_trajectory_csv(out, r.trajectory);
    } else {
        out << doc.dump(2) << '\n';
    }
}

void cmd_sweep(const Common& c, const SweepArgs& s, const BasinArgs& b, std::ostream& out) {
    const DimerParams p = c.params();
    if (s.axes.empty() || s.axes.size() > 3) throw ConfigError("sweep needs one to three --axis");
    std::vector<Axis> axes;
    for (const std::string& a : s.axes) axes.push_back(parse_axis(a));
    const PhaseDiagram d = sweep_grid(p, axes, classify_options(c, b), s.workers);

    Output o(c, out);
    if (o.to_files()) {
        o.json_file("diagram.json", io::to_json(d));
        o.file("diagram.csv", [&](std::ostream& f) { io::write_phase_diagram_csv(f, d); });
    }
    if (c.format == "csv") {
        io::write_phase_diagram_csv(out, d);
    } else {
        out << io::to_json(d).dump(2) << '\n';
    }
}

void cmd_boundary(const Common& c, const BoundaryArgs& a, const BasinArgs& b, std::ostream& out) {
    const DimerParams base = c.params();
    std::optional<Axis> over;
    if (!a.over.empty()) over = parse_axis(a.over);

    std::vector<DimerParams> points;
    std::vector<double> xs;
    if (over) {
        for (int i = 0; i < over->n; ++i) {
            DimerParams p = base;
            apply_axis(p, over->name, over->value(i));
            points.push_back(p);
            xs.push_back(over->value(i));
        }
    } else {
        points.push_back(base);
    }

    std::function<std::vector<double>(const DimerParams&)> eval;
    std::string y_name = "J";
    const auto& kind = a.kind;
    if (kind == "np-asrp" || kind == "ssrp") {
        eval = [&kind](const DimerParams& p) -> std::vector<double> {
            if (!p.identical_cavities()) {
                throw UnsupportedConfiguration("analytic boundaries need identical cavities");
            }
            const CavityParams& cv = p.cavity1;
            if (kind == "ssrp") return ssrp_boundary_roots(cv.lambda, cv.kappa, cv.omega_c, cv.omega_a);
            try {
                return {np_asrp_boundary(cv.lambda, cv.kappa, cv.omega_c, cv.omega_a)};
            } catch (const DomainError&) {
                return {};
            }
        };
    } else if (kind == "critical") {
        eval = [](const DimerParams& p) -> std::vector<double> {
            try {
                return {critical_hopping(p)};
            } catch (const DomainError&) {
                return {};
            }
        };
    } else if (kind == "multistable" || kind == "np-threshold") {
        if (!is_known_axis(a.scan_axis)) throw ConfigError("unknown --scan-axis '" + a.scan_axis + "'");
        if (a.bracket.size() != 2) throw ConfigError("--bracket takes two values");
        y_name = a.scan_axis;
        const ClassifyOptions opt = classify_options(c, b);
        eval = [&, opt](const DimerParams& p) -> std::vector<double> {
            try {
                if (kind == "multistable") {
                    return {multistable_boundary(p, a.scan_axis, a.bracket[0], a.bracket[1], opt,
                                                 a.resolution)};
                }
                return {phase_boundary(
                    p, a.scan_axis, a.bracket[0], a.bracket[1],
                    [](const PhaseLabel& l) { return l.value == Phase::NP_NP; }, opt,
                    a.resolution)};
            } catch (const BracketError&) {
                if (!over) throw;
                return {};
            }
        };
    } else {
        throw ConfigError("--kind must be np-asrp, ssrp, critical, multistable or np-threshold");
    }

    // Each root index becomes its own polyline (the SSRP condition can have several).
    std::vector<io::Polyline> curves;
    json rows = json::array();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto ys = eval(points[i]);
        for (std::size_t r = 0; r < ys.size(); ++r) {
            if (curves.size() <= r) {
                curves.push_back({r == 0 ? kind : kind + "_" + std::to_string(r + 1), {}});
            }
            curves[r].points.push_back({over ? xs[i] : std::nan(""), ys[r]});
        }
        json row{{y_name, ys}};
        if (over) row[over->name] = xs[i];
        rows.push_back(row);
    }
    json doc{{"command", "boundary"}, {"kind", kind}, {"params", io::to_json(base)}, {"points", rows}};

    auto write_csv = [&](std::ostream& f) {
        if (over) {
            io::write_polylines_csv(f, over->name, y_name, curves);
        } else {
            f << "curve," << y_name << '\n';
            for (const auto& cv : curves) f << cv.name << ',' << io::fmt(cv.points[0][1]) << '\n';
        }
    };
    Output o(c, out);
    if (o.to_files()) {
        o.json_file("boundary.json", doc);
        o.file("boundary.csv", write_csv);
    }
    if (c.format == "csv") {
        write_csv(out);
    } else {
        out << doc.dump(2) << '\n';
    }
}

void add_common(CLI::App& app, Common& c) {
    app.add_option("--omega-c", c.omega_c, "cavity frequency")->capture_default_str();
    app.add_option("--omega-a", c.omega_a, "atomic frequency")->capture_default_str();
    app.add_option("--lambda", c.lambda, "atom-cavity coupling (both cavities)")->capture_default_str();
    app.add_option("--lambda1", c.lambda1, "coupling of cavity 1 (overrides --lambda)");
    app.add_option("--lambda2", c.lambda2, "coupling of cavity 2 (overrides --lambda)");
    app.add_option("--kappa", c.kappa, "photon decay (both cavities)")->capture_default_str();
    app.add_option("--kappa1", c.kappa1, "decay of cavity 1 (overrides --kappa)");
    app.add_option("--kappa2", c.kappa2, "decay of cavity 2 (overrides --kappa)");
    app.add_option("--J", c.hopping, "photon hopping")->capture_default_str();
    app.add_option("--chi", c.chi, "Kerr nonlinearity (scaled by N)")->capture_default_str();
    app.add_option("--out", c.out_dir, "write artifacts into this directory");
    app.add_option("--format", c.format, "stdout format: csv or json")->capture_default_str();
    app.add_option("--tol-newton", c.tol_newton, "Newton residual tolerance")->capture_default_str();
    app.add_option("--tol-ss", c.tol_ss, "steady-state residual tolerance")->capture_default_str();
    app.add_option("--tol-photon", c.tol_photon, "photon threshold for phase labels")
        ->capture_default_str();
    app.add_option("--tol-stability", c.tol_stability, "eigenvalue margin for stability")
        ->capture_default_str();
    app.add_option("--tol-distinct", c.tol_distinct, "distinctness of steady states modulo Z2")
        ->capture_default_str();
    app.add_option("--rtol", c.rtol, "integrator relative tolerance")->capture_default_str();
    app.add_option("--atol", c.atol, "integrator absolute tolerance")->capture_default_str();
}

void add_basin(CLI::App& sub, BasinArgs& b, bool with_strategy) {
    if (with_strategy) {
        sub.add_option("--strategy", b.strategy, "analytic or basin")->capture_default_str();
    }
    sub.add_option("--t-max", b.t_max, "basin quench duration")->capture_default_str();
    sub.add_option("--basin-J-initial", b.j_initial, "hopping of the basin seeds")
        ->capture_default_str();
    sub.add_option("--seed-eps", b.seed_eps, "basin seed perturbation")->capture_default_str();
}

bool is_toml_scalar(const std::string& v) {
    if (v == "true" || v == "false") return true;
    try {
        std::size_t used = 0;
        std::stod(v, &used);
        return used == v.size();
    } catch (const std::exception&) {
        return false;
    }
}

std::string toml_value(const std::string& v) {
    if (is_toml_scalar(v)) return v;
    std::string q = "\"";
    for (char ch : v) {
        if (ch == '"' || ch == '\\') q += '\\';
        q += ch;
    }
    return q + '"';
}

// Effective configuration as TOML: every option that was given or has a
// default, root options first, then the selected subcommand's section. Unset
// optional values are left out so the echo parses back.
void echo_options(const CLI::App& app, std::ostream& out) {
    for (const CLI::Option* opt : app.get_options()) {
        if (!opt->get_configurable() || opt->get_single_name() == "help") continue;
        std::vector<std::string> values;
        if (opt->count() > 0) {
            values = opt->results();
        } else if (!opt->get_default_str().empty()) {
            std::string d = opt->get_default_str();
            if (d.size() >= 2 && d.front() == '[' && d.back() == ']') {
                std::stringstream ss(d.substr(1, d.size() - 2));
                std::string item;
                while (std::getline(ss, item, ',')) values.push_back(item);
            } else {
                values.push_back(d);
            }
        } else if (opt->get_expected_max() == 0) {
            values.push_back("false");
        }
        if (values.empty()) continue;
        out << opt->get_single_name() << '=';
        const bool array = values.size() > 1 || opt->get_items_expected_max() > 1;
        if (array) out << '[';
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out << ',';
            out << toml_value(values[i]);
        }
        if (array) out << ']';
        out << '\n';
    }
}

std::string effective_config(const CLI::App& app) {
    std::ostringstream out;
    echo_options(app, out);
    for (const CLI::App* sub : app.get_subcommands()) {
        out << '[' << sub->get_name() << "]\n";
        echo_options(*sub, out);
    }
    return out.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mean-field dynamics and phase diagrams of the open Dicke dimer", "dimer"};
    app.set_config("--config", "", "TOML configuration file (flags override it)");
    app.require_subcommand(1);
    app.fallthrough();

    Common common;
    add_common(app, common);
    bool quiet = false;
    app.add_flag("--quiet", quiet, "do not echo the effective configuration");

    StateArgs state_args;
    BasinArgs basin_args;
    QuenchArgs quench_args;
    RampArgs ramp_args;
    SweepArgs sweep_args;
    BoundaryArgs boundary_args;

    auto* steady = app.add_subcommand("steady", "steady states with residuals and stability");
    steady->add_option("--guess", state_args.guesses,
                       "Newton initial guess (10 comma-separated values); repeatable");
    add_basin(*steady, basin_args, false);

    auto* stability = app.add_subcommand("stability", "eigenvalues at a branch or a given state");
    stability->add_option("--branch", state_args.branch, "NP, SSRP+, SSRP-, ASRP+ or ASRP-");
    stability->add_option("--state", state_args.state, "10 comma-separated state components");

    auto* quench_cmd = app.add_subcommand("quench", "sudden hopping change from a prepared state");
    quench_cmd->add_option("--Ji", quench_args.j_initial, "hopping before the quench")->capture_default_str();
    quench_cmd->add_option("--Jf", quench_args.j_final, "hopping after the quench (default --J)");
    quench_cmd->add_option("--start1", quench_args.start1, "cavity 1 start: NP, SRP+ or SRP-");
    quench_cmd->add_option("--start2", quench_args.start2, "cavity 2 start: NP, SRP+ or SRP-");
    quench_cmd->add_option("--seed-signs", quench_args.seed_signs, "seed signs, e.g. ++ or +-")
        ->capture_default_str();
    quench_cmd->add_option("--seed-weights", quench_args.seed_weights, "per-cavity seed weights")
        ->expected(2)->capture_default_str();
    quench_cmd->add_option("--seed-eps", quench_args.seed_eps, "seed magnitude")->capture_default_str();
    quench_cmd->add_option("--t-max", quench_args.t_max, "integration time")->capture_default_str();
    quench_cmd->add_option("--sample-interval", quench_args.sample_interval, "output stride")
        ->capture_default_str();
    quench_cmd->add_flag("--no-certify", quench_args.no_certify,
                         "only the sustained-residual rule ends a run early");

    auto* ramp_cmd = app.add_subcommand("ramp", "atan hopping ramp from a branch steady state");
    ramp_cmd->add_option("--Ji", ramp_args.j_initial, "initial hopping")->capture_default_str();
    ramp_cmd->add_option("--Jf", ramp_args.j_final, "final hopping")->capture_default_str();
    ramp_cmd->add_option("--k", ramp_args.k, "ramp steepness")->capture_default_str();
    ramp_cmd->add_option("--t-final", ramp_args.t_final, "ramp duration")->capture_default_str();
    ramp_cmd->add_option("--start", ramp_args.start, "NP, SSRP+, SSRP-, ASRP+ or ASRP-")
        ->capture_default_str();
    ramp_cmd->add_option("--track", ramp_args.track, "branch to track (default: --start)");
    ramp_cmd->add_option("--seed-signs", ramp_args.seed_signs, "seed signs")->capture_default_str();
    ramp_cmd->add_option("--seed-weights", ramp_args.seed_weights, "per-cavity seed weights")
        ->expected(2)->capture_default_str();
    ramp_cmd->add_option("--seed-eps", ramp_args.seed_eps, "seed magnitude (0: none)")
        ->capture_default_str();
    ramp_cmd->add_option("--sample-interval", ramp_args.sample_interval, "output stride")
        ->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "phase diagram over 1-3 parameter axes");
    sweep->add_option("--axis", sweep_args.axes, "name:lo:hi:n; repeatable")->required();
    sweep->add_option("--workers", sweep_args.workers, "worker threads (0: all cores)")
        ->capture_default_str();
    add_basin(*sweep, basin_args, true);

    auto* boundary = app.add_subcommand("boundary", "phase boundaries, analytic or by bisection");
    boundary->add_option("--kind", boundary_args.kind,
                         "np-asrp, ssrp, critical, multistable or np-threshold")
        ->capture_default_str();
    boundary->add_option("--over", boundary_args.over, "name:lo:hi:n outer axis for a polyline");
    boundary->add_option("--scan-axis", boundary_args.scan_axis, "bisection axis")
        ->capture_default_str();
    boundary->add_option("--bracket", boundary_args.bracket, "bisection bracket lo hi")->expected(2);
    boundary->add_option("--resolution", boundary_args.resolution, "bisection resolution")
        ->capture_default_str();
    add_basin(*boundary, basin_args, true);

    for (auto* sub : app.get_subcommands({})) sub->configurable();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kConfigError;
    }

    try {
        check_format(common);
        const std::string echo = effective_config(app);
        if (!quiet) err << "# effective configuration\n" << echo;
        if (!common.out_dir.empty()) {
            Output o(common, out);
            o.file("config.toml", [&](std::ostream& f) { f << echo; });
        }
        if (*steady) cmd_steady(common, state_args, basin_args, out);
        if (*stability) cmd_stability(common, state_args, out);
        if (*quench_cmd) cmd_quench(common, quench_args, out);
        if (*ramp_cmd) cmd_ramp(common, ramp_args, out, err);
        if (*sweep) cmd_sweep(common, sweep_args, basin_args, out);
        if (*boundary) cmd_boundary(common, boundary_args, basin_args, out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const InvalidParameters& e) {
        err << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const UnsupportedConfiguration& e) {
        err << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeFailure;
    }
    return kSuccess;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace dimer::cli
