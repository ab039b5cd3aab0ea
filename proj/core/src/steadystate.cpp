#include "dimer/steadystate.hpp"

#include <cmath>
#include <sstream>

#include "dimer/errors.hpp"

namespace dimer {

DimerState np_solution(const DimerParams&) {
    return DimerState{};
}

double srp_spin_z(const CavityParams& c, double shift) {
    return -(c.omega_a / (8.0 * c.lambda * c.lambda)) *
           (c.omega_c + shift + c.kappa * c.kappa / c.omega_c);
}

namespace {

// Superradiant cavity state for a given spin-z; returns nullopt outside
// 0 < |Z| < 1/2. Z = 0 is the onset of the unstable phase, where the photon
// amplitude is unbounded.
std::optional<CavityState> srp_cavity(const CavityParams& c, double z, double sign) {
    if (c.lambda <= 0.0 || !std::isfinite(z) || std::abs(z) >= 0.5 || z == 0.0) {
        return std::nullopt;
    }
    const double root = std::sqrt(1.0 / (4.0 * z * z) - 1.0);
    CavityState s;
    s.re_gamma = sign * c.omega_a / (4.0 * c.lambda) * root;
    s.im_gamma = c.kappa * s.re_gamma / c.omega_c;
    s.x = 4.0 * c.lambda * z * s.re_gamma / c.omega_a;
    s.y = 0.0;
    s.z = z;
    return s;
}

const char* symmetry_name(Symmetry s) {
    return s == Symmetry::Symmetric ? "symmetric" : "antisymmetric";
}

}  // namespace

CavityState single_cavity_srp(const CavityParams& cavity, Sign sign) {
    if (cavity.lambda <= critical_coupling(cavity)) {
        throw NonexistenceError("single_cavity_srp: cavity is not superradiant");
    }
    auto s = srp_cavity(cavity, srp_spin_z(cavity, 0.0), sign_value(sign));
    if (!s) throw NonexistenceError("single_cavity_srp: no superradiant solution");
    return *s;
}

std::optional<DimerState> try_symmetric_srp_solution(const DimerParams& params,
                                                     SrpBranch branch) {
    if (!params.identical_cavities()) {
        throw UnsupportedConfiguration(
            "symmetric_srp_solution: closed form requires identical cavities");
    }
    const CavityParams& c = params.cavity1;
    if (c.chi != 0.0) {
        throw UnsupportedConfiguration(
            "symmetric_srp_solution: closed form requires chi = 0; use solve_steady_numeric");
    }
    const bool symmetric = branch.symmetry == Symmetry::Symmetric;
    const double shift = (symmetric ? 2.0 : -2.0) * params.hopping;
    auto first = srp_cavity(c, srp_spin_z(c, shift), sign_value(branch.sign));
    if (!first) return std::nullopt;

    DimerState s{*first, *first};
    if (!symmetric) {
        s.cavity2.re_gamma = -first->re_gamma;
        s.cavity2.im_gamma = -first->im_gamma;
        s.cavity2.x = -first->x;
    }
    return s;
}

DimerState symmetric_srp_solution(const DimerParams& params, SrpBranch branch) {
    auto s = try_symmetric_srp_solution(params, branch);
    if (!s) {
        std::ostringstream msg;
        msg << "symmetric_srp_solution: " << symmetry_name(branch.symmetry)
            << " branch does not exist (|Z| >= 1/2, parameters lie in the normal phase)";
        throw NonexistenceError(msg.str());
    }
    return *s;
}

namespace {

using Vector10 = Eigen::Matrix<double, 10, 1>;

// Eight photon/planar-spin rows of the flow plus the two spin-norm constraints.
Vector10 steady_residual(const DimerParams& params, const Vector10& u) {
    StateVector v;
    for (int i = 0; i < 10; ++i) v[i] = u[i];
    StateVector d{};
    eom_rhs_raw(params, v.data(), d.data(), params.hopping);
    Vector10 f;
    for (int i = 0; i < 10; ++i) f[i] = d[i];
    for (int j = 0; j < 2; ++j) {
        const int o = 5 * j;
        f[o + 4] = u[o + 2] * u[o + 2] + u[o + 3] * u[o + 3] + u[o + 4] * u[o + 4] - 0.25;
    }
    return f;
}

Matrix10 steady_residual_jacobian(const DimerParams& params, const Vector10& u) {
    StateVector v;
    for (int i = 0; i < 10; ++i) v[i] = u[i];
    Matrix10 m = full_jacobian(params, from_vector(v), params.hopping);
    for (int j = 0; j < 2; ++j) {
        const int o = 5 * j;
        m.row(o + 4).setZero();
        m(o + 4, o + 2) = 2.0 * u[o + 2];
        m(o + 4, o + 3) = 2.0 * u[o + 3];
        m(o + 4, o + 4) = 2.0 * u[o + 4];
    }
    return m;
}

DimerState to_state(const Vector10& u) {
    StateVector v;
    for (int i = 0; i < 10; ++i) v[i] = u[i];
    return from_vector(v);
}

bool converged(const DimerParams& params, const DimerState& s, double tol) {
    const SpinNormError e = spin_norm_error(s);
    return residual_norm(params, s) < tol && e.max() < tol;
}

}  // namespace

DimerState solve_steady_numeric(const DimerParams& params, const DimerState& guess,
                                const NewtonOptions& options) {
    if (!is_finite(guess)) throw InvalidState("solve_steady_numeric: non-finite guess");

    const StateVector g = to_vector(guess);
    Vector10 u;
    for (int i = 0; i < 10; ++i) u[i] = g[i];

    Vector10 f = steady_residual(params, u);
    double phi = 0.5 * f.squaredNorm();
    int iter = 0;
    for (; iter <= options.max_iterations; ++iter) {
        const DimerState current = to_state(u);
        if (converged(params, current, options.tol)) {
            for (int j = 0; j < 2; ++j) {
                if (std::abs(current.cavity(j).z) > 0.5 + options.tol) {
                    throw ConstraintViolation("solve_steady_numeric: root has |Z| > 1/2");
                }
            }
            return current;
        }
        if (iter == options.max_iterations) break;

        const Matrix10 jac = steady_residual_jacobian(params, u);
        Eigen::FullPivLU<Matrix10> lu(jac);
        Vector10 step = -lu.solve(f);
        if (!step.allFinite()) break;

        // Armijo backtracking on phi = |F|^2 / 2; the Newton direction has slope -2 phi.
        double t = 1.0;
        Vector10 trial_u;
        Vector10 trial_f;
        double trial_phi = phi;
        while (t > 1e-12) {
            trial_u = u + t * step;
            trial_f = steady_residual(params, trial_u);
            trial_phi = 0.5 * trial_f.squaredNorm();
            if (std::isfinite(trial_phi) && trial_phi <= (1.0 - 2e-4 * t) * phi) break;
            t *= 0.5;
        }
        if (t <= 1e-12) break;
        u = trial_u;
        f = trial_f;
        phi = trial_phi;
    }

    std::ostringstream msg;
    msg << "solve_steady_numeric: no convergence after " << iter
        << " iterations (residual " << std::sqrt(2.0 * phi) << ")";
    throw ConvergenceError(msg.str(), residual_norm(params, to_state(u)), iter);
}

const char* to_string(PhaseVerdict v) {
    switch (v) {
        case PhaseVerdict::BothNormal: return "BothNormal";
        case PhaseVerdict::BothSuperradiant: return "BothSuperradiant";
        case PhaseVerdict::Mixed: return "Mixed";
    }
    return "?";
}

PhaseVerdict verify_same_phase(const DimerState& state, double tol_photon) {
    const bool sr1 = state.cavity1.photon_amplitude() >= tol_photon;
    const bool sr2 = state.cavity2.photon_amplitude() >= tol_photon;
    if (sr1 && sr2) return PhaseVerdict::BothSuperradiant;
    if (!sr1 && !sr2) return PhaseVerdict::BothNormal;
    return PhaseVerdict::Mixed;
}

}  // namespace dimer
