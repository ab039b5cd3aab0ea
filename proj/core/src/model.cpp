#include "dimer/model.hpp"

#include <cmath>
#include <sstream>

#include "dimer/errors.hpp"

namespace dimer {

DimerParams symmetric_dimer(const CavityParams& cavity, double hopping) {
    return DimerParams{cavity, cavity, hopping};
}

double CavityState::photon_amplitude() const { return std::hypot(re_gamma, im_gamma); }

StateVector to_vector(const DimerState& s) {
    return {s.cavity1.re_gamma, s.cavity1.im_gamma, s.cavity1.x, s.cavity1.y, s.cavity1.z,
            s.cavity2.re_gamma, s.cavity2.im_gamma, s.cavity2.x, s.cavity2.y, s.cavity2.z};
}

DimerState from_vector(const StateVector& v) {
    return DimerState{CavityState{v[0], v[1], v[2], v[3], v[4]},
                      CavityState{v[5], v[6], v[7], v[8], v[9]}};
}

void validate(const CavityParams& c) {
    const bool finite = std::isfinite(c.omega_c) && std::isfinite(c.omega_a) &&
                        std::isfinite(c.lambda) && std::isfinite(c.kappa) &&
                        std::isfinite(c.chi);
    if (!finite || c.omega_c <= 0.0 || c.omega_a <= 0.0 || c.lambda < 0.0 || c.kappa < 0.0) {
        std::ostringstream msg;
        msg << "invalid cavity parameters: omega_c=" << c.omega_c << " omega_a=" << c.omega_a
            << " lambda=" << c.lambda << " kappa=" << c.kappa << " chi=" << c.chi;
        throw InvalidParameters(msg.str());
    }
}

void validate(const DimerParams& p) {
    validate(p.cavity1);
    validate(p.cavity2);
    if (!std::isfinite(p.hopping) || p.hopping < 0.0) {
        throw InvalidParameters("hopping must be finite and non-negative");
    }
}

bool is_finite(const DimerState& state) {
    for (double v : to_vector(state)) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

DimerState total_z2_flip(const DimerState& s) {
    DimerState out = s;
    for (int j = 0; j < 2; ++j) {
        auto& c = out.cavity(j);
        c.re_gamma = -c.re_gamma;
        c.im_gamma = -c.im_gamma;
        c.x = -c.x;
        c.y = -c.y;
    }
    return out;
}

void eom_rhs_raw(const DimerParams& p, const double* s, double* d, double j_now) {
    for (int j = 0; j < 2; ++j) {
        const CavityParams& c = p.cavity(j);
        const double* v = s + 5 * j;
        double* dv = d + 5 * j;
        const double re = v[0], im = v[1], x = v[2], y = v[3], z = v[4];
        const double re_other = s[5 * (1 - j)];
        // Kerr-shifted cavity frequency.
        const double wc = c.omega_c + 2.0 * c.chi * (re * re + im * im);
        dv[0] = -c.kappa * re + wc * im;
        dv[1] = -wc * re - c.kappa * im - 2.0 * j_now * re_other - 2.0 * c.lambda * x;
        dv[2] = -c.omega_a * y;
        dv[3] = c.omega_a * x - 4.0 * c.lambda * z * re;
        dv[4] = 4.0 * c.lambda * y * re;
    }
}

StateVector eom_rhs(const DimerParams& params, const DimerState& state, double j_now) {
    if (!is_finite(state) || !std::isfinite(j_now)) {
        throw InvalidState("eom_rhs: non-finite state or hopping");
    }
    const StateVector v = to_vector(state);
    StateVector out{};
    eom_rhs_raw(params, v.data(), out.data(), j_now);
    return out;
}

StateVector eom_rhs(const DimerParams& params, const DimerState& state) {
    return eom_rhs(params, state, params.hopping);
}

double residual_norm(const DimerParams& params, const DimerState& state, double j_now) {
    const StateVector d = eom_rhs(params, state, j_now);
    double sum = 0.0;
    for (double v : d) sum += v * v;
    return std::sqrt(sum);
}

double residual_norm(const DimerParams& params, const DimerState& state) {
    return residual_norm(params, state, params.hopping);
}

Matrix10 full_jacobian(const DimerParams& p, const DimerState& state, double j_now) {
    Matrix10 m = Matrix10::Zero();
    for (int j = 0; j < 2; ++j) {
        const CavityParams& c = p.cavity(j);
        const CavityState& s = state.cavity(j);
        const int o = 5 * j;
        const int other = 5 * (1 - j);
        const double re = s.re_gamma, im = s.im_gamma;
        const double g2 = re * re + im * im;
        const double wc = c.omega_c + 2.0 * c.chi * g2;

        m(o, o) = -c.kappa + 4.0 * c.chi * re * im;
        m(o, o + 1) = wc + 4.0 * c.chi * im * im;

        m(o + 1, o) = -wc - 4.0 * c.chi * re * re;
        m(o + 1, o + 1) = -c.kappa - 4.0 * c.chi * re * im;
        m(o + 1, other) = -2.0 * j_now;
        m(o + 1, o + 2) = -2.0 * c.lambda;

        m(o + 2, o + 3) = -c.omega_a;

        m(o + 3, o) = -4.0 * c.lambda * s.z;
        m(o + 3, o + 2) = c.omega_a;
        m(o + 3, o + 4) = -4.0 * c.lambda * re;

        m(o + 4, o) = 4.0 * c.lambda * s.y;
        m(o + 4, o + 3) = 4.0 * c.lambda * re;
    }
    return m;
}

double critical_coupling(const CavityParams& c) {
    return 0.5 * std::sqrt(c.omega_a * (c.omega_c + c.kappa * c.kappa / c.omega_c));
}

double critical_hopping(const DimerParams& p) {
    const double lc1 = critical_coupling(p.cavity1);
    const double lc2 = critical_coupling(p.cavity2);
    const double f1 = lc1 * lc1 - p.cavity1.lambda * p.cavity1.lambda;
    const double f2 = lc2 * lc2 - p.cavity2.lambda * p.cavity2.lambda;
    if (f1 < 0.0 || f2 < 0.0) {
        throw DomainError(
            "critical_hopping: a cavity is supercritical; no NP->SRP hopping threshold "
            "exists and the final state is SRP&SRP for any J > 0");
    }
    return 2.0 * std::sqrt(f1 * f2 / (p.cavity1.omega_a * p.cavity2.omega_a));
}

double mean_field_energy(const DimerParams& p, const DimerState& state, double j_now) {
    double e = 0.0;
    for (int j = 0; j < 2; ++j) {
        const CavityParams& c = p.cavity(j);
        const CavityState& s = state.cavity(j);
        const double g2 = s.re_gamma * s.re_gamma + s.im_gamma * s.im_gamma;
        e += c.omega_c * g2 + c.omega_a * s.z + 4.0 * c.lambda * s.x * s.re_gamma +
             c.chi * g2 * g2;
    }
    e += 4.0 * j_now * state.cavity1.re_gamma * state.cavity2.re_gamma;
    return e;
}

double mean_field_energy(const DimerParams& p, const DimerState& state) {
    return mean_field_energy(p, state, p.hopping);
}

double unstable_hopping(const CavityParams& c) {
    return (c.omega_c * c.omega_c + c.kappa * c.kappa) / (2.0 * c.omega_c);
}

PhotonBranches photon_branch_energies(const DimerParams& p) {
    if (p.cavity1.omega_c != p.cavity2.omega_c || p.cavity1.kappa != p.cavity2.kappa) {
        throw UnsupportedConfiguration(
            "photon_branch_energies: cavity frequencies or decay rates differ; only the "
            "symmetric photon sector is supported");
    }
    const double wc = p.cavity1.omega_c;
    const double kappa = p.cavity1.kappa;
    PhotonBranches b;
    b.upper = std::sqrt(std::complex<double>(wc * (wc + 2.0 * p.hopping), 0.0));
    b.lower = std::sqrt(std::complex<double>(wc * (wc - 2.0 * p.hopping), 0.0));
    b.j_usp = (wc * wc + kappa * kappa) / (2.0 * wc);
    return b;
}

SpinNormError spin_norm_error(const DimerState& s) {
    auto err = [](const CavityState& c) {
        return std::abs(c.x * c.x + c.y * c.y + c.z * c.z - 0.25);
    };
    return {err(s.cavity1), err(s.cavity2)};
}

}  // namespace dimer
