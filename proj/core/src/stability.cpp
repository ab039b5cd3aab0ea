#include "dimer/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dimer/errors.hpp"
#include "dimer/steadystate.hpp"

namespace dimer {

const char* to_string(StabilityVerdict v) {
    switch (v) {
        case StabilityVerdict::Stable: return "stable";
        case StabilityVerdict::Marginal: return "marginal";
        case StabilityVerdict::Unstable: return "unstable";
    }
    return "?";
}

Matrix8 jacobian(const DimerParams& params, const DimerState& state, double z_floor) {
    for (int j = 0; j < 2; ++j) {
        if (std::abs(state.cavity(j).z) < z_floor) {
            std::ostringstream msg;
            msg << "jacobian: |Z_" << (j + 1) << "| = " << std::abs(state.cavity(j).z)
                << " below z_floor " << z_floor << "; use tangent_jacobian";
            throw NearSingularElimination(msg.str());
        }
    }
    const Matrix10 full = full_jacobian(params, state, params.hopping);
    Matrix8 m = Matrix8::Zero();
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
            const CavityState& sk = state.cavity(k);
            const double dz_dx = -sk.x / sk.z;
            const double dz_dy = -sk.y / sk.z;
            for (int a = 0; a < 4; ++a) {
                const int row = 5 * j + a;
                for (int b = 0; b < 4; ++b) {
                    m(4 * j + a, 4 * k + b) = full(row, 5 * k + b);
                }
                const double via_z = full(row, 5 * k + 4);
                m(4 * j + a, 4 * k + 2) += via_z * dz_dx;
                m(4 * j + a, 4 * k + 3) += via_z * dz_dy;
            }
        }
    }
    return m;
}

namespace {

// Orthonormal pair spanning the plane orthogonal to the spin vector.
std::pair<Eigen::Vector3d, Eigen::Vector3d> tangent_frame(const CavityState& s) {
    Eigen::Vector3d n(s.x, s.y, s.z);
    if (n.norm() == 0.0) n = Eigen::Vector3d(0.0, 0.0, -1.0);
    n.normalize();
    int least = 0;
    for (int i = 1; i < 3; ++i) {
        if (std::abs(n[i]) < std::abs(n[least])) least = i;
    }
    Eigen::Vector3d e = Eigen::Vector3d::Unit(least);
    Eigen::Vector3d t1 = (e - e.dot(n) * n).normalized();
    Eigen::Vector3d t2 = n.cross(t1);
    return {t1, t2};
}

}  // namespace

Matrix8 tangent_jacobian(const DimerParams& params, const DimerState& state) {
    Eigen::Matrix<double, 10, 8> basis = Eigen::Matrix<double, 10, 8>::Zero();
    for (int j = 0; j < 2; ++j) {
        basis(5 * j, 4 * j) = 1.0;
        basis(5 * j + 1, 4 * j + 1) = 1.0;
        const auto [t1, t2] = tangent_frame(state.cavity(j));
        basis.block<3, 1>(5 * j + 2, 4 * j + 2) = t1;
        basis.block<3, 1>(5 * j + 2, 4 * j + 3) = t2;
    }
    return basis.transpose() * full_jacobian(params, state, params.hopping) * basis;
}

namespace {

ComplexVector sorted_eigenvalues(const Eigen::MatrixXd& matrix) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(matrix, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "eigen-solver failed for matrix:\n" << matrix;
        throw NumericalError(msg.str());
    }
    const Eigen::VectorXcd ev = solver.eigenvalues();
    ComplexVector out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return out;
}

}  // namespace

StabilityReport stability_eigs(const Eigen::MatrixXd& matrix, double margin) {
    if (matrix.rows() != matrix.cols() || matrix.rows() == 0) {
        throw NumericalError("stability_eigs: matrix must be square and non-empty");
    }
    if (!matrix.allFinite()) {
        std::ostringstream msg;
        msg << "stability_eigs: non-finite matrix:\n" << matrix;
        throw NumericalError(msg.str());
    }
    StabilityReport r;
    r.eigenvalues = sorted_eigenvalues(matrix);
    r.max_real_part = r.eigenvalues.front().real();
    if (r.max_real_part < -margin) {
        r.verdict = StabilityVerdict::Stable;
    } else if (r.max_real_part <= margin) {
        r.verdict = StabilityVerdict::Marginal;
    } else {
        r.verdict = StabilityVerdict::Unstable;
    }
    r.stable = r.verdict == StabilityVerdict::Stable;
    return r;
}

bool has_parity_pattern(const DimerState& s, double tol) {
    const CavityState& a = s.cavity1;
    const CavityState& b = s.cavity2;
    if (std::abs(a.z - b.z) > tol) return false;
    auto matches = [&](double sign) {
        return std::abs(a.re_gamma - sign * b.re_gamma) <= tol &&
               std::abs(a.im_gamma - sign * b.im_gamma) <= tol &&
               std::abs(a.x - sign * b.x) <= tol && std::abs(a.y - sign * b.y) <= tol;
    };
    return matches(1.0) || matches(-1.0);
}

BlockMatrices block_decompose(const DimerParams& params, const DimerState& state,
                              double pattern_tol) {
    if (!params.identical_cavities()) {
        throw UnsupportedConfiguration("block_decompose: cavities are not identical");
    }
    if (!has_parity_pattern(state, pattern_tol)) {
        throw UnsupportedConfiguration(
            "block_decompose: state has neither symmetric nor antisymmetric pattern");
    }
    const Matrix8 m = jacobian(params, state);
    const Eigen::Matrix4d a1 = m.block<4, 4>(0, 0);
    const Eigen::Matrix4d a2 = m.block<4, 4>(4, 4);
    const Eigen::Matrix4d b12 = m.block<4, 4>(0, 4);
    const Eigen::Matrix4d b21 = m.block<4, 4>(4, 0);

    // The swap commutes with the Jacobian exactly when the diagonal and the
    // off-diagonal blocks agree.
    const double scale = 1.0 + m.cwiseAbs().maxCoeff();
    const double defect = std::max((a1 - a2).cwiseAbs().maxCoeff(),
                                   (b12 - b21).cwiseAbs().maxCoeff());
    if (defect > 1e3 * pattern_tol * scale) {
        std::ostringstream msg;
        msg << "block_decompose: cavity swap is not a symmetry of the Jacobian (defect "
            << defect << ")";
        throw UnsupportedConfiguration(msg.str());
    }
    const Eigen::Matrix4d a = 0.5 * (a1 + a2);
    const Eigen::Matrix4d b = 0.5 * (b12 + b21);
    return {a + b, a - b};
}

double spectrum_distance(const ComplexVector& a, const ComplexVector& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    std::vector<bool> used(b.size(), false);
    double worst = 0.0;
    for (const auto& ea : a) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_k = 0;
        for (std::size_t k = 0; k < b.size(); ++k) {
            if (used[k]) continue;
            const double d = std::abs(ea - b[k]);
            if (d < best) {
                best = d;
                best_k = k;
            }
        }
        used[best_k] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

StabilityReport analyze_stability(const DimerParams& params, const DimerState& state,
                                  double margin) {
    const bool regular = std::abs(state.cavity1.z) >= kDefaultZFloor &&
                         std::abs(state.cavity2.z) >= kDefaultZFloor;
    if (!regular) return stability_eigs(tangent_jacobian(params, state), margin);

    StabilityReport report = stability_eigs(jacobian(params, state), margin);
    if (params.identical_cavities() && has_parity_pattern(state)) {
        const BlockMatrices blocks = block_decompose(params, state);
        report.block_eigs = BlockEigenvalues{sorted_eigenvalues(blocks.symmetric),
                                             sorted_eigenvalues(blocks.antisymmetric)};
    }
    return report;
}

double np_asrp_boundary(double lambda, double kappa, double omega_c, double omega_a) {
    const double j = 0.5 * (omega_c + kappa * kappa / omega_c) - 2.0 * lambda * lambda / omega_a;
    if (j < -1e-12 * (1.0 + std::abs(omega_c))) {
        throw DomainError(
            "np_asrp_boundary: lambda exceeds lambda_c; NP is already unstable at J = 0");
    }
    return std::max(j, 0.0);
}

namespace {

struct SsrpCondition {
    CavityParams cavity;

    double spin_z(double j) const { return srp_spin_z(cavity, 2.0 * j); }
    bool exists(double j) const { return std::abs(spin_z(j)) < 0.5; }
    double operator()(double j) const {
        const double z = spin_z(j);
        return j - 0.5 * (cavity.omega_c + cavity.kappa * cavity.kappa / cavity.omega_c) -
               16.0 * cavity.lambda * cavity.lambda * z * z * z / cavity.omega_a;
    }
};

}  // namespace

std::vector<double> ssrp_boundary_roots(double lambda, double kappa, double omega_c,
                                        double omega_a) {
    std::vector<double> roots;
    if (lambda <= 0.0) return roots;
    const SsrpCondition g{CavityParams{omega_c, omega_a, lambda, kappa, 0.0}};
    const double j_usp = unstable_hopping(g.cavity);

    constexpr int kScan = 4000;
    double lo = 0.0;
    double g_lo = g(lo);
    for (int i = 1; i <= kScan; ++i) {
        const double hi = j_usp * i / kScan;
        const double g_hi = g(hi);
        if (g.exists(lo) && g.exists(hi) && ((g_lo < 0.0) != (g_hi < 0.0) || g_hi == 0.0)) {
            double a = lo, b = hi, ga = g_lo;
            for (int it = 0; it < 200 && b - a > 4 * std::numeric_limits<double>::epsilon() * b;
                 ++it) {
                const double mid = 0.5 * (a + b);
                const double gm = g(mid);
                if ((gm < 0.0) == (ga < 0.0)) {
                    a = mid;
                    ga = gm;
                } else {
                    b = mid;
                }
            }
            const double root = 0.5 * (a + b);
            if (root > 0.0) roots.push_back(root);
        }
        lo = hi;
        g_lo = g_hi;
    }
    return roots;
}

double ssrp_boundary(double lambda, double kappa, double omega_c, double omega_a) {
    const auto roots = ssrp_boundary_roots(lambda, kappa, omega_c, omega_a);
    if (roots.empty()) {
        throw NoBoundary(
            "ssrp_boundary: no root in (0, J_usp]; SSRP is stable or nonexistent throughout");
    }
    return roots.front();
}

}  // namespace dimer
