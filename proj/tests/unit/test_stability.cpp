#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "dimer/errors.hpp"
#include "dimer/stability.hpp"
#include "dimer/steadystate.hpp"
#include "test_support.hpp"

using namespace dimer;

namespace {

CavityParams cavity(double lambda, double kappa = 0.2) {
    CavityParams c;
    c.lambda = lambda;
    c.kappa = kappa;
    return c;
}

constexpr SrpBranch kAsrpPlus{Symmetry::Antisymmetric, Sign::Plus};
constexpr SrpBranch kSsrpPlus{Symmetry::Symmetric, Sign::Plus};

// Reduced flow in (Re, Im, X, Y) per cavity with Z on the lower or upper hemisphere.
Eigen::Matrix<double, 8, 1> reduced_rhs(const DimerParams& p, const Eigen::Matrix<double, 8, 1>& u,
                                        const std::array<double, 2>& hemisphere) {
    DimerState s;
    for (int j = 0; j < 2; ++j) {
        CavityState& c = s.cavity(j);
        c.re_gamma = u[4 * j];
        c.im_gamma = u[4 * j + 1];
        c.x = u[4 * j + 2];
        c.y = u[4 * j + 3];
        c.z = hemisphere[j] * std::sqrt(0.25 - c.x * c.x - c.y * c.y);
    }
    const StateVector d = eom_rhs(p, s);
    Eigen::Matrix<double, 8, 1> out;
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 4; ++k) out[4 * j + k] = d[5 * j + k];
    return out;
}

Matrix8 fd_jacobian(const DimerParams& p, const DimerState& s, double h = 1e-6) {
    Eigen::Matrix<double, 8, 1> u;
    std::array<double, 2> hemi{};
    for (int j = 0; j < 2; ++j) {
        const CavityState& c = s.cavity(j);
        u.segment<4>(4 * j) << c.re_gamma, c.im_gamma, c.x, c.y;
        hemi[j] = c.z < 0 ? -1.0 : 1.0;
    }
    Matrix8 m;
    for (int k = 0; k < 8; ++k) {
        Eigen::Matrix<double, 8, 1> a = u, b = u;
        a[k] += h;
        b[k] -= h;
        m.col(k) = (reduced_rhs(p, a, hemi) - reduced_rhs(p, b, hemi)) / (2 * h);
    }
    return m;
}

double max_real(const DimerParams& p, const DimerState& s) {
    return analyze_stability(p, s).max_real_part;
}

}  // namespace

TEST(Jacobian, NormalPhaseDecoupledSpectrum) {
    const DimerParams p = symmetric_dimer(cavity(0.0), 0.0);
    const StabilityReport r = stability_eigs(jacobian(p, np_solution(p)));
    ASSERT_EQ(r.eigenvalues.size(), 8u);
    int photon = 0, spin = 0;
    for (const auto& e : r.eigenvalues) {
        EXPECT_NEAR(std::abs(e.imag()), 1.0, 1e-12);
        if (std::abs(e.real() + 0.2) < 1e-12) ++photon;
        if (std::abs(e.real()) < 1e-12) ++spin;
    }
    EXPECT_EQ(photon, 4);
    EXPECT_EQ(spin, 4);
    EXPECT_EQ(r.verdict, StabilityVerdict::Marginal);
}

TEST(Jacobian, MatchesFiniteDifferences) {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 50; ++i) {
        const DimerParams p = dimer::testing::random_params(rng, true);
        const DimerState s = dimer::testing::random_state(rng, 0.05);
        const Matrix8 a = jacobian(p, s);
        const Matrix8 f = fd_jacobian(p, s);
        for (int r = 0; r < 8; ++r)
            for (int c = 0; c < 8; ++c)
                EXPECT_LE(std::abs(a(r, c) - f(r, c)), 1e-6 * std::max(1.0, std::abs(f(r, c))))
                    << "entry " << r << "," << c;
    }
}

TEST(Jacobian, NearEquatorThrows) {
    const DimerParams p = symmetric_dimer(cavity(0.8), 0.2);
    DimerState s;
    s.cavity1 = {0.1, 0.0, 0.5, 0.0, 0.0};
    EXPECT_THROW(jacobian(p, s), NearSingularElimination);
    EXPECT_NO_THROW(tangent_jacobian(p, s));
}

TEST(Jacobian, TangentFrameSpectrumMatchesAtSteadyStates) {
    for (double j : {0.05, 0.2, 0.4}) {
        const DimerParams p = symmetric_dimer(cavity(0.8), j);
        for (SrpBranch b : {kAsrpPlus, kSsrpPlus}) {
            const auto s = try_symmetric_srp_solution(p, b);
            if (!s) continue;
            const ComplexVector a = stability_eigs(jacobian(p, *s)).eigenvalues;
            const ComplexVector t = stability_eigs(tangent_jacobian(p, *s)).eigenvalues;
            EXPECT_LT(spectrum_distance(a, t), 1e-8) << "J=" << j;
        }
    }
}

TEST(StabilityEigs, DiagonalAndOrdering) {
    Eigen::MatrixXd m = Eigen::Vector3d(-1.0, 0.5, -3.0).asDiagonal();
    StabilityReport r = stability_eigs(m);
    EXPECT_DOUBLE_EQ(r.max_real_part, 0.5);
    EXPECT_EQ(r.verdict, StabilityVerdict::Unstable);
    EXPECT_DOUBLE_EQ(r.eigenvalues.front().real(), 0.5);
    EXPECT_DOUBLE_EQ(r.eigenvalues.back().real(), -3.0);

    m = Eigen::Vector2d(-1.0, -2.0).asDiagonal();
    r = stability_eigs(m);
    EXPECT_TRUE(r.stable);
    EXPECT_EQ(r.verdict, StabilityVerdict::Stable);

    m = Eigen::Vector2d(-1.0, 1e-12).asDiagonal();
    EXPECT_EQ(stability_eigs(m).verdict, StabilityVerdict::Marginal);
}

TEST(StabilityEigs, NonFiniteMatrixIsNumericalError) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
    m(1, 2) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(stability_eigs(m), NumericalError);
}

TEST(Stability, NormalPhaseLosesStabilityAboveThreshold) {
    EXPECT_TRUE(analyze_stability(symmetric_dimer(cavity(0.3), 0.0),
                                  np_solution(symmetric_dimer(cavity(0.3), 0.0)))
                    .stable);
    const DimerParams p = symmetric_dimer(cavity(0.55), 0.0);
    EXPECT_EQ(analyze_stability(p, np_solution(p)).verdict, StabilityVerdict::Unstable);
}

TEST(Stability, SymmetricBranchAroundItsBoundary) {
    const DimerParams lo = symmetric_dimer(cavity(0.8), 0.1);
    const DimerParams hi = symmetric_dimer(cavity(0.8), 0.3);
    EXPECT_TRUE(analyze_stability(lo, symmetric_srp_solution(lo, kSsrpPlus)).stable);
    EXPECT_EQ(analyze_stability(hi, symmetric_srp_solution(hi, kSsrpPlus)).verdict,
              StabilityVerdict::Unstable);
}

TEST(Stability, AntisymmetricBranchStableAcrossGrid) {
    for (int i = 0; i < 10; ++i) {
        for (int k = 0; k < 10; ++k) {
            const double lambda = 0.6 + 0.06 * i;
            const double j = 0.5 * k / 10.0;
            const DimerParams p = symmetric_dimer(cavity(lambda), j);
            const auto s = try_symmetric_srp_solution(p, kAsrpPlus);
            if (!s) continue;
            EXPECT_TRUE(analyze_stability(p, *s).stable) << lambda << " " << j;
        }
    }
}

TEST(Stability, NormalRegionMatchesBothBoundaries) {
    // NP is stable iff lambda < lambda_c and J below the NP-ASRP line.
    const double lc = dimer::testing::lambda_c(1.0, 1.0, 0.2);
    int mismatches = 0;
    for (int i = 0; i < 50; ++i) {
        for (int k = 0; k < 50; ++k) {
            const double lambda = 0.02 + 0.6 * i / 49.0;
            const double j = 0.5 * k / 49.0;
            const double line = 0.52 - 2 * lambda * lambda;
            if (std::abs(j - line) < 2e-3 || std::abs(lambda - lc) < 2e-3) continue;
            const bool expected = lambda < lc && j < line;
            const DimerParams p = symmetric_dimer(cavity(lambda), j);
            if (analyze_stability(p, np_solution(p)).stable != expected) ++mismatches;
        }
    }
    EXPECT_EQ(mismatches, 0);
}

TEST(Stability, NoSpuriousZeroEigenvalue) {
    const DimerParams p = symmetric_dimer(cavity(0.8), 0.2);
    const StabilityReport r = analyze_stability(p, symmetric_srp_solution(p, kAsrpPlus));
    for (const auto& e : r.eigenvalues) EXPECT_GT(std::abs(e), 1e-6);
}

TEST(BlockDecompose, SpectraUnionEqualsFull) {
    for (double j : {0.05, 0.15, 0.3, 0.45}) {
        const DimerParams p = symmetric_dimer(cavity(0.9), j);
        for (SrpBranch b : {kAsrpPlus, kSsrpPlus, SrpBranch{Symmetry::Antisymmetric, Sign::Minus}}) {
            const auto s = try_symmetric_srp_solution(p, b);
            if (!s) continue;
            const BlockMatrices m = block_decompose(p, *s);
            ComplexVector blocks = stability_eigs(m.symmetric).eigenvalues;
            const ComplexVector anti = stability_eigs(m.antisymmetric).eigenvalues;
            blocks.insert(blocks.end(), anti.begin(), anti.end());
            EXPECT_LT(spectrum_distance(blocks, stability_eigs(jacobian(p, *s)).eigenvalues), 1e-8);
        }
    }
}

TEST(BlockDecompose, RejectsUnpatternedStates) {
    DimerParams p = symmetric_dimer(cavity(0.8), 0.2);
    DimerState s = symmetric_srp_solution(p, kAsrpPlus);
    s.cavity2.re_gamma *= 0.9;
    EXPECT_FALSE(has_parity_pattern(s));
    EXPECT_THROW(block_decompose(p, s), UnsupportedConfiguration);
    p.cavity2.lambda = 0.7;
    EXPECT_THROW(block_decompose(p, symmetric_srp_solution(symmetric_dimer(cavity(0.8), 0.2), kAsrpPlus)),
                 UnsupportedConfiguration);
}

TEST(BlockDecompose, NormalPhaseReportHasBlocks) {
    const DimerParams p = symmetric_dimer(cavity(0.3), 0.1);
    const StabilityReport r = analyze_stability(p, np_solution(p));
    ASSERT_TRUE(r.block_eigs.has_value());
    EXPECT_EQ(r.block_eigs->symmetric.size(), 4u);
    EXPECT_EQ(r.block_eigs->antisymmetric.size(), 4u);
}

TEST(Boundaries, NpAsrpLine) {
    EXPECT_NEAR(np_asrp_boundary(0.3, 0.2), 0.34, 1e-15);
    EXPECT_NEAR(np_asrp_boundary(0.1, 0.0), 0.48, 1e-15);
    EXPECT_THROW(np_asrp_boundary(0.6, 0.2), DomainError);
}

TEST(Boundaries, NpAsrpLineIsWhereNormalPhaseFlips) {
    for (double lambda : {0.1, 0.2, 0.3, 0.4}) {
        const double jb = np_asrp_boundary(lambda, 0.2);
        const DimerParams below = symmetric_dimer(cavity(lambda), jb - 1e-4);
        const DimerParams above = symmetric_dimer(cavity(lambda), jb + 1e-4);
        EXPECT_TRUE(analyze_stability(below, np_solution(below)).stable);
        EXPECT_FALSE(analyze_stability(above, np_solution(above)).stable);
    }
}

TEST(Boundaries, SsrpRootMatchesOracle) {
    const double root = ssrp_boundary(0.8, 0.2);
    EXPECT_NEAR(root, dimer::testing::ssrp_root_oracle(0.8, 0.2, 0.0, 0.4), 1e-10);
    EXPECT_NEAR(root, 0.245843, 1e-6);
    const DimerParams below = symmetric_dimer(cavity(0.8), root - 1e-4);
    const DimerParams above = symmetric_dimer(cavity(0.8), root + 1e-4);
    EXPECT_LT(max_real(below, symmetric_srp_solution(below, kSsrpPlus)), 0.0);
    EXPECT_GT(max_real(above, symmetric_srp_solution(above, kSsrpPlus)), 0.0);
}

TEST(Boundaries, SsrpRootsAreRootsOfTheCondition) {
    for (double lambda : {0.7, 0.8, 0.9, 1.0, 1.2}) {
        for (double kappa : {0.0, 0.2, 0.5}) {
            for (double j : ssrp_boundary_roots(lambda, kappa)) {
                const double a = 1 + kappa * kappa;
                const double g = j - a / 2 + std::pow(a + 2 * j, 3) / (32 * std::pow(lambda, 4));
                EXPECT_NEAR(g, 0.0, 1e-10);
            }
        }
    }
}

TEST(Boundaries, SsrpNonexistentIsNoBoundary) {
    EXPECT_THROW(ssrp_boundary(0.3, 0.2), NoBoundary);
}
