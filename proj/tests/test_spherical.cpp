#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qmclab/qmclab.hpp"

using namespace qmclab;

TEST(Gegenbauer, LowDegrees) {
  EXPECT_DOUBLE_EQ(gegenbauer_c(0.5, 1, 0.3), 0.3);
  EXPECT_DOUBLE_EQ(gegenbauer_c(0.5, 2, 1.0), 1.0);
  for (double a : {0.25, 0.5, 1.0, 3.0}) EXPECT_EQ(gegenbauer_c(a, 0, 0.7), 1.0);
}

TEST(Gegenbauer, MatchesLegendreAndSecondKindChebyshev) {
  for (double t = -1.0; t <= 1.0; t += 0.05) {
    for (int d = 0; d <= 10; ++d) {
      EXPECT_NEAR(gegenbauer_c(0.5, d, t), std::legendre(d, t), 1e-12);
      // C^{(1)}_d is U_d
      const double th = std::acos(std::clamp(t, -1.0, 1.0));
      if (std::abs(std::sin(th)) > 1e-6)
        EXPECT_NEAR(gegenbauer_c(1.0, d, t), std::sin((d + 1) * th) / std::sin(th), 1e-10);
    }
  }
}

TEST(Gegenbauer, ValueAtOneIsPochhammer) {
  for (double a : {0.5, 1.0, 1.5}) {
    double poch = 1.0;
    double fact = 1.0;
    for (int d = 0; d <= 12; ++d) {
      if (d > 0) {
        poch *= 2.0 * a + d - 1;
        fact *= d;
      }
      EXPECT_NEAR(gegenbauer_at_one(a, d), poch / fact, 1e-10 * poch / fact);
      EXPECT_NEAR(gegenbauer_c(a, d, 1.0), poch / fact, 1e-10 * poch / fact);
    }
  }
}

TEST(Gegenbauer, BoundedByValueAtOne) {
  for (double a : {0.5, 1.0, 2.5}) {
    for (int d = 1; d <= 15; ++d) {
      const double top = gegenbauer_at_one(a, d);
      for (double t = -0.999; t < 1.0; t += 1e-3) EXPECT_LT(std::abs(gegenbauer_c(a, d, t)), top);
    }
  }
}

TEST(Chebyshev, CosineForm) {
  for (int d = 0; d <= 8; ++d)
    for (double t = -1.0; t <= 1.0; t += 0.1) EXPECT_NEAR(chebyshev_t(d, t), std::cos(d * std::acos(t)), 1e-12);
}

TEST(Nu, Examples) {
  EXPECT_NEAR(nu_d(0.5, 1, 0.0), -0.5, 1e-15);
  for (double a : {0.5, 1.0, 2.0}) {
    for (double t0 : {0.2, -0.7}) EXPECT_NEAR(nu_d(a, 1, t0), -std::pow(1.0 - t0 * t0, a + 0.5) / (1.0 + 2.0 * a), 1e-14);
    for (int d = 1; d <= 6; ++d) {
      EXPECT_EQ(nu_d(a, d, 1.0), 0.0);
      EXPECT_EQ(nu_d(a, d, -1.0), 0.0);
    }
  }
  EXPECT_EQ(nu_d(0.5, 2, 0.0), 0.0);
}

TEST(Nu, ClosedFormMatchesQuadrature) {
  for (int n : {2, 3, 4, 6}) {
    const auto z = Zonal::for_dimension(n);
    for (int d = 1; d <= 8; ++d) {
      for (double t : {-0.9, -0.5, 0.0, 0.3, 0.8, 0.99}) {
        EXPECT_NEAR(z.nu(d, t), nu_d_quadrature(z, d, t), 1e-8) << "n=" << n << " d=" << d << " t=" << t;
      }
    }
  }
}

TEST(Kernel, DensityHasUnitZeroEigenvalue) {
  for (int n : {2, 3, 4, 7}) {
    EXPECT_NEAR(kernel_eigenvalue(KernelSpec{ConditionedGaussian{-0.5, 1.0, 1.0}, n}, 0), 1.0, 1e-10);
    EXPECT_NEAR(kernel_eigenvalue(KernelSpec{IndicatorBelow{0.3}, n}, 0), 1.0, 1e-10);
  }
}

TEST(Kernel, IndicatorMatchesNu) {
  for (int n : {2, 3, 4, 5}) {
    const auto z = Zonal::for_dimension(n);
    for (double t0 : {-0.6, 0.0, 0.45}) {
      const KernelSpec spec{IndicatorBelow{t0}, n};
      const double mass = kernel_mass(spec);
      for (int d = 1; d <= 6; ++d) EXPECT_NEAR(kernel_eigenvalue(spec, d) * mass, z.nu(d, t0), 1e-8);
    }
  }
}

TEST(Kernel, MassOfUniformKernelIsBetaIntegral) {
  // integral of (1-t^2)^{(n-3)/2} = B(1/2, (n-1)/2)
  for (int n : {3, 4, 5, 8}) {
    const double beta = std::exp(std::lgamma(0.5) + std::lgamma((n - 1) / 2.0) - std::lgamma(n / 2.0));
    EXPECT_NEAR(kernel_mass(KernelSpec{ConditionedGaussian{0.0, 0.0, 0.0}, n}), beta, 1e-10);
  }
}

TEST(Kernel, NegativeConditionedGaussianExample) {
  const KernelSpec spec{ConditionedGaussian{-0.5, 1.0, 1.0}, 3};
  const double l1 = kernel_eigenvalue(spec, 1);
  EXPECT_LE(l1, 0.0);
  for (int d = 2; d <= 8; ++d) EXPECT_LT(std::abs(kernel_eigenvalue(spec, d)), -l1) << d;
}

TEST(Kernel, ConditionedGaussianSigns) {
  for (int n : {3, 4}) {
    for (double rho : {-0.9, -0.3, 0.3, 0.9}) {
      for (double rs : {0.5, 2.0}) {
        const KernelSpec spec{ConditionedGaussian{rho, rs, 1.0}, n};
        const double l1 = kernel_eigenvalue(spec, 1);
        EXPECT_EQ(l1 > 0.0, rho > 0.0);
        for (int d = 2; d <= 8; ++d) EXPECT_LT(std::abs(kernel_eigenvalue(spec, d)), std::abs(l1));
      }
    }
  }
}

TEST(Kernel, TabulatedMatchesClosedForm) {
  TabulatedKernel tab;
  for (int i = 0; i <= 2000; ++i) {
    const double t = -1.0 + i * 1e-3;
    tab.t.push_back(t);
    tab.g.push_back(std::exp(-0.5 * t / 0.75));
  }
  const KernelSpec tabulated{tab, 3};
  const KernelSpec exact{ConditionedGaussian{-0.5, 1.0, 1.0}, 3};
  for (int d = 0; d <= 4; ++d)
    EXPECT_NEAR(kernel_eigenvalue(tabulated, d, QuadratureOptions{64, 1e-9, 14}), kernel_eigenvalue(exact, d), 1e-6);
}

TEST(Kernel, Validation) {
  EXPECT_THROW(kernel_eigenvalue(KernelSpec{ConditionedGaussian{-1.0, 1.0, 1.0}, 3}, 1), Error);
  EXPECT_THROW(kernel_eigenvalue(KernelSpec{IndicatorBelow{0.0}, 1}, 1), Error);
  EXPECT_THROW(kernel_eigenvalue(KernelSpec{TabulatedKernel{{0.0, -1.0}, {1.0, 1.0}}, 3}, 1), Error);
  EXPECT_THROW(kernel_eigenvalue(KernelSpec{TabulatedKernel{{-1.0, 1.0}, {1.0, -1.0}}, 3}, 1), Error);
  EXPECT_THROW(kernel_eigenvalue(KernelSpec{IndicatorBelow{0.0}, 3}, 1, QuadratureOptions{32, 1e-9, 12}), Error);
}

TEST(Kernel, NonConvergentQuadratureReported) {
  try {
    kernel_eigenvalue(KernelSpec{IndicatorBelow{0.1}, 3}, 40, QuadratureOptions{64, 1e-18, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::QuadratureNonConvergent);
  }
}

TEST(FunkHecke, SpotChecks) {
  const KernelSpec conditioned{ConditionedGaussian{-0.5, 1.0, 1.0}, 3};
  const KernelSpec indicator{IndicatorBelow{0.2}, 3};
  const KernelSpec indicator4{IndicatorBelow{-0.1}, 4};
  const auto d0 = funk_hecke_spot_check(conditioned, 0, 200000, 1);
  EXPECT_NEAR(d0.expected, 1.0, 1e-10);
  EXPECT_TRUE(d0.passed);
  EXPECT_TRUE(funk_hecke_spot_check(conditioned, 1, 200000, 2).passed);
  EXPECT_TRUE(funk_hecke_spot_check(indicator, 2, 200000, 3).passed);
  EXPECT_TRUE(funk_hecke_spot_check(indicator4, 3, 200000, 4).passed);
}

TEST(KeyLemma, ThreeAndFourDimensions) {
  for (double alpha : {0.5, 1.0}) {
    const auto rep = check_key_lemma(alpha, 10, 1e-3);
    EXPECT_TRUE(rep.passed);
    EXPECT_GT(rep.worst_margin, 0.0);
    EXPECT_LE(rep.max_nu1, 0.0);
    EXPECT_EQ(rep.points, 1999L * 9);
    EXPECT_TRUE(rep.violations.empty());
  }
}

TEST(KeyLemma, PlaneAndHigherDimensions) {
  EXPECT_TRUE(check_key_lemma(Zonal::for_dimension(2), 10, 1e-3).passed);
  for (int n : {5, 8, 12}) EXPECT_TRUE(check_key_lemma(Zonal::for_dimension(n), 12, 1e-3).passed) << n;
}

TEST(KeyLemma, BothSidesVanishAtEnds) {
  for (int d = 1; d <= 5; ++d) {
    EXPECT_NEAR(nu_d(0.5, d, 1.0 - 1e-9), 0.0, 1e-9);
    EXPECT_NEAR(nu_d(0.5, d, -1.0 + 1e-9), 0.0, 1e-9);
  }
}

TEST(KeyLemma, Preconditions) {
  EXPECT_THROW(check_key_lemma(0.5, 1, 1e-3), Error);
  EXPECT_THROW(check_key_lemma(0.5, 5, 0.0), Error);
  EXPECT_THROW(check_key_lemma(-0.1, 5, 1e-3), Error);
}

TEST(Borell, ThreeDimensionsAtBovPoint) {
  const auto cands = standard_candidates(3, 11);
  const auto rep = borell_nk_check(3, -0.584, cands, 200000, 5);
  EXPECT_TRUE(rep.passed);
  EXPECT_TRUE(rep.opt_matches_f_star);
  EXPECT_NEAR(rep.opt_stab, -0.514, 4.0 * rep.opt_stderr + 5e-4);
  ASSERT_EQ(rep.candidates.size(), cands.size());
  for (const auto& c : rep.candidates) {
    EXPECT_TRUE(c.passed) << c.name;
    if (c.name == "opt" || c.name == "rotated_opt" || c.name == "negated_opt") {
      EXPECT_NEAR(c.diff_vs_opt, 0.0, 1e-12) << c.name;
    }
    if (c.name == "constant_unit") EXPECT_NEAR(c.stab, 1.0, 1e-15);
    if (c.name == "constant_half") EXPECT_NEAR(c.stab, 0.25, 1e-15);
  }
}

TEST(Borell, Reproducible) {
  const auto cands = standard_candidates(4, 3);
  const auto a = borell_nk_check(4, -0.3, cands, 20000, 8);
  const auto b = borell_nk_check(4, -0.3, cands, 20000, 8);
  EXPECT_EQ(a.opt_stab, b.opt_stab);
  for (std::size_t i = 0; i < a.candidates.size(); ++i) EXPECT_EQ(a.candidates[i].stab, b.candidates[i].stab);
}

TEST(Borell, HalfspaceMapIsStrictlyWorse) {
  // sign(x_1) e_1 has stability 2 arcsin(rho) / pi, above F*(2, rho) for rho < 0
  const auto cands = standard_candidates(2, 1);
  const auto rep = borell_nk_check(2, -0.8, cands, 50000, 2);
  for (const auto& c : rep.candidates) {
    if (c.name == "first_coordinate_sign") {
      EXPECT_GT(c.diff_vs_opt, 4.0 * c.diff_stderr);
      EXPECT_NEAR(c.stab, f_star(1, -0.8), 4.0 * c.stderr_mean);
    }
  }
}

TEST(Borell, Preconditions) {
  const auto cands = standard_candidates(3, 1);
  EXPECT_THROW(borell_nk_check(3, 0.2, cands, 10000, 1), Error);
  EXPECT_THROW(borell_nk_check(3, -0.5, cands, 10, 1), Error);
}
