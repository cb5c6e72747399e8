#include "oracles.hpp"
#include "tvls.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tvls;

namespace {

const Matrix kA{{0.0, 1.0}, {-2.0, -3.0}};
const Matrix kA1{{0.0, 1.0}, {1.0, 1.0}};
const Matrix kA2c{{0.0, 1.0}, {-6.0, -5.0}};

MatrixFunction scalar(const ScalarFunction& f) {
  MatrixFunction m(1, 1);
  m(0, 0) = f;
  return m;
}

StateSpaceModel constant_model(const Matrix& a, const Matrix& b, const Matrix& c) {
  return {MatrixFunction::constant(a), MatrixFunction::constant(b), MatrixFunction::constant(c)};
}

StateSpaceModel diagonal2() { return constant_model(Matrix{{-2.0, 0.0}, {0.0, -3.0}}, Matrix{{1.0}, {1.0}}, Matrix{{1.0}, {1.0}}); }
StateSpaceModel companion2() { return constant_model(kA2c, Matrix{{5.0}, {2.0}}, Matrix{{0.0}, {1.0}}); }

// Random stable, instantaneously controllable constant system of dimension p.
StateSpaceModel random_system(std::mt19937_64& gen, int p) {
  std::normal_distribution<double> normal;
  for (;;) {
    Matrix a(p, p), b(p, 1), c(p, 1);
    for (int i = 0; i < p; ++i) {
      b(i, 0) = normal(gen);
      c(i, 0) = normal(gen);
      for (int j = 0; j < p; ++j) a(i, j) = 0.6 * normal(gen);
    }
    a -= (1.0 + a.eigenvalues().real().maxCoeff()) * Matrix::Identity(p, p);
    auto m = constant_model(a, b, c);
    double sv = 0.0;
    if (numerical_rank(controllability_matrix(m, 0.0), &sv) == p && sv > 1e-3) return m;
  }
}

Matrix random_well_conditioned(std::mt19937_64& gen, int p) {
  std::normal_distribution<double> normal;
  for (;;) {
    Matrix s(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) s(i, j) = normal(gen);
    const Eigen::JacobiSVD<Matrix> svd(s);
    if (svd.singularValues()(0) / svd.singularValues()(p - 1) < 20.0) return s;
  }
}

}  // namespace

TEST(LambdaMax, ScalarCertificate) {
  // a(t) = 0.75 + 0.25 sin(t) >= 0.5
  const auto a = scalar(ScalarFunction::sinusoidal(-0.75, -0.25, 1.0, -std::numbers::pi / 2));
  const auto r = lambda_max_check(a, -std::numbers::pi, std::numbers::pi);
  ASSERT_TRUE(r.passes);
  EXPECT_EQ(r.certificate->gamma, 1.0);
  EXPECT_NEAR(r.certificate->lambda, 0.5, 1e-12);
  EXPECT_EQ(r.certificate->route, CertificateRoute::lambda_max);
}

TEST(LambdaMax, DiagonalSystem) {
  const auto r = lambda_max_check(MatrixFunction::constant(Matrix{{-2.0, 0.0}, {0.0, -3.0}}), 0.0, 1.0);
  ASSERT_TRUE(r.passes);
  EXPECT_NEAR(r.sup_lambda_max, -4.0, 1e-12);
  EXPECT_NEAR(r.certificate->lambda, 2.0, 1e-12);
}

TEST(LambdaMax, CompanionFailsAndPointsToEigenRoute) {
  const auto r = lambda_max_check(MatrixFunction::constant(kA), 0.0, 1.0);
  EXPECT_FALSE(r.passes);
  // Symmetric part [[0, -1], [-1, -6]]: largest eigenvalue -3 + sqrt(10).
  EXPECT_NEAR(r.sup_lambda_max, -3.0 + std::sqrt(10.0), 1e-12);
  EXPECT_NE(r.message.find("eigen_bound"), std::string::npos);
}

TEST(LambdaMax, IntegralCriterionOnOscillatingCoefficient) {
  // a(t) = 1 + 1.5 sin(3t) dips below zero but has mean 1.
  const auto a = scalar(ScalarFunction::sinusoidal(-1.0, -1.5, 3.0, 0.0));
  const auto r = lambda_max_check(a, -2.0, 2.0);
  ASSERT_TRUE(r.passes);
  EXPECT_GT(r.certificate->gamma, 1.0);
  EXPECT_LE(certificate_spot_check(a, *r.certificate), 1.05);
}

TEST(EigenBound, Examples) {
  const auto r = eigen_bound_check(MatrixFunction::constant(kA), 0.0, 1.0);
  ASSERT_TRUE(r.passes);
  EXPECT_NEAR(r.mu, 1.0, 1e-12);
  EXPECT_NEAR(r.certificate->lambda, 0.5, 1e-12);
  EXPECT_TRUE(r.certificate->empirical_gamma);

  const auto r2 = eigen_bound_check(MatrixFunction::constant(kA2c), 0.0, 1.0);
  ASSERT_TRUE(r2.passes);
  EXPECT_NEAR(r2.mu, 2.0, 1e-12);

  const auto bad = eigen_bound_check(MatrixFunction::constant(Matrix{{0.1, 1.0}, {0.0, -1.0}}), 0.0, 1.0);
  EXPECT_FALSE(bad.passes);
  EXPECT_NEAR(bad.mu, -0.1, 1e-12);
  EXPECT_FALSE(bad.message.empty());
}

TEST(EigenBound, RejectsStepFamily) {
  EXPECT_THROW(eigen_bound_check(scalar(ScalarFunction::step(0.0, -1.0, -2.0)), -1.0, 1.0), PreconditionError);
}

TEST(CommutativeRoute, Examples) {
  const auto d = MatrixFunction::diagonal(
      {ScalarFunction::sinusoidal(-1.0, -0.5, 1.0, 0.0), ScalarFunction::constant(-2.0)});
  const auto r = commutative_route_check(d, -3.0, 3.0);
  EXPECT_TRUE(r.commutative);
  EXPECT_TRUE(r.d1_diagonalizable);
  EXPECT_GE(r.mu, 0.5 - 1e-12);
  ASSERT_TRUE(r.certificate.has_value());
  EXPECT_LE(certificate_spot_check(d, *r.certificate), 1.05);

  MatrixFunction comp = MatrixFunction::constant(kA);
  comp(1, 0) = ScalarFunction::sinusoidal(-2.0, -0.5, 1.0, 0.0);
  EXPECT_FALSE(commutative_route_check(comp, 0.0, 2.0).commutative);

  const auto jordan = commutative_route_check(MatrixFunction::constant(Matrix{{-1.0, 1.0}, {0.0, -1.0}}), 0.0, 1.0);
  EXPECT_TRUE(jordan.commutative);
  EXPECT_FALSE(jordan.d1_diagonalizable);
  EXPECT_TRUE(jordan.d2_cesaro_bounded);
  EXPECT_FALSE(jordan.certificate.has_value());
}

TEST(Certify, TriesRoutesInOrder) {
  EXPECT_EQ(certify(MatrixFunction::constant(Matrix{{-2.0, 0.0}, {0.0, -3.0}}), 0.0, 1.0).route, "lambda_max");
  EXPECT_EQ(certify(MatrixFunction::constant(kA), 0.0, 1.0).route, "eigen_bound");
  EXPECT_FALSE(certify(MatrixFunction::constant(kA1), 0.0, 1.0).passes);
}

TEST(Certify, CertificatesSurviveSpotCheck) {
  MatrixFunction slow = MatrixFunction::constant(kA);
  slow(1, 0) = ScalarFunction::sinusoidal(-2.0, -0.5, 1.0, 0.0);
  const std::vector<MatrixFunction> families{
      MatrixFunction::constant(kA), MatrixFunction::constant(kA2c), slow,
      scalar(ScalarFunction::logistic(-1.0, -1.0, 2.0, 0.0))};
  for (const auto& a : families) {
    const auto r = certify(a, -3.0, 3.0);
    ASSERT_TRUE(r.passes) << r.message;
    EXPECT_LE(certificate_spot_check(a, *r.certificate), 1.05) << r.route;
  }
}

TEST(Controllability, Examples) {
  const auto m1 = constant_model(kA1, Matrix{{1.0}, {0.0}}, Matrix{{0.0}, {1.0}});
  const Matrix w = controllability_matrix(m1, 0.0);
  EXPECT_LT((w - Matrix{{0.0, -1.0}, {1.0, -1.0}}).norm(), 1e-14);
  EXPECT_EQ(numerical_rank(w), 2);
  Matrix kalman(2, 2);
  kalman << Vector{{0.0, 1.0}}, kA1 * Vector{{0.0, 1.0}};
  EXPECT_EQ(numerical_rank(kalman), 2);

  const auto m0 = constant_model(kA1, Matrix{{1.0}, {0.0}}, Matrix::Zero(2, 1));
  EXPECT_EQ(controllability_matrix(m0, 0.0), Matrix(Matrix::Zero(2, 2)));
  EXPECT_EQ(numerical_rank(controllability_matrix(m0, 0.0)), 0);

  MatrixFunction c(1, 1);
  c(0, 0) = ScalarFunction::sinusoidal(2.0, 0.5, 1.0, 0.0);
  const StateSpaceModel s(scalar(ScalarFunction::constant(-1.0)), MatrixFunction::constant(Matrix::Ones(1, 1)), c);
  EXPECT_NEAR(controllability_matrix(s, 0.4)(0, 0), 2.0 + 0.5 * std::sin(0.4), 1e-15);
}

TEST(Controllability, TimeVaryingColumnsUseDerivatives) {
  // K_1 = -A C + C' for A = [[0,1],[-2,-3]], C(t) = (sin t, 1)'.
  MatrixFunction c(2, 1);
  c(0, 0) = ScalarFunction::sinusoidal(0.0, 1.0, 1.0, 0.0);
  c(1, 0) = ScalarFunction::constant(1.0);
  const StateSpaceModel m(MatrixFunction::constant(kA), MatrixFunction::constant(Matrix{{1.0}, {0.0}}), c);
  const double t = 0.7;
  const Vector ct{{std::sin(t), 1.0}};
  const Vector k1 = -kA * ct + Vector{{std::cos(t), 0.0}};
  const Matrix w = controllability_matrix(m, t);
  EXPECT_LT((w.col(0) - ct).norm(), 1e-14);
  EXPECT_LT((w.col(1) - k1).norm(), 1e-12);
}

TEST(Controllability, ReportOverGrid) {
  const auto m1 = constant_model(kA1, Matrix{{1.0}, {0.0}}, Matrix{{0.0}, {1.0}});
  const auto r = instantaneous_controllability(m1, {-1.0, 0.0, 2.0});
  EXPECT_TRUE(r.instantaneous);
  EXPECT_EQ(r.ranks, (std::vector<int>{2, 2, 2}));
  const auto m0 = constant_model(kA1, Matrix{{1.0}, {0.0}}, Matrix::Zero(2, 1));
  EXPECT_FALSE(instantaneous_controllability(m0, {0.0, 1.0}).instantaneous);
}

TEST(Controllability, RankInvariantUnderConjugation) {
  std::mt19937_64 gen(23);
  const auto m1 = constant_model(kA1, Matrix{{1.0}, {0.0}}, Matrix{{0.0}, {1.0}});
  const auto m0 = constant_model(kA1, Matrix{{1.0}, {0.0}}, Matrix::Zero(2, 1));
  const auto m_def = constant_model(Matrix{{-1.0, 0.0}, {0.0, -2.0}}, Matrix{{1.0}, {0.0}}, Matrix{{1.0}, {0.0}});
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix s = random_well_conditioned(gen, 2);
    const Matrix si = s.inverse();
    for (const auto& m : {m1, m0, m_def}) {
      const Matrix a = m.A.evaluate(0.0), b = m.B.evaluate(0.0), c = m.C.evaluate(0.0);
      const auto conj = constant_model(s * a * si, si.transpose() * b, s * c);
      EXPECT_EQ(numerical_rank(controllability_matrix(conj, 0.0)), numerical_rank(controllability_matrix(m, 0.0)));
    }
  }
}

TEST(Controllability, RejectsStepFamily) {
  StateSpaceModel m = diagonal2();
  m.A(0, 0) = ScalarFunction::step(1.0, 0.0, -2.0);
  EXPECT_THROW(controllability_matrix(m, 0.0), PreconditionError);
}

TEST(CarmaTransform, CompanionIsFixedPoint) {
  const auto tr = carma_transform(companion2(), 0.0);
  EXPECT_LT((tr.T - Matrix::Identity(2, 2)).norm(), 1e-12);
  EXPECT_LT(tr.companion_residual, 1e-12);
  EXPECT_LT((tr.carma_A - kA2c).norm(), 1e-12);
}

TEST(CarmaTransform, DiagonalSystemGivesCompanion) {
  const auto tr = carma_transform(diagonal2(), 0.0);
  EXPECT_LT((tr.carma_A - kA2c).norm(), 1e-8);
  EXPECT_LT((tr.carma_B - Vector{{5.0, 2.0}}).norm(), 1e-8);
  EXPECT_LT((tr.carma_C - Vector{{0.0, 1.0}}).norm(), 1e-12);
}

TEST(CarmaTransform, ScalarNormalisesC) {
  MatrixFunction c(1, 1);
  c(0, 0) = ScalarFunction::constant(4.0);
  const StateSpaceModel m(scalar(ScalarFunction::constant(-1.5)), MatrixFunction::constant(Matrix::Constant(1, 1, 2.0)), c);
  const auto tr = carma_transform(m, 0.0);
  EXPECT_NEAR(tr.T(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(tr.carma_A(0, 0), -1.5, 1e-15);
  EXPECT_NEAR(tr.carma_B(0), 8.0, 1e-14);
}

TEST(CarmaTransform, RandomSystemsAreEquivalent) {
  std::mt19937_64 gen(31);
  for (int p : {2, 3, 4}) {
    for (int trial = 0; trial < 3; ++trial) {
      const auto m = random_system(gen, p);
      const auto tr = carma_transform(m, 0.0);
      const auto rep = transfer_equivalence(m, frozen_companion(tr), 0.0);
      EXPECT_TRUE(rep.equivalent) << "p = " << p << " err " << rep.max_rel_err;
      EXPECT_LT(rep.max_rel_err, 1e-8);
    }
  }
}

TEST(CarmaTransform, TimeVaryingSystemEquivalentAtEachT) {
  MatrixFunction a = MatrixFunction::constant(Matrix{{-1.0, 0.5}, {0.2, -2.0}});
  a(0, 1) = ScalarFunction::sinusoidal(0.5, 0.2, 1.0, 0.0);
  MatrixFunction c(2, 1);
  c(0, 0) = ScalarFunction::constant(1.0);
  c(1, 0) = ScalarFunction::affine(0.5, 0.1);
  const StateSpaceModel m(a, MatrixFunction::constant(Matrix{{1.0}, {-0.5}}), c);
  for (double t : {-1.0, 0.0, 0.8}) {
    const auto tr = carma_transform(m, t);
    EXPECT_LT((tr.T * m.C.evaluate(t) - Vector{{0.0, 1.0}}).norm(), 1e-8);
    EXPECT_NEAR(tr.carma_A(0, 0), 0.0, 1e-10);
    EXPECT_NEAR(tr.carma_A(0, 1), 1.0, 1e-12);
  }
}

TEST(Equivalence, Examples) {
  const auto r = transfer_equivalence(diagonal2(), companion2(), 0.0);
  EXPECT_TRUE(r.equivalent);
  EXPECT_LT(r.max_rel_err, 1e-10);
  EXPECT_NEAR(std::real(frozen_transfer(kA2c, Matrix{{5.0}, {2.0}}, Matrix{{0.0}, {1.0}}, 0.0)), 5.0 / 6.0, 1e-15);
  EXPECT_EQ(transfer_equivalence(diagonal2(), diagonal2(), 1.0).max_rel_err, 0.0);
  auto perturbed = companion2();
  perturbed.B = MatrixFunction::constant(Matrix{{5.0}, {2.01}});
  const auto bad = transfer_equivalence(diagonal2(), perturbed, 0.0);
  EXPECT_FALSE(bad.equivalent);
  EXPECT_GT(bad.max_rel_err, 1e-3);
}

TEST(StructuralBreak, Gap) {
  EXPECT_NEAR(structural_break_gap(1.0, Vector{{1.0, 0.0}}), 2.0 * (std::exp(-2.0) + std::exp(-3.0)), 1e-10);
  EXPECT_EQ(structural_break_gap(1.0, Vector{{0.0, 0.0}}), 0.0);
  EXPECT_NEAR(structural_break_gap(1.0, Vector{{0.0, 1.0}}), std::exp(-2.0), 1e-10);
  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> unif(1e-3, 3.0);
  for (int k = 0; k < 100; ++k) EXPECT_GT(structural_break_gap(unif(gen), Vector{{unif(gen), unif(gen)}}), 0.0);
}

TEST(StructuralBreak, ClosedFormAgainstOracle) {
  // B2c' exp(A2c tau) x - B2' exp(A2 tau) x with the 2x2 closed form.
  for (double tau : {0.3, 1.0, 2.5}) {
    const auto e = oracle::expm2_real_distinct({{{0.0, tau}, {-6.0 * tau, -5.0 * tau}}});
    for (const Vector& x : {Vector{{1.0, 0.0}}, Vector{{0.3, 0.7}}}) {
      const double lhs = 5.0 * (e[0][0] * x(0) + e[0][1] * x(1)) + 2.0 * (e[1][0] * x(0) + e[1][1] * x(1));
      const double rhs = std::exp(-2.0 * tau) * x(0) + std::exp(-3.0 * tau) * x(1);
      EXPECT_NEAR(structural_break_gap(tau, x), lhs - rhs, 1e-12);
    }
  }
}
