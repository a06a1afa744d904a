#include "cagst/superop.hpp"

#include "cagst/kernels.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace cagst;

namespace {
const Eigen::Vector3d kX(1, 0, 0);
const Eigen::Vector3d kZ(0, 0, 1);
}  // namespace

TEST_CASE("ptm_of_unitary standard rotations") {
  CHECK((ptm_of_unitary(kX, 0.0).m - Mat4::Identity()).norm() == doctest::Approx(0.0));

  Mat4 x90;
  x90 << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0;
  CHECK((ptm_of_unitary(kX, M_PI / 2).m - x90).norm() < 1e-14);

  Mat4 zpi = Mat4::Identity();
  zpi(1, 1) = zpi(2, 2) = -1.0;
  CHECK((ptm_of_unitary(kZ, M_PI).m - zpi).norm() < 1e-14);

  CHECK_THROWS_AS(ptm_of_unitary(Eigen::Vector3d(1, 1, 0), 0.3), std::invalid_argument);
}

TEST_CASE("ptm_of_unitary rotation block is orthogonal") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    SuperOp u = test::random_unitary_ptm(rng);
    Eigen::Matrix3d r = u.m.block<3, 3>(1, 1);
    CHECK((r.transpose() * r - Eigen::Matrix3d::Identity()).norm() < 1e-12);
    CHECK(u.trace_preserving());
  }
}

TEST_CASE("evaluate_circuit basics") {
  GateSet gs = perfect_gateset_xyi();
  CHECK(evaluate_circuit(gs, {}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(evaluate_circuit(gs, {"Rx", "Rx"}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(evaluate_circuit(gs, {"nope"}), std::out_of_range);
}

TEST_CASE("evaluate_circuit matches the dense product-chain oracle") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    GateSet gs = test::random_physical_gateset(rng);
    auto seq = test::random_sequence(rng, gs, 12);
    double a = evaluate_circuit(gs, seq);
    double b = ref::eval_product_chain(gs, seq);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    CHECK(a >= -1e-9);
    CHECK(a <= 1.0 + 1e-9);
  }
}

TEST_CASE("composition homomorphism") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    GateSet gs = test::random_physical_gateset(rng);
    auto a = test::random_sequence(rng, gs, 4);
    auto b = test::random_sequence(rng, gs, 4);
    std::vector<std::string> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());

    Mat4 prod = Mat4::Identity();
    for (const auto& l : ab) prod = (gs.gate(l).m * prod).eval();
    GateSet one = gs;
    one.gates["combined"] = SuperOp(prod);
    CHECK(evaluate_circuit(gs, ab) ==
          doctest::Approx(evaluate_circuit(one, {"combined"})).epsilon(1e-12));
  }
}

TEST_CASE("error_generator zero and diagonal cases") {
  SuperOp rx = perfect_gate_for_base("Rx");
  CHECK(error_generator(rx, rx).norm() < 1e-12);

  double p = 0.07;
  Mat4 dep = Mat4::Identity();
  dep(1, 1) = dep(2, 2) = dep(3, 3) = 1.0 - p;
  Mat4 l = error_generator(SuperOp(dep), SuperOp(Mat4::Identity())).L;
  Mat4 want = Mat4::Zero();
  want(1, 1) = want(2, 2) = want(3, 3) = std::log(1.0 - p);
  CHECK((l - want).norm() < 1e-12);
}

TEST_CASE("error_generator round trip") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    Mat4 l0 = Mat4::Zero();
    for (int i = 1; i < 4; ++i)
      for (int j = 0; j < 4; ++j) l0(i, j) = 0.025 * u(rng);
    const double norm = l0.norm();
    REQUIRE(norm <= 0.2);
    SuperOp gp = test::random_unitary_ptm(rng);
    SuperOp noisy = apply_error(gp, ErrorGenerator(l0), 1.0);
    Mat4 back = error_generator(noisy, gp).L;
    CHECK((back - l0).norm() < 1e-8);
  }
}

TEST_CASE("error_generator rejects a principal-branch obstruction") {
  Mat4 bad = Mat4::Identity();
  bad(1, 1) = -0.5;  // eigenvalue on the negative real axis
  CHECK_THROWS_AS(error_generator(SuperOp(bad), SuperOp(Mat4::Identity())),
                  std::domain_error);
}

TEST_CASE("apply_error endpoints") {
  std::mt19937_64 rng(53);
  SuperOp gp = test::random_unitary_ptm(rng);
  Mat4 l = Mat4::Random() * 0.02;
  l.row(0).setZero();
  CHECK((apply_error(gp, ErrorGenerator(l), 0.0).m - gp.m).norm() == 0.0);

  double p = 0.1;
  Mat4 logdep = Mat4::Zero();
  logdep(1, 1) = logdep(2, 2) = logdep(3, 3) = std::log(1.0 - p);
  Mat4 half = apply_error(SuperOp(Mat4::Identity()), ErrorGenerator(logdep), 0.5).m;
  CHECK(half(1, 1) == doctest::Approx(std::sqrt(1.0 - p)).epsilon(1e-12));
  CHECK(half(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("ptm_to_choi reference channels") {
  // identity -> 2 |Phi+><Phi+|
  CMat4 j = ptm_to_choi(SuperOp(Mat4::Identity()));
  CMat4 want = CMat4::Zero();
  want(0, 0) = want(0, 3) = want(3, 0) = want(3, 3) = 1.0;
  CHECK((j - want).norm() < 1e-12);

  Mat4 depol = Mat4::Zero();
  depol(0, 0) = 1.0;
  CMat4 jd = ptm_to_choi(SuperOp(depol));
  CHECK((jd - CMat4::Identity() / 2.0).norm() < 1e-12);

  std::mt19937_64 rng(59);
  SuperOp u = test::random_unitary_ptm(rng);
  Eigen::SelfAdjointEigenSolver<CMat4> es(ptm_to_choi(u));
  CHECK(es.eigenvalues()(3) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(std::abs(es.eigenvalues()(2)) < 1e-10);
}

TEST_CASE("choi positivity of unitary mixtures") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> w(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    double a = w(rng), b = w(rng), c = w(rng);
    double s = a + b + c;
    Mat4 mix = (a * test::random_unitary_ptm(rng).m + b * test::random_unitary_ptm(rng).m +
                c * test::random_unitary_ptm(rng).m) /
               s;
    Eigen::SelfAdjointEigenSolver<CMat4> es(ptm_to_choi(SuperOp(mix)));
    CHECK(es.eigenvalues()(0) >= -1e-10);
    CHECK(ptm_to_choi(SuperOp(mix)).trace().real() == doctest::Approx(2.0));
  }
}

TEST_CASE("state and measurement conventions") {
  CHECK(ground_state().v(0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(ground_state().v.cwiseAbs().maxCoeff() <= std::sqrt(2.0));
  CHECK(ground_meas().v.cwiseAbs().maxCoeff() <= std::sqrt(2.0));
  GateSet gs = perfect_gateset_xyi();
  double p = evaluate_circuit(gs, {});
  CHECK(p >= -1e-12);
  CHECK(p <= 1.0 + 1e-12);
}
