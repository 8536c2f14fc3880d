#include <doctest.h>

#include "conecontact/contact.hpp"
#include "conecontact/multilinear.hpp"
#include "oracles.hpp"

using namespace conecontact;

namespace {

Eigen::VectorXd unit(int dim, int i) { return Eigen::VectorXd::Unit(dim, i); }

Eigen::MatrixXd standard_j4() {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(4, 4);
  j(1, 0) = 1;
  j(0, 1) = -1;
  j(3, 2) = 1;
  j(2, 3) = -1;
  return j;  // J e1 = e2, J e3 = e4
}

}  // namespace

TEST_CASE("wedge_vectors: basis pairs, self-wedge, bilinearity") {
  Bivector b = wedge_vectors(unit(4, 0), unit(4, 1));
  CHECK(b.at(0, 1) == 1.0);
  CHECK(b.norm() == 1.0);

  Eigen::VectorXd u(4);
  u << 0.3, -1.2, 0.5, 2.0;
  CHECK(wedge_vectors(u, u).is_zero());

  Bivector c = wedge_vectors(unit(4, 0) + unit(4, 1), unit(4, 2));
  CHECK(c.at(0, 2) == 1.0);
  CHECK(c.at(1, 2) == 1.0);
  CHECK(c.at(0, 1) == 0.0);
}

TEST_CASE("pfaffian: standard block, zero, and the twisted symplectization") {
  Eigen::MatrixXd j0 = Eigen::MatrixXd::Zero(4, 4);
  j0(0, 1) = 1;
  j0(1, 0) = -1;
  j0(2, 3) = 1;
  j0(3, 2) = -1;
  CHECK(pfaffian(TwoFormMatrix(j0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(pfaffian(TwoFormMatrix(Eigen::MatrixXd::Zero(4, 4))) == 0.0);
  CHECK_THROWS_AS(pfaffian(TwoFormMatrix(Eigen::MatrixXd::Zero(3, 3))), std::invalid_argument);

  // S(alpha_std) at any point: Pf = -1 by the explicit 4x4 formula
  ContactCandidate alpha(oracle::alpha_std());
  BandForm s = twisted_symplectization(alpha);
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd p = rng.point_on_torus(4);
    TwoFormMatrix omega = two_form_matrix_at(s, p);
    double z = p[3];
    CHECK(omega(0, 1) == doctest::Approx(std::cos(z)).epsilon(1e-12));
    CHECK(omega(0, 2) == doctest::Approx(std::sin(z)).epsilon(1e-12));
    CHECK(omega(1, 3) == doctest::Approx(std::sin(z)).epsilon(1e-12));
    CHECK(omega(2, 3) == doctest::Approx(-std::cos(z)).epsilon(1e-12));
    double pf4 = omega(0, 1) * omega(2, 3) - omega(0, 2) * omega(1, 3) +
                 omega(0, 3) * omega(1, 2);
    CHECK(pfaffian(omega) == doctest::Approx(pf4).epsilon(1e-12));
    CHECK(pfaffian(omega) == doctest::Approx(-1.0).epsilon(1e-10));
  }
}

TEST_CASE("pfaffian: Pf^2 = det and congruence covariance") {
  Rng rng(5);
  for (int dim : {4, 6}) {
    for (int trial = 0; trial < 25; ++trial) {
      Eigen::MatrixXd raw(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) raw(i, j) = rng.uniform(-1, 1);
      Eigen::MatrixXd anti = raw - raw.transpose();
      TwoFormMatrix omega(anti);
      double pf = pfaffian(omega);
      CHECK(pf * pf == doctest::Approx(anti.determinant()).epsilon(1e-9));
      CHECK(pf == doctest::Approx(oracle::pfaffian_via_det(omega)).epsilon(1e-9));

      Eigen::MatrixXd g(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = rng.uniform(-1, 1);
      Eigen::MatrixXd cong = g.transpose() * anti * g;
      cong = 0.5 * (cong - cong.transpose().eval());
      CHECK(pfaffian(TwoFormMatrix(cong)) ==
            doctest::Approx(g.determinant() * pf).epsilon(1e-9));
    }
  }
}

TEST_CASE("schubert_intersects: a plane meets its own Schubert variety") {
  std::vector<Bivector> gens{wedge_vectors(unit(4, 0), unit(4, 1))};
  auto witness = schubert_intersects(gens, unit(4, 0), unit(4, 1), 360);
  REQUIRE(witness.has_value());
  CHECK(witness->angle == 0.0);
  CHECK(witness->weights.size() == 1);
  CHECK(witness->weights[0] == doctest::Approx(1.0));
  // verify the witness exactly: v ^ w must equal the combination
  Eigen::VectorXd v = unit(4, 0);
  Bivector vw = wedge_vectors(v, witness->w);
  CHECK((vw - gens[0] * witness->weights[0]).is_zero(1e-9));
}

TEST_CASE("schubert_intersects: disjoint plane yields none at any resolution") {
  std::vector<Bivector> gens{wedge_vectors(unit(4, 0), unit(4, 1))};
  for (int res : {36, 180, 360})
    CHECK_FALSE(schubert_intersects(gens, unit(4, 2), unit(4, 3), res).has_value());
}

TEST_CASE("schubert_intersects: C^J generated with tau probes is ample") {
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    // alternate between the standard J and random conjugates of it
    Eigen::MatrixXd j = standard_j4();
    if (trial % 2 == 1) {
      Eigen::MatrixXd t(4, 4);
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) t(r, c) = rng.uniform(-1, 1);
      t += 3.0 * Eigen::MatrixXd::Identity(4, 4);
      j = t * j * t.inverse();
    }
    Eigen::VectorXd t1 = rng.unit_vector(4);
    Eigen::VectorXd t2 = rng.unit_vector(4);
    if (wedge_vectors(t1, t2).norm() < 1e-3) continue;
    std::vector<Bivector> gens;
    for (int i = 0; i < 4; ++i) gens.push_back(wedge_vectors(unit(4, i), j * unit(4, i)));
    gens.push_back(wedge_vectors(t1, j * t1));
    gens.push_back(wedge_vectors(t2, j * t2));
    auto witness = schubert_intersects(gens, t1, t2, 360);
    REQUIRE(witness.has_value());
    // verified witness: nonnegative weights, combination matches v ^ w
    Eigen::VectorXd v = std::cos(witness->angle) * t1 + std::sin(witness->angle) * t2;
    Bivector combo(4);
    for (size_t i = 0; i < gens.size(); ++i) {
      CHECK(witness->weights[i] >= -1e-12);
      combo = combo + gens[i] * witness->weights[i];
    }
    CHECK((wedge_vectors(v, witness->w) - combo).is_zero(1e-8));
    CHECK(combo.norm() > 1e-9);
  }
}

TEST_CASE("schubert_intersects: monotone in the generator set") {
  Eigen::MatrixXd j = standard_j4();
  Rng rng(15);
  Eigen::VectorXd t1 = rng.unit_vector(4);
  Eigen::VectorXd t2 = rng.unit_vector(4);
  std::vector<Bivector> gens{wedge_vectors(t1, j * t1)};
  auto base = schubert_intersects(gens, t1, t2, 90);
  REQUIRE(base.has_value());
  for (int extra = 0; extra < 5; ++extra) {
    Eigen::VectorXd v = rng.unit_vector(4);
    gens.push_back(wedge_vectors(v, j * v));
    CHECK(schubert_intersects(gens, t1, t2, 90).has_value());
  }
}

TEST_CASE("schubert_intersects rejects degenerate tau") {
  std::vector<Bivector> gens{wedge_vectors(unit(4, 0), unit(4, 1))};
  CHECK_THROWS_AS(schubert_intersects(gens, unit(4, 0), unit(4, 0) * 2.0, 10),
                  std::invalid_argument);
}
