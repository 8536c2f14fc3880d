// Angle sweep for the Schubert intersection test. For a fixed unit vector v
// in the plane tau, membership of some v ^ w in the generator cone is a
// linear feasibility problem; the sweep semi-decides ampleness against tau.
#include <cmath>

#include "conecontact/multilinear.hpp"
#include "conecontact/simplex.hpp"
#include "conecontact/torus.hpp"

namespace conecontact {

namespace {

// matrix of w -> v ^ w in packed bivector coordinates
Eigen::MatrixXd wedge_map(const Eigen::VectorXd& v) {
  const int dim = static_cast<int>(v.size());
  const int rows = Bivector::packed_size(dim);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      int r = Bivector::packed_index(dim, i, j);
      a(r, j) += v[i];
      a(r, i) -= v[j];
    }
  return a;
}

}  // namespace

std::optional<SchubertWitness> schubert_intersects(
    const std::vector<Bivector>& generators,
    const Eigen::VectorXd& tau1, const Eigen::VectorXd& tau2,
    int resolution) {
  if (generators.empty()) throw std::invalid_argument("schubert_intersects: no generators");
  const int dim = generators[0].dim();
  for (const auto& g : generators)
    if (g.dim() != dim) throw std::invalid_argument("schubert_intersects: mixed dimensions");
  if (tau1.size() != dim || tau2.size() != dim)
    throw std::invalid_argument("schubert_intersects: tau dimension mismatch");
  if (wedge_vectors(tau1, tau2).norm() < 1e-10)
    throw std::invalid_argument("schubert_intersects: degenerate tau");
  if (resolution < 1) throw std::invalid_argument("schubert_intersects: resolution must be >= 1");

  const int nrows = Bivector::packed_size(dim);
  const int ng = static_cast<int>(generators.size());
  Eigen::MatrixXd gmat(nrows, ng);
  for (int c = 0; c < ng; ++c)
    for (int k = 0; k < nrows; ++k) gmat(k, c) = generators[static_cast<size_t>(c)].packed()[static_cast<size_t>(k)];

  const double pi = kTwoPi / 2.0;
  for (int step = 0; step < resolution; ++step) {
    double phi = pi * static_cast<double>(step) / static_cast<double>(resolution);
    Eigen::VectorXd v = std::cos(phi) * tau1 + std::sin(phi) * tau2;
    Eigen::MatrixXd av = wedge_map(v);

    // columns: w+ (dim), w- (dim), lambda (ng); rows: wedge match + sum lambda
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nrows + 1, 2 * dim + ng);
    a.block(0, 0, nrows, dim) = av;
    a.block(0, dim, nrows, dim) = -av;
    a.block(0, 2 * dim, nrows, ng) = -gmat;
    a.row(nrows).segment(2 * dim, ng).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(nrows + 1);
    b[nrows] = 1.0;

    long max_pivots = 10L * (a.rows() + a.cols()) + 100;
    FeasibilityResult fr = phase1_feasible(a, b, max_pivots);
    if (!fr.feasible) continue;

    Eigen::VectorXd w = fr.x.head(dim) - fr.x.segment(dim, dim);
    Eigen::VectorXd lambda = fr.x.tail(ng);
    double lsum = lambda.sum();
    if (lsum <= 0) continue;
    lambda /= lsum;
    Eigen::VectorXd combo = gmat * lambda;
    if (combo.lpNorm<Eigen::Infinity>() <= 1e-9) continue;  // trivial: 0 is not a witness
    if ((av * w - combo).lpNorm<Eigen::Infinity>() > 1e-8) continue;

    SchubertWitness witness;
    witness.angle = phi;
    witness.w = w;
    witness.weights.assign(lambda.data(), lambda.data() + lambda.size());
    return witness;
  }
  return std::nullopt;
}

}  // namespace conecontact
