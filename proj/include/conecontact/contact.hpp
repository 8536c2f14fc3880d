// Contact-form verification, the twisted symplectization and its inverse,
// Reeb fields, and the two compatible almost-complex-structure recipes.
#pragma once

#include <functional>

#include "conecontact/band_form.hpp"
#include "conecontact/cone_structure.hpp"
#include "conecontact/multilinear.hpp"
#include "conecontact/torus.hpp"

namespace conecontact {

// Degree-1 candidate on an odd-dimensional torus without a circle factor.
class ContactCandidate {
 public:
  explicit ContactCandidate(BandForm alpha);

  const BandForm& alpha() const { return alpha_; }
  int dim() const { return alpha_.dim(); }
  int n() const { return (dim() - 1) / 2; }

 private:
  BandForm alpha_;
};

// Pointwise Euclidean structure; defaults to the identity.
class MetricField {
 public:
  MetricField() = default;
  explicit MetricField(std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> field);
  static MetricField identity();
  static MetricField constant(const Eigen::MatrixXd& g);

  // Validates symmetry and positive definiteness at the point.
  Eigen::MatrixXd at(const Eigen::VectorXd& point) const;

 private:
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> field_;
};

struct ContactReport {
  double min_density = 0;   // min |alpha ^ dalpha^n (e_1 ... e_m)| over the grid
  double integral = 0;      // integral of the volume form
  Eigen::VectorXd worst_point;
};

ContactReport verify_contact(const ContactCandidate& alpha, const GridSpec& grid);
// Density of alpha ^ (dalpha)^n against the coordinate top polyvector.
BandForm contact_volume_form(const ContactCandidate& alpha);

// S(alpha) = dt ^ pi*alpha + d(pi*alpha) on S^1 x M, always D_dt-closed.
BandForm twisted_symplectization(const ContactCandidate& alpha);

struct ExtractedContact {
  BandForm alpha0;    // degree-1 form on the base torus
  double residual;    // sup-norm of beta_0 - d alpha_0 over coefficients
};

// Splits an S^1-invariant beta = pi*beta0 + dt ^ pi*alpha0; a residual within
// tolerance certifies beta = D(pi*alpha0), callers decide the cut.
ExtractedContact extract_contact(const BandForm& beta);

// Reeb vector at a point: least squares for d alpha(R, .) = 0, alpha(R) = 1.
Eigen::VectorXd reeb_at(const ContactCandidate& alpha, const Eigen::VectorXd& point,
                        double residual_tol = 1e-9);

// Compatible J for a nondegenerate pairing: A = Omega^{-1} G, Q = sqrt(-A^2),
// J = A Q^{-1}; tames omega and preserves it.
Eigen::MatrixXd compatible_acs_polar(const TwoFormMatrix& omega, const Eigen::MatrixXd& g,
                                     double pfaffian_tol = 1e-10);

// Compatible invariant J on T(S^1 x M) at (any t, point): polar J on the
// contact hyperplane, J(dt) = R, J(R) = -dt.
Eigen::MatrixXd compatible_acs_reeb(const ContactCandidate& alpha, const MetricField& g,
                                    const Eigen::VectorXd& point);

// J field on the extended torus built from compatible_acs_reeb; suitable for
// cone_from_acs.
AcsField reeb_acs_field(const ContactCandidate& alpha, const MetricField& g);

// Max over the grid of || L^{-1} J(a(p)) L - sign * J(p) || for the action a
// with linear part L; sign -1 checks skew-invariance.
double skew_acs_check(const AcsField& j_field, const TorusAction& action,
                      const GridSpec& grid);

}  // namespace conecontact
