// Finite-dimensional separation: given Dirac generators and the D_theta
// complex on a band, produce either a positive D_theta-closed form in the
// requested invariant sector or a nonnegative combination of the generators
// annihilating the closed subspace (a D_theta^*-exact structure current).
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "conecontact/band_form.hpp"
#include "conecontact/cone_structure.hpp"
#include "conecontact/torus.hpp"

namespace conecontact {

struct SeparationProblem {
  TorusModel model;
  ConstantOneForm theta;
  int band = 0;
  std::vector<DiracGenerator> generators;
  std::vector<TorusAction> symmetries;
  bool invariant_sector = false;

  SeparationProblem(TorusModel model_, ConstantOneForm theta_, int band_,
                    std::vector<DiracGenerator> generators_,
                    std::vector<TorusAction> symmetries_ = {},
                    bool invariant_sector_ = false);
};

enum class CertificateVariant { PositiveForm, ExactCurrent, NotSalient };

struct Certificate {
  CertificateVariant variant = CertificateVariant::NotSalient;
  // PositiveForm payload
  std::optional<BandForm> omega;
  double margin = 0;
  // ExactCurrent payload
  std::vector<double> weights;
  double closure_residual = 0;
  // NotSalient payload: generators whose pairing row vanishes on the sector
  std::vector<size_t> invisible_generators;
};

struct VerifyReport {
  bool passed = false;
  double d_closed_residual = 0;   // sup-norm of D_theta omega
  double min_pairing = 0;         // worst generator pairing
  double symmetry_residual = 0;   // worst || rho* omega - sign omega ||
  double sector_residual = 0;     // distance to the circle average
  double closure_residual = 0;    // exact-current residual vs a fresh basis
  double weight_error = 0;        // |sum - 1| and worst negative weight
  std::string worst;              // label of the dominating offender
};

enum class BasisMode { Primary, Alternate };

// Basis of the null space of D_theta on degree-k band forms, intersected with
// the sign-twisted fixed space of each symmetry and, when flagged, with the
// circle-invariant (t-frequency zero) sector. Basis forms are normalized to
// unit sup coefficient norm. The two modes pick different per-frequency
// pivots and orderings, giving independent bases of the same space.
std::vector<BandForm> closed_subspace_basis(const TorusModel& model,
                                            const ConstantOneForm& theta, int degree,
                                            int band, bool invariant_sector,
                                            const std::vector<TorusAction>& symmetries,
                                            BasisMode mode = BasisMode::Primary);

struct LpResult {
  bool feasible = false;
  Eigen::VectorXd y;       // rows * y >= 1 when feasible
  Eigen::VectorXd lambda;  // lambda >= 0, sum 1, lambda^T rows = 0 otherwise
};

// Farkas alternative for "rows * y >= 1": phase-1 simplex on the dual
// nonnegative system, deterministic Bland pivoting. Exactly one outcome.
LpResult lp_feasibility(const Eigen::MatrixXd& rows, long max_pivots = -1);

// Max-margin direction: maximizes min_j (rows * y)_j over ||y||_1 <= 1.
// Returns the rescaled direction with margin about 1 and the optimal value.
std::optional<std::pair<Eigen::VectorXd, double>> max_margin_direction(
    const Eigen::MatrixXd& rows, long max_pivots = -1);

// The separation engine. Exactly one certificate variant is returned; both
// decisive variants are re-verified before returning. Solver iteration limits
// surface as SimplexIterationLimit, verification failures as
// CertificateVerificationError; neither is converted into a certificate.
Certificate separate(const SeparationProblem& problem);

VerifyReport verify_certificate(const Certificate& cert, const SeparationProblem& problem);

struct CertificateVerificationError : std::runtime_error {
  VerifyReport report;
  CertificateVerificationError(const std::string& what, VerifyReport r)
      : std::runtime_error(what), report(std::move(r)) {}
};

// Generator evaluation matrix M[j][b] = pair_dirac(basis_b, point_j, P_j).
Eigen::MatrixXd evaluation_matrix(const std::vector<DiracGenerator>& generators,
                                  const std::vector<BandForm>& basis);

}  // namespace conecontact
