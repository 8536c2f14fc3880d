#include "conecontact/contact.hpp"

#include <cmath>
#include <sstream>

namespace conecontact {

ContactCandidate::ContactCandidate(BandForm alpha) : alpha_(std::move(alpha)) {
  if (alpha_.degree() != 1)
    throw std::invalid_argument("ContactCandidate: degree-1 form required");
  if (alpha_.model().t_axis)
    throw std::invalid_argument("ContactCandidate: base torus must not have a circle factor");
  if (alpha_.dim() % 2 == 0)
    throw std::invalid_argument("ContactCandidate: odd-dimensional torus required");
}

MetricField::MetricField(std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> field)
    : field_(std::move(field)) {}

MetricField MetricField::identity() { return MetricField(); }

MetricField MetricField::constant(const Eigen::MatrixXd& g) {
  return MetricField([g](const Eigen::VectorXd&) { return g; });
}

Eigen::MatrixXd MetricField::at(const Eigen::VectorXd& point) const {
  Eigen::MatrixXd g = field_ ? field_(point)
                             : Eigen::MatrixXd::Identity(point.size(), point.size());
  if (g.rows() != g.cols() || g.rows() != point.size())
    throw std::invalid_argument("MetricField: wrong shape");
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("MetricField: matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  if (es.eigenvalues().minCoeff() < 1e-8)
    throw std::invalid_argument("MetricField: matrix not positive definite");
  return g;
}

BandForm contact_volume_form(const ContactCandidate& alpha) {
  const int n = alpha.n();
  BandForm vol = alpha.alpha();
  if (n > 0) {
    BandForm da = exterior_d(alpha.alpha());
    for (int i = 0; i < n; ++i) vol = wedge(vol, da);
  }
  return vol;
}

ContactReport verify_contact(const ContactCandidate& alpha, const GridSpec& grid) {
  if (grid.dim() != alpha.dim())
    throw std::invalid_argument("verify_contact: grid dimension mismatch");
  BandForm vol = contact_volume_form(alpha);
  KVector top = KVector::top(alpha.dim());
  ContactReport report;
  report.integral = integrate_top(vol);
  bool first = true;
  for (size_t i = 0; i < grid.size(); ++i) {
    Eigen::VectorXd p = grid.point(i);
    double density = std::abs(pair_dirac(vol, p, top));
    if (first || density < report.min_density) {
      report.min_density = density;
      report.worst_point = p;
      first = false;
    }
  }
  return report;
}

BandForm twisted_symplectization(const ContactCandidate& alpha) {
  BandForm pulled = circle_pullback(alpha.alpha());
  ConstantOneForm dt = ConstantOneForm::dt(pulled.model());
  return lichnerowicz_d(dt, pulled);
}

ExtractedContact extract_contact(const BandForm& beta) {
  if (beta.degree() != 2)
    throw std::invalid_argument("extract_contact: degree-2 form required");
  const TorusModel& ext = beta.model();
  if (!ext.t_axis || *ext.t_axis != 0)
    throw std::invalid_argument("extract_contact: model must carry the circle at axis 0");
  if (!beta.is_t_independent())
    throw std::invalid_argument("extract_contact: form is not circle-invariant");

  TorusModel base = ext.base_model();
  BandForm alpha0(base, 1);
  // on a 1-dimensional base there are no 2-forms, so beta0 is forced to zero
  std::optional<BandForm> beta0;
  if (base.dim >= 2) beta0.emplace(base, 2);
  for (const auto& [key, value] : beta.canonical_modes()) {
    Freq f{};
    for (int i = 1; i < ext.dim; ++i) f[static_cast<size_t>(i - 1)] = key.freq[static_cast<size_t>(i)];
    if (key.mask & 1u) {
      // dt ^ dx^I component: alpha0 coefficient on I shifted down
      alpha0.add_coeff(f, static_cast<IndexMask>(key.mask >> 1), value);
    } else {
      beta0->add_coeff(f, static_cast<IndexMask>(key.mask >> 1), value);
    }
  }
  ExtractedContact out{std::move(alpha0), 0.0};
  if (beta0) out.residual = coeff_distance(*beta0, exterior_d(out.alpha0));
  return out;
}

Eigen::VectorXd reeb_at(const ContactCandidate& alpha, const Eigen::VectorXd& point,
                        double residual_tol) {
  const int m = alpha.dim();
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(m, m);  // d of a top form on T^1
  if (m > 1) omega = two_form_matrix_at(exterior_d(alpha.alpha()), point).matrix();
  Eigen::VectorXd a = covector_at(alpha.alpha(), point);
  Eigen::MatrixXd sys(m + 1, m);
  sys.topRows(m) = omega;
  sys.row(m) = a.transpose();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
  rhs[m] = 1.0;
  Eigen::VectorXd r = sys.colPivHouseholderQr().solve(rhs);
  double residual = (sys * r - rhs).lpNorm<Eigen::Infinity>();
  if (residual > residual_tol) {
    std::ostringstream msg;
    msg << "reeb_at: defining system residual " << residual
        << " exceeds tolerance (alpha degenerate at the point?)";
    throw std::runtime_error(msg.str());
  }
  return r;
}

Eigen::MatrixXd compatible_acs_polar(const TwoFormMatrix& omega, const Eigen::MatrixXd& g,
                                     double pfaffian_tol) {
  const int m = omega.dim();
  if (g.rows() != m || g.cols() != m)
    throw std::invalid_argument("compatible_acs_polar: metric shape mismatch");
  if (m % 2 != 0)
    throw std::invalid_argument("compatible_acs_polar: even dimension required");
  if (std::abs(pfaffian(omega)) < pfaffian_tol)
    throw std::runtime_error("compatible_acs_polar: omega is singular");
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("compatible_acs_polar: metric not positive definite");
  Eigen::MatrixXd lmat = llt.matrixL();

  // In g-orthonormal coordinates A becomes S = (L^{-1} Omega L^{-T})^{-1},
  // real skew, and A Q^{-1} = S (-S^2)^{-1/2} is the orthogonal polar factor
  // of S. Taking it from the SVD of the congruent Omega' keeps full accuracy
  // even when omega is barely nondegenerate: polar(S) = -polar(Omega').
  Eigen::MatrixXd half = lmat.triangularView<Eigen::Lower>().solve(omega.matrix());
  Eigen::MatrixXd y = lmat.triangularView<Eigen::Lower>().solve(half.transpose());
  // y = L^{-1} Omega^T L^{-T} = -Omega'
  Eigen::MatrixXd omega_prime = 0.5 * (y.transpose() - y);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(omega_prime,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues().minCoeff() < 1e-12)
    throw std::runtime_error("compatible_acs_polar: omega is singular");
  Eigen::MatrixXd jprime = -(svd.matrixU() * svd.matrixV().transpose());
  // transform back: J = L^{-T} J' L^T
  Eigen::MatrixXd jlt = jprime * lmat.transpose();
  return lmat.transpose().triangularView<Eigen::Upper>().solve(jlt);
}

namespace {

// J at a base point: polar J0 on ker(alpha), extended by J(dt) = R and
// J(R) = -dt on the (t, base) coordinates of S^1 x M.
Eigen::MatrixXd reeb_acs_at(const ContactCandidate& alpha, const MetricField& g,
                            const Eigen::VectorXd& base_point) {
  const int m = alpha.dim();
  Eigen::VectorXd a = covector_at(alpha.alpha(), base_point);
  Eigen::VectorXd reeb = reeb_at(alpha, base_point);

  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m + 1, m + 1);
  // column 0: image of dt is R
  j.block(1, 0, m, 1) = reeb;

  Eigen::MatrixXd j_xi = Eigen::MatrixXd::Zero(m, m);
  if (m > 1) {
    // orthonormal basis of ker(alpha_p)
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a.transpose());
    Eigen::MatrixXd kernel = lu.kernel();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(kernel);
    Eigen::MatrixXd basis =
        qr.householderQ() * Eigen::MatrixXd::Identity(m, kernel.cols());

    BandForm da = exterior_d(alpha.alpha());
    Eigen::MatrixXd omega = two_form_matrix_at(da, base_point).matrix();
    Eigen::MatrixXd omega_xi = basis.transpose() * omega * basis;
    omega_xi = 0.5 * (omega_xi - omega_xi.transpose().eval());
    Eigen::MatrixXd g_xi = basis.transpose() * g.at(base_point) * basis;
    Eigen::MatrixXd j0 = compatible_acs_polar(TwoFormMatrix(omega_xi), g_xi);
    j_xi = basis * j0 * basis.transpose();
  }
  // split w = alpha(w) R + xi_part: J(w) = alpha(w) J(R) + J0(xi_part), J(R) = -dt
  for (int c = 0; c < m; ++c) {
    Eigen::VectorXd w = Eigen::VectorXd::Unit(m, c);
    double aw = a[c];
    Eigen::VectorXd xi_part = w - aw * reeb;
    j(0, c + 1) = -aw;
    j.block(1, c + 1, m, 1) += j_xi * xi_part;
  }
  return j;
}

}  // namespace

Eigen::MatrixXd compatible_acs_reeb(const ContactCandidate& alpha, const MetricField& g,
                                    const Eigen::VectorXd& point) {
  // accepts either a base point or an extended (t, base) point; t is ignored
  if (point.size() == alpha.dim()) return reeb_acs_at(alpha, g, point);
  if (point.size() == alpha.dim() + 1) return reeb_acs_at(alpha, g, point.tail(alpha.dim()));
  throw std::invalid_argument("compatible_acs_reeb: point dimension mismatch");
}

AcsField reeb_acs_field(const ContactCandidate& alpha, const MetricField& g) {
  return [alpha, g](const Eigen::VectorXd& p) { return compatible_acs_reeb(alpha, g, p); };
}

double skew_acs_check(const AcsField& j_field, const TorusAction& action,
                      const GridSpec& grid) {
  Eigen::MatrixXd l = action.linear.cast<double>();
  Eigen::MatrixXd linv = l.fullPivLu().inverse();
  double worst = 0;
  for (size_t i = 0; i < grid.size(); ++i) {
    Eigen::VectorXd p = grid.point(i);
    Eigen::VectorXd q = action.apply(p);
    grid.locate(q);  // throws when the grid is not action-invariant
    Eigen::MatrixXd lhs = linv * j_field(q) * l;
    Eigen::MatrixXd rhs = static_cast<double>(action.sign) * j_field(p);
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace conecontact
