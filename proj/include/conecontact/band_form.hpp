// Band-limited real differential forms on flat tori with exact exterior and
// Lichnerowicz differentials, wedge products, point pairing, affine pullback,
// circle averaging and integration.
//
// A degree-k form is stored as a sparse map from (frequency, multi-index) to a
// complex coefficient. Only one representative of each {f, -f} pair is kept;
// the conjugate mode is synthesized on demand, so forms are real by
// construction.
#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <map>

#include "conecontact/multilinear.hpp"
#include "conecontact/torus.hpp"

namespace conecontact {

using Complex = std::complex<double>;

struct ModeKey {
  Freq freq{};
  IndexMask mask = 0;
  auto operator<=>(const ModeKey&) const = default;
};

// Translation-invariant closed 1-form theta = sum c_i dx^i.
class ConstantOneForm {
 public:
  explicit ConstantOneForm(Eigen::VectorXd components);
  static ConstantOneForm zero(int dim);
  static ConstantOneForm dt(const TorusModel& model);  // dx^{t_axis}

  int dim() const { return static_cast<int>(comps_.size()); }
  double component(int i) const { return comps_[i]; }
  const Eigen::VectorXd& components() const { return comps_; }
  bool is_zero() const { return comps_.isZero(0.0); }

 private:
  Eigen::VectorXd comps_;
};

class BandForm {
 public:
  BandForm(TorusModel model, int degree);

  const TorusModel& model() const { return model_; }
  int degree() const { return degree_; }
  int dim() const { return model_.dim; }

  // Sets the coefficient of e^{i<f,x>} dx^I (overwrites, both of f and -f).
  void set_coeff(const Freq& f, IndexMask mask, Complex value);
  void add_coeff(const Freq& f, IndexMask mask, Complex value);
  Complex coeff(const Freq& f, IndexMask mask) const;

  // Canonical stored modes (half frequency space).
  const std::map<ModeKey, Complex>& canonical_modes() const { return coeffs_; }
  // Visits every mode of the full expansion, conjugates included.
  void for_each_mode(const std::function<void(const Freq&, IndexMask, Complex)>& fn) const;

  size_t mode_count() const { return coeffs_.size(); }
  bool empty() const { return coeffs_.empty(); }
  double sup_coeff_norm() const;
  int support_band() const;  // max sup-norm of stored frequencies
  bool is_t_independent() const;
  void prune(double tol = 0.0);

  BandForm operator+(const BandForm& o) const;
  BandForm operator-(const BandForm& o) const;
  BandForm operator*(double s) const;

  // Pointwise component tensor: mask -> real coefficient of dx^I at x.
  std::map<IndexMask, double> components_at(const Eigen::VectorXd& point) const;

  // Convenience constructors.
  static BandForm constant(const TorusModel& model, double value);  // 0-form
  static BandForm from_constant_one_form(const TorusModel& model, const ConstantOneForm& theta);
  // dx^I as a form
  static BandForm basis(const TorusModel& model, IndexMask mask);

 private:
  TorusModel model_;
  int degree_;
  std::map<ModeKey, Complex> coeffs_;
};

// --- operations -------------------------------------------------------------

// Exact wedge; the result band is band(a) + band(b).
BandForm wedge(const BandForm& a, const BandForm& b);
// Wedge with a declared band cap; throws if any produced frequency exceeds it.
BandForm wedge_within_band(const BandForm& a, const BandForm& b, int max_band);

BandForm exterior_d(const BandForm& a);

// D_theta a = d a + theta ^ a.
BandForm lichnerowicz_d(const ConstantOneForm& theta, const BandForm& a);

// Evaluates the form at the point and contracts with a grade-k multivector.
double pair_dirac(const BandForm& a, const Eigen::VectorXd& point, const KVector& p);
double pair_dirac(const BandForm& a, const Eigen::VectorXd& point, const Bivector& p);

// Pullback along an affine torus map (frequencies map by the transpose of the
// linear part; the band is recomputed from the result's support).
BandForm pullback_affine(const BandForm& a, const TorusAction& map);

// Zeroes every mode with nonzero frequency along the circle axis.
BandForm circle_average(const BandForm& a);

// Integral of a top-degree form over the torus.
double integrate_top(const BandForm& a);

// Antisymmetric matrix of a degree-2 form at a point.
TwoFormMatrix two_form_matrix_at(const BandForm& a, const Eigen::VectorXd& point);
// Components of a degree-1 form at a point.
Eigen::VectorXd covector_at(const BandForm& a, const Eigen::VectorXd& point);

// Pullback of the base torus along S^1 x M -> M (index shift by one).
BandForm circle_pullback(const BandForm& base_form);
// Max abs coefficient difference; forms must live on the same space.
double coeff_distance(const BandForm& a, const BandForm& b);

// --- serialization ----------------------------------------------------------
// Text format, one canonical mode per line: "f1,...,fm | i1<...<ik | re,im".
void write_form(std::ostream& out, const BandForm& form);
BandForm read_form(std::istream& in);
void write_form_file(const std::string& path, const BandForm& form);
BandForm read_form_file(const std::string& path);

}  // namespace conecontact
