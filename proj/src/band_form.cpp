#include "conecontact/band_form.hpp"

#include <cmath>
#include <stdexcept>

namespace conecontact {

namespace {

void check_mask_dim(IndexMask mask, int dim) {
  if (mask >= (1u << dim))
    throw std::invalid_argument("BandForm: multi-index exceeds dimension");
}

Complex unit_phase(double angle) { return {std::cos(angle), std::sin(angle)}; }

}  // namespace

ConstantOneForm::ConstantOneForm(Eigen::VectorXd components) : comps_(std::move(components)) {
  if (comps_.size() < 1) throw std::invalid_argument("ConstantOneForm: empty components");
}

ConstantOneForm ConstantOneForm::zero(int dim) {
  return ConstantOneForm(Eigen::VectorXd::Zero(dim));
}

ConstantOneForm ConstantOneForm::dt(const TorusModel& model) {
  if (!model.t_axis) throw std::invalid_argument("ConstantOneForm::dt: model has no t_axis");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(model.dim);
  c[*model.t_axis] = 1.0;
  return ConstantOneForm(std::move(c));
}

BandForm::BandForm(TorusModel model, int degree) : model_(model), degree_(degree) {
  if (degree < 0 || degree > model.dim)
    throw std::invalid_argument("BandForm: degree out of range");
}

void BandForm::set_coeff(const Freq& f, IndexMask mask, Complex value) {
  check_mask_dim(mask, model_.dim);
  if (mask_grade(mask) != degree_)
    throw std::invalid_argument("BandForm: multi-index grade != degree");
  for (int i = model_.dim; i < kMaxDim; ++i)
    if (f[i] != 0) throw std::invalid_argument("BandForm: frequency exceeds dimension");
  if (freq_sup_norm(f) > model_.band)
    throw std::invalid_argument("BandForm: frequency exceeds the band");
  ModeKey key{f, mask};
  bool canonical = freq_is_canonical(f);
  if (!canonical) {
    key.freq = negate(f);
    value = std::conj(value);
  }
  if (key.freq == zero_freq() && value.imag() != 0.0)
    throw std::invalid_argument("BandForm: zero-frequency coefficient must be real");
  if (value == Complex{0.0, 0.0}) {
    coeffs_.erase(key);
  } else {
    coeffs_[key] = value;
  }
}

void BandForm::add_coeff(const Freq& f, IndexMask mask, Complex value) {
  check_mask_dim(mask, model_.dim);
  if (mask_grade(mask) != degree_)
    throw std::invalid_argument("BandForm: multi-index grade != degree");
  if (freq_sup_norm(f) > model_.band)
    throw std::invalid_argument("BandForm: frequency exceeds the band");
  ModeKey key{f, mask};
  if (!freq_is_canonical(f)) {
    key.freq = negate(f);
    value = std::conj(value);
  }
  auto [it, inserted] = coeffs_.try_emplace(key, value);
  if (!inserted) {
    it->second += value;
    if (it->second == Complex{0.0, 0.0}) coeffs_.erase(it);
  }
}

Complex BandForm::coeff(const Freq& f, IndexMask mask) const {
  ModeKey key{f, mask};
  bool canonical = freq_is_canonical(f);
  if (!canonical) key.freq = negate(f);
  auto it = coeffs_.find(key);
  if (it == coeffs_.end()) return {0.0, 0.0};
  return canonical ? it->second : std::conj(it->second);
}

void BandForm::for_each_mode(
    const std::function<void(const Freq&, IndexMask, Complex)>& fn) const {
  for (const auto& [key, value] : coeffs_) {
    fn(key.freq, key.mask, value);
    if (key.freq != zero_freq()) fn(negate(key.freq), key.mask, std::conj(value));
  }
}

double BandForm::sup_coeff_norm() const {
  double s = 0;
  for (const auto& [key, value] : coeffs_) s = std::max(s, std::abs(value));
  return s;
}

int BandForm::support_band() const {
  int b = 0;
  for (const auto& [key, value] : coeffs_) b = std::max(b, freq_sup_norm(key.freq));
  return b;
}

bool BandForm::is_t_independent() const {
  if (!model_.t_axis) return true;
  for (const auto& [key, value] : coeffs_)
    if (key.freq[static_cast<size_t>(*model_.t_axis)] != 0) return false;
  return true;
}

void BandForm::prune(double tol) {
  for (auto it = coeffs_.begin(); it != coeffs_.end();) {
    if (std::abs(it->second) <= tol)
      it = coeffs_.erase(it);
    else
      ++it;
  }
}

BandForm BandForm::operator+(const BandForm& o) const {
  if (!model_.same_space(o.model_) || degree_ != o.degree_)
    throw std::invalid_argument("BandForm: model/degree mismatch in +");
  BandForm r(TorusModel(model_.dim, std::max(model_.band, o.model_.band), model_.t_axis), degree_);
  r.coeffs_ = coeffs_;
  for (const auto& [key, value] : o.coeffs_) {
    auto [it, inserted] = r.coeffs_.try_emplace(key, value);
    if (!inserted) {
      it->second += value;
      if (it->second == Complex{0.0, 0.0}) r.coeffs_.erase(it);
    }
  }
  return r;
}

BandForm BandForm::operator-(const BandForm& o) const { return *this + o * -1.0; }

BandForm BandForm::operator*(double s) const {
  BandForm r(*this);
  if (s == 0.0) {
    r.coeffs_.clear();
    return r;
  }
  for (auto& [key, value] : r.coeffs_) value *= s;
  return r;
}

std::map<IndexMask, double> BandForm::components_at(const Eigen::VectorXd& point) const {
  if (point.size() != model_.dim)
    throw std::invalid_argument("BandForm: point dimension mismatch");
  std::map<IndexMask, double> out;
  for (const auto& [key, value] : coeffs_) {
    double angle = 0;
    for (int i = 0; i < model_.dim; ++i) angle += key.freq[static_cast<size_t>(i)] * point[i];
    double contrib;
    if (key.freq == zero_freq()) {
      contrib = value.real();
    } else {
      // mode plus its conjugate
      contrib = 2.0 * (value * unit_phase(angle)).real();
    }
    out[key.mask] += contrib;
  }
  return out;
}

BandForm BandForm::constant(const TorusModel& model, double value) {
  BandForm f(model, 0);
  if (value != 0.0) f.set_coeff(zero_freq(), 0, Complex{value, 0.0});
  return f;
}

BandForm BandForm::from_constant_one_form(const TorusModel& model, const ConstantOneForm& theta) {
  if (theta.dim() != model.dim)
    throw std::invalid_argument("BandForm: constant 1-form dimension mismatch");
  BandForm f(model, 1);
  for (int i = 0; i < model.dim; ++i)
    if (theta.component(i) != 0.0)
      f.set_coeff(zero_freq(), static_cast<IndexMask>(1u << i), Complex{theta.component(i), 0.0});
  return f;
}

BandForm BandForm::basis(const TorusModel& model, IndexMask mask) {
  BandForm f(model, mask_grade(mask));
  f.set_coeff(zero_freq(), mask, Complex{1.0, 0.0});
  return f;
}

BandForm wedge(const BandForm& a, const BandForm& b) {
  if (!a.model().same_space(b.model()))
    throw std::invalid_argument("wedge: model mismatch");
  if (a.degree() + b.degree() > a.dim())
    throw std::invalid_argument("wedge: degree overflow");
  TorusModel out_model(a.dim(), a.model().band + b.model().band, a.model().t_axis);
  BandForm r(out_model, a.degree() + b.degree());
  a.for_each_mode([&](const Freq& fa, IndexMask ma, Complex ca) {
    b.for_each_mode([&](const Freq& fb, IndexMask mb, Complex cb) {
      if (ma & mb) return;
      Freq f{};
      for (int i = 0; i < kMaxDim; ++i) f[static_cast<size_t>(i)] = fa[static_cast<size_t>(i)] + fb[static_cast<size_t>(i)];
      // accumulate only on canonical representatives: conjugate pairs of the
      // factors produce the mirrored contribution automatically
      if (!freq_is_canonical(f)) return;
      double sign = shuffle_sign(ma, mb);
      r.add_coeff(f, static_cast<IndexMask>(ma | mb), sign * ca * cb);
    });
  });
  // non-canonical sums were skipped: each is the conjugate of a canonical one
  // produced by the mirrored factor pair, so nothing is lost or double counted
  return r;
}

BandForm wedge_within_band(const BandForm& a, const BandForm& b, int max_band) {
  BandForm r = wedge(a, b);
  if (r.support_band() > max_band)
    throw std::runtime_error("wedge: result exceeds the declared band");
  TorusModel m(r.dim(), max_band, r.model().t_axis);
  BandForm out(m, r.degree());
  for (const auto& [key, value] : r.canonical_modes()) out.set_coeff(key.freq, key.mask, value);
  return out;
}

BandForm exterior_d(const BandForm& a) {
  if (a.degree() >= a.dim())
    throw std::invalid_argument("exterior_d: degree overflow");
  BandForm r(a.model(), a.degree() + 1);
  for (const auto& [key, value] : a.canonical_modes()) {
    for (int j = 0; j < a.dim(); ++j) {
      IndexMask bit = static_cast<IndexMask>(1u << j);
      if (key.mask & bit) continue;
      double fj = key.freq[static_cast<size_t>(j)];
      if (fj == 0.0) continue;
      Complex deriv = Complex{0.0, fj} * value;
      r.add_coeff(key.freq, static_cast<IndexMask>(key.mask | bit),
                  static_cast<double>(insertion_sign(j, key.mask)) * deriv);
    }
  }
  return r;
}

BandForm lichnerowicz_d(const ConstantOneForm& theta, const BandForm& a) {
  if (theta.dim() != a.dim())
    throw std::invalid_argument("lichnerowicz_d: model mismatch");
  BandForm r = exterior_d(a);
  for (const auto& [key, value] : a.canonical_modes()) {
    for (int j = 0; j < a.dim(); ++j) {
      IndexMask bit = static_cast<IndexMask>(1u << j);
      if (key.mask & bit) continue;
      double tj = theta.component(j);
      if (tj == 0.0) continue;
      r.add_coeff(key.freq, static_cast<IndexMask>(key.mask | bit),
                  static_cast<double>(insertion_sign(j, key.mask)) * tj * value);
    }
  }
  return r;
}

double pair_dirac(const BandForm& a, const Eigen::VectorXd& point, const KVector& p) {
  if (p.dim() != a.dim())
    throw std::invalid_argument("pair_dirac: dimension mismatch");
  if (p.grade() != a.degree())
    throw std::invalid_argument("pair_dirac: grade/degree mismatch");
  auto comps = a.components_at(point);
  double s = 0;
  for (const auto& [mask, pv] : p.components()) {
    auto it = comps.find(mask);
    if (it != comps.end()) s += it->second * pv;
  }
  return s;
}

double pair_dirac(const BandForm& a, const Eigen::VectorXd& point, const Bivector& p) {
  return pair_dirac(a, point, KVector::from_bivector(p));
}

BandForm pullback_affine(const BandForm& a, const TorusAction& map) {
  if (map.dim() != a.dim())
    throw std::invalid_argument("pullback_affine: dimension mismatch");
  const Eigen::MatrixXd L = map.linear.cast<double>();
  const int k = a.degree();

  // frequencies map by L^T and can leave the declared band; size it first
  struct MappedMode {
    Freq freq;
    IndexMask mask;
    Complex phased;
  };
  std::vector<MappedMode> mapped;
  int out_band = a.model().band;
  for (const auto& [key, value] : a.canonical_modes()) {
    double angle = 0;
    Freq g{};
    for (int i = 0; i < a.dim(); ++i) {
      angle += key.freq[static_cast<size_t>(i)] * map.translation[i];
      long long gi = 0;
      for (int j = 0; j < a.dim(); ++j)
        gi += static_cast<long long>(map.linear(j, i)) * key.freq[static_cast<size_t>(j)];
      g[static_cast<size_t>(i)] = static_cast<int>(gi);
    }
    out_band = std::max(out_band, freq_sup_norm(g));
    mapped.push_back({g, key.mask, value * unit_phase(angle)});
  }

  BandForm r(TorusModel(a.dim(), out_band, a.model().t_axis), k);
  const auto out_masks = all_masks_of_grade(a.dim(), k);
  for (const auto& mode : mapped) {
    if (k == 0) {
      r.add_coeff(mode.freq, 0, mode.phased);
      continue;
    }
    auto rows = mask_to_indices(mode.mask);
    for (IndexMask out_mask : out_masks) {
      auto cols = mask_to_indices(out_mask);
      Eigen::MatrixXd minor(k, k);
      for (int rr = 0; rr < k; ++rr)
        for (int cc = 0; cc < k; ++cc)
          minor(rr, cc) = L(rows[static_cast<size_t>(rr)], cols[static_cast<size_t>(cc)]);
      double det = minor.determinant();
      if (det != 0.0) r.add_coeff(mode.freq, out_mask, det * mode.phased);
    }
  }
  return r;
}

BandForm circle_average(const BandForm& a) {
  if (!a.model().t_axis)
    throw std::invalid_argument("circle_average: model has no t_axis");
  int t = *a.model().t_axis;
  BandForm r(a.model(), a.degree());
  for (const auto& [key, value] : a.canonical_modes())
    if (key.freq[static_cast<size_t>(t)] == 0) r.set_coeff(key.freq, key.mask, value);
  return r;
}

double integrate_top(const BandForm& a) {
  if (a.degree() != a.dim())
    throw std::invalid_argument("integrate_top: wrong degree");
  IndexMask top = static_cast<IndexMask>((1u << a.dim()) - 1u);
  double volume = 1.0;
  for (int i = 0; i < a.dim(); ++i) volume *= kTwoPi;
  return volume * a.coeff(zero_freq(), top).real();
}

TwoFormMatrix two_form_matrix_at(const BandForm& a, const Eigen::VectorXd& point) {
  if (a.degree() != 2) throw std::invalid_argument("two_form_matrix_at: degree != 2");
  auto comps = a.components_at(point);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.dim(), a.dim());
  for (const auto& [mask, v] : comps) {
    auto idx = mask_to_indices(mask);
    m(idx[0], idx[1]) = v;
    m(idx[1], idx[0]) = -v;
  }
  return TwoFormMatrix(m);
}

Eigen::VectorXd covector_at(const BandForm& a, const Eigen::VectorXd& point) {
  if (a.degree() != 1) throw std::invalid_argument("covector_at: degree != 1");
  auto comps = a.components_at(point);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(a.dim());
  for (const auto& [mask, c] : comps) v[mask_to_indices(mask)[0]] = c;
  return v;
}

BandForm circle_pullback(const BandForm& base_form) {
  TorusModel ext = base_form.model().extended_with_circle();
  BandForm r(ext, base_form.degree());
  for (const auto& [key, value] : base_form.canonical_modes()) {
    Freq f{};
    for (int i = 0; i < base_form.dim(); ++i) f[static_cast<size_t>(i + 1)] = key.freq[static_cast<size_t>(i)];
    r.set_coeff(f, static_cast<IndexMask>(key.mask << 1), value);
  }
  return r;
}

double coeff_distance(const BandForm& a, const BandForm& b) {
  if (!a.model().same_space(b.model()) || a.degree() != b.degree())
    throw std::invalid_argument("coeff_distance: model/degree mismatch");
  double d = 0;
  for (const auto& [key, value] : a.canonical_modes())
    d = std::max(d, std::abs(value - b.coeff(key.freq, key.mask)));
  for (const auto& [key, value] : b.canonical_modes())
    d = std::max(d, std::abs(value - a.coeff(key.freq, key.mask)));
  return d;
}

}  // namespace conecontact
