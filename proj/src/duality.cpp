#include "conecontact/duality.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "conecontact/simplex.hpp"

namespace conecontact {

namespace {

constexpr double kClosureTol = 1e-10;
constexpr double kExactResidualTol = 1e-8;
constexpr double kZeroRowTol = 1e-12;
constexpr double kSymmetryTol = 1e-10;

// Canonical frequencies of the requested band, restricted to the invariant
// sector when asked.
std::vector<Freq> sector_frequencies(const TorusModel& model, int band, bool invariant_sector) {
  if (invariant_sector && !model.t_axis)
    throw std::invalid_argument("closed_subspace_basis: invariant sector needs a t_axis");
  std::vector<Freq> out;
  Freq f{};
  auto rec = [&](auto&& self, int axis) -> void {
    if (axis == model.dim) {
      if (freq_is_canonical(f)) out.push_back(f);
      return;
    }
    if (invariant_sector && model.t_axis && axis == *model.t_axis) {
      f[static_cast<size_t>(axis)] = 0;
      self(self, axis + 1);
      return;
    }
    for (int v = -band; v <= band; ++v) {
      f[static_cast<size_t>(axis)] = v;
      self(self, axis + 1);
    }
    f[static_cast<size_t>(axis)] = 0;
  };
  rec(rec, 0);
  return out;
}

std::vector<Complex> koszul_vector(int dim, const std::vector<Complex>& zeta, IndexMask base,
                                   const std::vector<IndexMask>& masks) {
  // coefficients of zeta ^ e_base on the listed masks
  std::vector<Complex> v(masks.size(), Complex{0, 0});
  for (int j = 0; j < dim; ++j) {
    IndexMask bit = static_cast<IndexMask>(1u << j);
    if (base & bit) continue;
    if (zeta[static_cast<size_t>(j)] == Complex{0, 0}) continue;
    IndexMask target = static_cast<IndexMask>(base | bit);
    auto it = std::find(masks.begin(), masks.end(), target);
    if (it == masks.end()) continue;
    v[static_cast<size_t>(it - masks.begin())] +=
        static_cast<double>(insertion_sign(j, base)) * zeta[static_cast<size_t>(j)];
  }
  return v;
}

BandForm normalized(BandForm f) {
  double n = f.sup_coeff_norm();
  if (n > 0) f = f * (1.0 / n);
  return f;
}

// Real coordinates of a sector form: one slot for f = 0 modes, two (re, im)
// for canonical nonzero frequencies.
struct SectorCoords {
  std::vector<std::pair<ModeKey, int>> slots;  // mode -> number of real dofs
  std::map<ModeKey, size_t> offset;
  size_t dim = 0;

  SectorCoords(const std::vector<Freq>& freqs, const std::vector<IndexMask>& masks) {
    for (const auto& f : freqs)
      for (IndexMask m : masks) {
        ModeKey key{f, m};
        int dofs = (f == zero_freq()) ? 1 : 2;
        offset[key] = dim;
        slots.emplace_back(key, dofs);
        dim += static_cast<size_t>(dofs);
      }
  }

  Eigen::VectorXd vec(const BandForm& form) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    for (const auto& [key, value] : form.canonical_modes()) {
      auto it = offset.find(key);
      if (it == offset.end())
        throw std::runtime_error(
            "closed_subspace_basis: symmetry image leaves the band or sector");
      v[static_cast<Eigen::Index>(it->second)] = value.real();
      if (key.freq != zero_freq()) v[static_cast<Eigen::Index>(it->second) + 1] = value.imag();
    }
    return v;
  }
};

}  // namespace

std::vector<BandForm> closed_subspace_basis(const TorusModel& model,
                                            const ConstantOneForm& theta, int degree,
                                            int band, bool invariant_sector,
                                            const std::vector<TorusAction>& symmetries,
                                            BasisMode mode) {
  if (theta.dim() != model.dim)
    throw std::invalid_argument("closed_subspace_basis: theta dimension mismatch");
  if (degree < 0 || degree > model.dim)
    throw std::invalid_argument("closed_subspace_basis: degree out of range");
  TorusModel space(model.dim, band, model.t_axis);

  std::vector<Freq> freqs = sector_frequencies(space, band, invariant_sector);
  if (mode == BasisMode::Alternate) std::reverse(freqs.begin(), freqs.end());
  std::vector<IndexMask> masks = all_masks_of_grade(space.dim, degree);

  std::vector<BandForm> basis;
  for (const auto& f : freqs) {
    std::vector<Complex> zeta(static_cast<size_t>(space.dim));
    double zmax = 0;
    for (int j = 0; j < space.dim; ++j) {
      zeta[static_cast<size_t>(j)] = Complex{theta.component(j), static_cast<double>(f[static_cast<size_t>(j)])};
      zmax = std::max(zmax, std::abs(zeta[static_cast<size_t>(j)]));
    }

    if (zmax < 1e-14) {
      // D vanishes on this frequency: every multi-index is closed
      for (IndexMask m : masks) {
        BandForm z(space, degree);
        z.set_coeff(f, m, Complex{1.0, 0.0});
        basis.push_back(z);
      }
      continue;
    }

    // kernel of zeta ^ . on grade k = zeta ^ Lambda^{k-1} over indices
    // avoiding the pivot; pick the pivot per mode for an independent basis
    if (degree == 0) continue;  // zeta ^ is injective on 0-forms
    int pivot = -1;
    if (mode == BasisMode::Primary) {
      for (int j = 0; j < space.dim; ++j)
        if (std::abs(zeta[static_cast<size_t>(j)]) >= zmax * 0.5) {
          pivot = j;
          break;
        }
    } else {
      double best = -1;
      for (int j = 0; j < space.dim; ++j)
        if (std::abs(zeta[static_cast<size_t>(j)]) >= best) {
          best = std::abs(zeta[static_cast<size_t>(j)]);
          pivot = j;
        }
    }

    std::vector<IndexMask> bases_k1 = all_masks_of_grade(space.dim, degree - 1);
    if (mode == BasisMode::Alternate) std::reverse(bases_k1.begin(), bases_k1.end());
    for (IndexMask base : bases_k1) {
      if (base & (1u << pivot)) continue;
      std::vector<Complex> w = koszul_vector(space.dim, zeta, base, masks);
      if (f == zero_freq()) {
        // zeta is real here; one real form
        BandForm z(space, degree);
        for (size_t i = 0; i < masks.size(); ++i)
          if (w[i] != Complex{0, 0}) z.set_coeff(f, masks[i], Complex{w[i].real(), 0.0});
        basis.push_back(normalized(std::move(z)));
      } else {
        BandForm zr(space, degree);
        BandForm zi(space, degree);
        for (size_t i = 0; i < masks.size(); ++i) {
          if (w[i] == Complex{0, 0}) continue;
          if (mode == BasisMode::Primary) {
            zr.set_coeff(f, masks[i], w[i]);
            zi.set_coeff(f, masks[i], Complex{0, 1} * w[i]);
          } else {
            zr.set_coeff(f, masks[i], Complex{0, 1} * w[i]);
            zi.set_coeff(f, masks[i], -w[i]);
          }
        }
        basis.push_back(normalized(std::move(zr)));
        basis.push_back(normalized(std::move(zi)));
      }
    }
  }

  if (symmetries.empty() || basis.empty()) return basis;

  // restrict to the sign-twisted fixed space of every symmetry
  SectorCoords coords(freqs, masks);
  const auto nb = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd b(static_cast<Eigen::Index>(coords.dim), nb);
  for (Eigen::Index c = 0; c < nb; ++c) b.col(c) = coords.vec(basis[static_cast<size_t>(c)]);

  Eigen::MatrixXd stacked(nb * static_cast<Eigen::Index>(symmetries.size()), nb);
  Eigen::Index row0 = 0;
  for (const auto& rho : symmetries) {
    Eigen::VectorXd theta_img = rho.linear.cast<double>().transpose() * theta.components();
    if ((theta_img - theta.components()).lpNorm<Eigen::Infinity>() > 1e-12)
      throw std::invalid_argument("closed_subspace_basis: symmetry does not preserve theta");
    Eigen::MatrixXd rb(static_cast<Eigen::Index>(coords.dim), nb);
    for (Eigen::Index c = 0; c < nb; ++c)
      rb.col(c) = coords.vec(pullback_affine(basis[static_cast<size_t>(c)], rho));
    // T with B T = R_B; the pullback preserves the closed subspace
    Eigen::MatrixXd t = b.colPivHouseholderQr().solve(rb);
    double span_residual = (b * t - rb).cwiseAbs().maxCoeff();
    if (span_residual > 1e-8)
      throw std::runtime_error("closed_subspace_basis: symmetry does not preserve the subspace");
    stacked.middleRows(row0, nb) =
        static_cast<double>(rho.sign) * t - Eigen::MatrixXd::Identity(nb, nb);
    row0 += nb;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeFullV);
  double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  double cut = std::max(1e-10, 1e-10 * smax);
  std::vector<BandForm> restricted;
  for (Eigen::Index c = 0; c < nb; ++c) {
    double sv = (c < svd.singularValues().size()) ? svd.singularValues()[c] : 0.0;
    if (sv > cut) continue;
    Eigen::VectorXd coeff = svd.matrixV().col(c);
    BandForm z(space, degree);
    for (Eigen::Index k = 0; k < nb; ++k)
      if (coeff[k] != 0.0) z = z + basis[static_cast<size_t>(k)] * coeff[k];
    z.prune(1e-15);
    if (!z.empty()) restricted.push_back(normalized(std::move(z)));
  }
  return restricted;
}

Eigen::MatrixXd evaluation_matrix(const std::vector<DiracGenerator>& generators,
                                  const std::vector<BandForm>& basis) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(generators.size()),
                    static_cast<Eigen::Index>(basis.size()));
  for (size_t j = 0; j < generators.size(); ++j)
    for (size_t b = 0; b < basis.size(); ++b)
      m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(b)) =
          pair_dirac(basis[b], generators[j].point, generators[j].bivector);
  return m;
}

namespace {

// Shared engine: max sum(mu) over mu >= 0 with ||rows^T mu||_inf <= 1. The
// slack basis is feasible and nondegenerate, unlike an artificial phase-1
// start on the massively degenerate Farkas system. Bounded runs end at an
// optimum whose multipliers give a separating y with rows * y >= 1 (the
// max-margin direction per unit l1 mass); unbounded rays are exactly the
// normalized Farkas certificates lambda >= 0, lambda^T rows = 0, sum = 1.
struct SeparationEngine {
  bool feasible = false;
  Eigen::VectorXd y;
  Eigen::VectorXd lambda;
  double l1_mass = 0;  // min ||y||_1 at margin 1, when feasible
};

SeparationEngine run_separation_engine(const Eigen::MatrixXd& rows, long max_pivots) {
  const Eigen::Index r = rows.rows();
  const Eigen::Index c = rows.cols();
  const Eigen::Index nrows = 2 * c;
  const Eigen::Index ncols = r + 2 * c;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nrows, ncols);
  a.block(0, 0, c, r) = rows.transpose();
  a.block(c, 0, c, r) = -rows.transpose();
  a.block(0, r, nrows, nrows) = Eigen::MatrixXd::Identity(nrows, nrows);
  Eigen::VectorXd b = Eigen::VectorXd::Ones(nrows);

  std::vector<int> basis(static_cast<size_t>(nrows));
  for (Eigen::Index i = 0; i < nrows; ++i) basis[static_cast<size_t>(i)] = static_cast<int>(r + i);
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(ncols);
  cost.head(r).setConstant(-1.0);

  SimplexTableau tab(a, b, basis);
  SeparationEngine out;
  if (tab.minimize(cost, max_pivots) == SimplexTableau::Status::Unbounded) {
    out.feasible = false;
    Eigen::VectorXd ray = tab.unbounded_ray().head(r).cwiseMax(0.0);
    double sum = ray.sum();
    if (sum <= 0) throw std::runtime_error("lp_feasibility: degenerate unbounded ray");
    out.lambda = ray / sum;
  } else {
    out.feasible = true;
    out.l1_mass = -tab.objective(cost);
    Eigen::VectorXd pi = tab.dual(cost);
    out.y = pi.tail(c) - pi.head(c);
    if (!out.y.allFinite())
      throw std::runtime_error("lp_feasibility: dual extraction failed");
  }
  return out;
}

}  // namespace

LpResult lp_feasibility(const Eigen::MatrixXd& rows, long max_pivots) {
  const Eigen::Index r = rows.rows();
  const Eigen::Index c = rows.cols();
  if (r == 0) throw std::invalid_argument("lp_feasibility: empty system");
  if (!rows.allFinite()) throw std::invalid_argument("lp_feasibility: non-finite entries");
  if (max_pivots < 0) max_pivots = 10L * static_cast<long>(r + c) + 50;

  SeparationEngine engine = run_separation_engine(rows, max_pivots);
  LpResult out;
  if (!engine.feasible) {
    out.feasible = false;
    out.lambda = engine.lambda;
    return out;
  }
  out.feasible = true;
  out.y = engine.y;
  double margin = (rows * out.y).minCoeff();
  if (margin < 1.0 - 1e-7) {
    // the multiplier route degraded numerically; fall back to an artificial
    // phase-1 on the Farkas system, whose infeasibility dual separates
    Eigen::MatrixXd a(c + 1, r);
    a.topRows(c) = rows.transpose();
    a.row(c).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(c + 1);
    b[c] = 1.0;
    FeasibilityResult fr = phase1_feasible(a, b, max_pivots);
    if (fr.feasible) {
      Eigen::VectorXd lambda = fr.x.cwiseMax(0.0);
      out.feasible = false;
      out.lambda = lambda / lambda.sum();
      out.y.resize(0);
      return out;
    }
    double pivot = fr.dual[c];
    if (pivot <= 1e-12)
      throw std::runtime_error("lp_feasibility: dual certificate has vanishing scale");
    out.y = -fr.dual.head(c) / pivot;
  }
  return out;
}

std::optional<std::pair<Eigen::VectorXd, double>> max_margin_direction(
    const Eigen::MatrixXd& rows, long max_pivots) {
  // max of min_j (rows y)_j over ||y||_1 <= 1 equals 1 / min{||w||_1 :
  // rows w >= 1}; the engine returns that minimum-l1 w scaled to margin 1.
  if (max_pivots < 0) max_pivots = 40L * static_cast<long>(rows.rows() + rows.cols()) + 200;
  try {
    SeparationEngine engine = run_separation_engine(rows, max_pivots);
    if (!engine.feasible || engine.l1_mass <= 1e-12) return std::nullopt;
    if ((rows * engine.y).minCoeff() <= 0) return std::nullopt;
    return std::make_pair(engine.y, 1.0 / engine.l1_mass);
  } catch (const SimplexIterationLimit&) {
    return std::nullopt;
  } catch (const std::runtime_error&) {
    return std::nullopt;
  }
}

namespace {

SampledConeStructure cone_from_generators(const TorusModel& model,
                                          const std::vector<DiracGenerator>& gens) {
  std::vector<ConeSite> sites;
  std::map<std::vector<long long>, size_t> index;
  for (const auto& g : gens) {
    std::vector<long long> key(static_cast<size_t>(g.point.size()));
    for (Eigen::Index i = 0; i < g.point.size(); ++i)
      key[static_cast<size_t>(i)] = std::llround(wrap_angle(g.point[i]) / kTwoPi * 1e8) % 100000000ll;
    auto it = index.find(key);
    if (it == index.end()) {
      index[key] = sites.size();
      ConeSite site;
      site.point = g.point;
      site.generators.push_back(g.bivector);
      sites.push_back(std::move(site));
    } else {
      sites[it->second].generators.push_back(g.bivector);
    }
  }
  return SampledConeStructure(model, std::move(sites));
}

}  // namespace

SeparationProblem::SeparationProblem(TorusModel model_, ConstantOneForm theta_, int band_,
                                     std::vector<DiracGenerator> generators_,
                                     std::vector<TorusAction> symmetries_,
                                     bool invariant_sector_)
    : model(model_),
      theta(std::move(theta_)),
      band(band_),
      generators(std::move(generators_)),
      symmetries(std::move(symmetries_)),
      invariant_sector(invariant_sector_) {
  if (generators.empty())
    throw std::invalid_argument("SeparationProblem: generators must be nonempty");
  if (theta.dim() != model.dim)
    throw std::invalid_argument("SeparationProblem: theta dimension mismatch");
  if (band < 0) throw std::invalid_argument("SeparationProblem: negative band");
  for (const auto& g : generators) {
    if (g.point.size() != model.dim || g.bivector.dim() != model.dim)
      throw std::invalid_argument("SeparationProblem: generator dimension mismatch");
  }
  // symmetries must map the generator set to itself
  if (!symmetries.empty()) {
    SampledConeStructure cone = cone_from_generators(model, generators);
    for (const auto& rho : symmetries) {
      EquivarianceReport rep = check_equivariance(cone, rho, 1e-9);
      if (!rep.passed)
        throw std::invalid_argument(
            "SeparationProblem: symmetry does not preserve the generator set (violation " +
            std::to_string(rep.max_violation) + ")");
    }
  }
}

Certificate separate(const SeparationProblem& problem) {
  std::vector<BandForm> basis =
      closed_subspace_basis(problem.model, problem.theta, 2, problem.band,
                            problem.invariant_sector, problem.symmetries, BasisMode::Primary);

  const size_t nrows = problem.generators.size();
  Certificate cert;

  // salience pre-check: a generator with an all-zero row is invisible to the
  // sector, so "positive on the base" cannot be decided for it
  Eigen::MatrixXd m = basis.empty()
                          ? Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nrows), 0)
                          : evaluation_matrix(problem.generators, basis);
  std::vector<size_t> invisible;
  for (size_t j = 0; j < nrows; ++j) {
    double row_max = basis.empty() ? 0.0 : m.row(static_cast<Eigen::Index>(j)).cwiseAbs().maxCoeff();
    if (row_max < kZeroRowTol) invisible.push_back(j);
  }
  if (!invisible.empty()) {
    cert.variant = CertificateVariant::NotSalient;
    cert.invisible_generators = std::move(invisible);
    return cert;
  }

  LpResult lp = lp_feasibility(m);
  if (!lp.feasible) {
    cert.variant = CertificateVariant::ExactCurrent;
    cert.weights.assign(lp.lambda.data(), lp.lambda.data() + lp.lambda.size());
    cert.closure_residual = (lp.lambda.transpose() * m).cwiseAbs().maxCoeff();
  } else {
    // lp.y is the max-margin direction per unit l1 mass, scaled to margin 1;
    // no further centering is needed
    const Eigen::VectorXd& y = lp.y;
    BandForm omega(TorusModel(problem.model.dim, problem.band, problem.model.t_axis), 2);
    for (size_t b = 0; b < basis.size(); ++b)
      omega = omega + basis[b] * y[static_cast<Eigen::Index>(b)];
    omega.prune(0.0);
    cert.variant = CertificateVariant::PositiveForm;
    cert.omega = std::move(omega);
    cert.margin = (m * y).minCoeff();
  }

  VerifyReport report = verify_certificate(cert, problem);
  if (!report.passed)
    throw CertificateVerificationError(
        "separate: certificate failed independent verification (" + report.worst + ")", report);
  return cert;
}

VerifyReport verify_certificate(const Certificate& cert, const SeparationProblem& problem) {
  VerifyReport rep;
  switch (cert.variant) {
    case CertificateVariant::PositiveForm: {
      if (!cert.omega) {
        rep.worst = "missing omega payload";
        return rep;
      }
      const BandForm& omega = *cert.omega;
      // a top-degree form is D-closed for free: the target space vanishes
      rep.d_closed_residual =
          omega.degree() < problem.model.dim
              ? lichnerowicz_d(problem.theta, omega).sup_coeff_norm()
              : 0.0;
      bool first = true;
      for (const auto& g : problem.generators) {
        double v = pair_dirac(omega, g.point, g.bivector);
        if (first || v < rep.min_pairing) rep.min_pairing = v;
        first = false;
      }
      for (const auto& rho : problem.symmetries) {
        BandForm pulled = pullback_affine(omega, rho);
        rep.symmetry_residual = std::max(
            rep.symmetry_residual,
            coeff_distance(pulled, omega * static_cast<double>(rho.sign)));
      }
      if (problem.invariant_sector)
        rep.sector_residual = coeff_distance(omega, circle_average(omega));

      rep.passed = rep.d_closed_residual <= kClosureTol &&
                   cert.margin > 0 &&
                   rep.min_pairing >= cert.margin - 1e-9 &&
                   rep.symmetry_residual <= kSymmetryTol &&
                   rep.sector_residual <= kSymmetryTol;
      if (!rep.passed) {
        if (rep.d_closed_residual > kClosureTol) rep.worst = "D-closedness residual";
        else if (cert.margin <= 0 || rep.min_pairing < cert.margin - 1e-9) rep.worst = "positivity margin";
        else if (rep.symmetry_residual > kSymmetryTol) rep.worst = "symmetry residual";
        else rep.worst = "invariant sector residual";
      }
      return rep;
    }
    case CertificateVariant::ExactCurrent: {
      if (cert.weights.size() != problem.generators.size()) {
        rep.worst = "weight arity mismatch";
        return rep;
      }
      double sum = 0;
      double worst_negative = 0;
      for (double w : cert.weights) {
        sum += w;
        worst_negative = std::min(worst_negative, w);
      }
      rep.weight_error = std::max(std::abs(sum - 1.0), -worst_negative);

      // fresh basis with a different pivot/ordering: the current must
      // annihilate the whole closed subspace, not just the solver's basis
      std::vector<BandForm> fresh =
          closed_subspace_basis(problem.model, problem.theta, 2, problem.band,
                                problem.invariant_sector, problem.symmetries,
                                BasisMode::Alternate);
      rep.closure_residual = 0;
      for (const auto& z : fresh) {
        double v = 0;
        for (size_t j = 0; j < problem.generators.size(); ++j)
          v += cert.weights[j] *
               pair_dirac(z, problem.generators[j].point, problem.generators[j].bivector);
        rep.closure_residual = std::max(rep.closure_residual, std::abs(v));
      }
      rep.passed = rep.weight_error <= 1e-9 && rep.closure_residual <= kExactResidualTol;
      if (!rep.passed)
        rep.worst = rep.weight_error > 1e-9 ? "weight normalization" : "closure residual";
      return rep;
    }
    case CertificateVariant::NotSalient: {
      std::vector<BandForm> basis =
          closed_subspace_basis(problem.model, problem.theta, 2, problem.band,
                                problem.invariant_sector, problem.symmetries,
                                BasisMode::Alternate);
      rep.passed = true;
      for (size_t j : cert.invisible_generators) {
        if (j >= problem.generators.size()) {
          rep.passed = false;
          rep.worst = "generator index out of range";
          return rep;
        }
        for (const auto& z : basis) {
          double v = std::abs(pair_dirac(z, problem.generators[j].point,
                                         problem.generators[j].bivector));
          rep.closure_residual = std::max(rep.closure_residual, v);
        }
      }
      if (rep.closure_residual > 1e-10) {
        rep.passed = false;
        rep.worst = "generator is not invisible to the sector";
      }
      return rep;
    }
  }
  rep.worst = "unknown variant";
  return rep;
}

}  // namespace conecontact
