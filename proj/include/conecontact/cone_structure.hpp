// Sampled cone structures of bivectors: one finite generator set per sample
// point, built from almost complex structures, checked for positivity and
// (sign-twisted) equivariance, and flattened into Dirac generator lists.
#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "conecontact/band_form.hpp"
#include "conecontact/multilinear.hpp"
#include "conecontact/torus.hpp"

namespace conecontact {

struct ConeSite {
  Eigen::VectorXd point;
  std::vector<Bivector> generators;
};

class SampledConeStructure {
 public:
  SampledConeStructure(TorusModel model, std::vector<ConeSite> sites);

  const TorusModel& model() const { return model_; }
  const std::vector<ConeSite>& sites() const { return sites_; }
  size_t generator_count() const;

 private:
  TorusModel model_;
  std::vector<ConeSite> sites_;
};

// Pointwise almost complex structure field.
using AcsField = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

struct ProbeSpec {
  bool frame = true;
  int random_per_site = 8;
  std::uint64_t seed = kDefaultSeed;
  // One shared random probe set keeps the generator family equivariant under
  // torus translations; per-site draws trade that for coverage.
  bool shared_random = true;
  std::vector<Eigen::VectorXd> extra;
};

// Generators { v ^ J(p)v : v in probes } at every grid point, normalized to
// unit norm. Verifies J(p)^2 = -I to acs_tol at every site.
SampledConeStructure cone_from_acs(const TorusModel& model, const AcsField& j_field,
                                   const GridSpec& grid, const ProbeSpec& probes,
                                   double acs_tol = 1e-8);

// Minimum pairing of the degree-2 form against every generator.
double positivity_margin(const BandForm& form, const SampledConeStructure& cone);

struct EquivarianceReport {
  double max_violation = 0;
  size_t worst_site = 0;
  int worst_generator = -1;
  bool passed = true;
};

// For each generator g at p, checks that sign * (L ^ L)(g) lies in the conic
// hull of the generators at the image point (L1 feasibility violation).
EquivarianceReport check_equivariance(const SampledConeStructure& cone,
                                      const TorusAction& action, double tol = 1e-9);

struct DiracGenerator {
  Eigen::VectorXd point;
  Bivector bivector;
  DiracGenerator(Eigen::VectorXd p, Bivector b) : point(std::move(p)), bivector(std::move(b)) {}
};

// Site-major, generator-minor flattening consumed by the duality engine.
std::vector<DiracGenerator> dirac_generators(const SampledConeStructure& cone);

// Text format, one generator per line: "p1,...,pm | i<j:val;...".
void write_cone(std::ostream& out, const SampledConeStructure& cone);
SampledConeStructure read_cone(std::istream& in);
void write_cone_file(const std::string& path, const SampledConeStructure& cone);
SampledConeStructure read_cone_file(const std::string& path);

}  // namespace conecontact
