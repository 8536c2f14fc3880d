// conecontact: batch driver for the contact <-> cone-structure pipeline.
// Subcommands: verify-contact, symplectize, build-cone, check-ample,
// separate, roundtrip, verify. One declarative JSON config per run.
//
// Exit codes: 0 success, 1 negative verification result, 2 configuration or
// parse error, 3 solver failure (iteration limit or non-salient sector),
// 4 certificate verification failure.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "conecontact/certificate_io.hpp"
#include "conecontact/contact.hpp"
#include "conecontact/cone_structure.hpp"
#include "conecontact/duality.hpp"
#include "conecontact/simplex.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace conecontact;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitVerify = 4;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double closure = 1e-10;
  double margin = 0.0;
  double residual = 1e-8;
  double pfaffian = 1e-6;
};

struct RunConfig {
  json raw;
  fs::path base_dir;
  fs::path out_dir;

  fs::path resolve(const std::string& p) const {
    fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  }
  fs::path out_path(const std::string& key, const std::string& fallback) const {
    if (raw.contains("outputs") && raw["outputs"].contains(key))
      return resolve(raw["outputs"][key].get<std::string>());
    return out_dir / fallback;
  }

  std::string input_path(const char* key) const {
    if (!raw.contains(key)) throw ConfigError(std::string("config: missing '") + key + "'");
    return resolve(raw[key].get<std::string>()).string();
  }

  GridSpec grid(int dim) const {
    if (!raw.contains("grid")) throw ConfigError("config: missing 'grid'");
    const json& g = raw["grid"];
    std::vector<int> ppa;
    if (g.is_number_integer()) {
      ppa.assign(static_cast<size_t>(dim), g.get<int>());
    } else {
      for (const auto& v : g) ppa.push_back(v.get<int>());
    }
    if (static_cast<int>(ppa.size()) != dim)
      throw ConfigError("config: grid arity does not match the model dimension");
    for (int n : ppa)
      if (n < 3) throw ConfigError("config: grid needs at least 3 points per axis");
    return GridSpec(ppa);
  }

  int verify_grid_points() const { return raw.value("verify_grid", 17); }

  ConstantOneForm theta(const TorusModel& model) const {
    if (!raw.contains("theta")) {
      if (model.t_axis) return ConstantOneForm::dt(model);
      return ConstantOneForm::zero(model.dim);
    }
    const json& t = raw["theta"];
    if (t.is_string()) {
      if (t.get<std::string>() == "dt") return ConstantOneForm::dt(model);
      if (t.get<std::string>() == "zero") return ConstantOneForm::zero(model.dim);
      throw ConfigError("config: theta must be 'dt', 'zero', or a component list");
    }
    Eigen::VectorXd c(model.dim);
    if (static_cast<int>(t.size()) != model.dim)
      throw ConfigError("config: theta arity mismatch");
    for (int i = 0; i < model.dim; ++i) c[i] = t.at(static_cast<size_t>(i)).get<double>();
    return ConstantOneForm(c);
  }

  std::vector<TorusAction> symmetries(int dim) const {
    std::vector<TorusAction> out;
    if (!raw.contains("symmetries")) return out;
    for (const auto& js : raw["symmetries"]) {
      Eigen::MatrixXi linear = Eigen::MatrixXi::Identity(dim, dim);
      if (js.contains("linear")) {
        const auto& jl = js["linear"];
        if (static_cast<int>(jl.size()) != dim)
          throw ConfigError("config: symmetry linear part has wrong shape");
        for (int r = 0; r < dim; ++r)
          for (int c = 0; c < dim; ++c)
            linear(r, c) = jl.at(static_cast<size_t>(r)).at(static_cast<size_t>(c)).get<int>();
      }
      Eigen::VectorXd tr = Eigen::VectorXd::Zero(dim);
      if (js.contains("translation_over_2pi")) {
        for (int r = 0; r < dim; ++r)
          tr[r] = kTwoPi * js["translation_over_2pi"].at(static_cast<size_t>(r)).get<double>();
      } else if (js.contains("translation")) {
        for (int r = 0; r < dim; ++r)
          tr[r] = js["translation"].at(static_cast<size_t>(r)).get<double>();
      }
      out.emplace_back(linear, tr, js.value("sign", 1));
    }
    return out;
  }

  ProbeSpec probes() const {
    ProbeSpec p;
    p.seed = raw.value("seed", static_cast<std::uint64_t>(kDefaultSeed));
    if (raw.contains("probes")) {
      p.frame = raw["probes"].value("frame", true);
      p.random_per_site = raw["probes"].value("random", 8);
    }
    return p;
  }

  Tolerances tolerances() const {
    Tolerances t;
    if (raw.contains("tolerances")) {
      const json& j = raw["tolerances"];
      t.closure = j.value("closure", t.closure);
      t.margin = j.value("margin", t.margin);
      t.residual = j.value("residual", t.residual);
      t.pfaffian = j.value("pfaffian", t.pfaffian);
    }
    if (t.closure <= 0 || t.residual <= 0 || t.pfaffian <= 0 || t.margin < 0)
      throw ConfigError("config: tolerances must be positive");
    return t;
  }
};

RunConfig load_config(const std::string& path, const std::string& out_dir) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  RunConfig cfg;
  try {
    in >> cfg.raw;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  cfg.base_dir = fs::absolute(fs::path(path)).parent_path();
  cfg.out_dir = out_dir.empty() ? cfg.base_dir : fs::absolute(fs::path(out_dir));
  fs::create_directories(cfg.out_dir);
  return cfg;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << text;
  }
  fs::rename(tmp, path);
}

// restriction of an extended-space action to the base torus (dropping t);
// requires the action to fix the circle coordinate
TorusAction base_action(const TorusAction& rho) {
  int dim = rho.dim() - 1;
  bool fixes_circle = rho.linear(0, 0) == 1 && rho.translation[0] == 0.0;
  for (int i = 1; i <= dim; ++i)
    fixes_circle = fixes_circle && rho.linear(0, i) == 0 && rho.linear(i, 0) == 0;
  if (!fixes_circle)
    throw ConfigError("config: symmetry must fix the circle factor to restrict to the base");
  Eigen::MatrixXi linear = rho.linear.block(1, 1, dim, dim);
  Eigen::VectorXd tr = rho.translation.tail(dim);
  return TorusAction(linear, tr, rho.sign);
}

std::map<std::string, std::string> provenance_for(const RunConfig& cfg,
                                                  const SampledConeStructure& cone,
                                                  const fs::path& cone_path,
                                                  const fs::path& cert_dir) {
  std::map<std::string, std::string> prov;
  // relative to the certificate so reruns into fresh directories are
  // byte-identical and the bundle stays relocatable
  std::error_code ec;
  fs::path rel = fs::relative(cone_path, cert_dir, ec);
  prov["cone_file"] = (ec || rel.empty()) ? cone_path.string() : rel.string();
  prov["generator_count"] = std::to_string(cone.generator_count());
  prov["seed"] =
      std::to_string(cfg.raw.value("seed", static_cast<std::uint64_t>(kDefaultSeed)));
  if (cfg.raw.contains("grid")) prov["grid"] = cfg.raw["grid"].dump();
  return prov;
}

int cmd_verify_contact(const RunConfig& cfg) {
  BandForm alpha_form = read_form_file(cfg.input_path("form"));
  ContactCandidate alpha(alpha_form);
  Tolerances tol = cfg.tolerances();
  int n = cfg.verify_grid_points();
  ContactReport rep = verify_contact(alpha, GridSpec::uniform(alpha.dim(), n));
  std::cout << "min_density = " << fmt17(rep.min_density) << "\n";
  std::cout << "integral = " << fmt17(rep.integral) << "\n";
  std::cout << "grid = " << n << "^" << alpha.dim() << "\n";
  bool contact = rep.min_density > tol.pfaffian;
  std::cout << (contact ? "contact: yes" : "contact: no") << "\n";
  return contact ? kExitOk : kExitNegative;
}

int cmd_symplectize(const RunConfig& cfg) {
  BandForm alpha_form = read_form_file(cfg.input_path("form"));
  BandForm s = twisted_symplectization(ContactCandidate(alpha_form));
  fs::path out = cfg.out_path("symplectization", "symplectization.form");
  write_form_file(out.string(), s);
  std::cout << "wrote " << out.string() << "\n";
  return kExitOk;
}

SampledConeStructure build_cone_for(const RunConfig& cfg, const ContactCandidate& alpha) {
  TorusModel ext = alpha.alpha().model().extended_with_circle();
  AcsField field = reeb_acs_field(alpha, MetricField::identity());
  return cone_from_acs(ext, field, cfg.grid(ext.dim), cfg.probes());
}

int cmd_build_cone(const RunConfig& cfg) {
  BandForm alpha_form = read_form_file(cfg.input_path("form"));
  ContactCandidate alpha(alpha_form);
  SampledConeStructure cone = build_cone_for(cfg, alpha);
  fs::path out = cfg.out_path("cone", "cone.txt");
  write_cone_file(out.string(), cone);
  std::cout << "wrote " << out.string() << " (" << cone.generator_count()
            << " generators over " << cone.sites().size() << " sites)\n";
  return kExitOk;
}

int cmd_check_ample(const RunConfig& cfg) {
  SampledConeStructure cone = read_cone_file(cfg.input_path("cone"));
  int resolution = cfg.raw.value("resolution", 360);
  int trials = cfg.raw.value("tau_trials", 20);
  size_t max_sites = cfg.raw.value("ample_sites", static_cast<size_t>(8));
  Rng rng(cfg.raw.value("seed", static_cast<std::uint64_t>(kDefaultSeed)));

  size_t stride = std::max<size_t>(1, cone.sites().size() / std::max<size_t>(1, max_sites));
  int misses = 0;
  int tested = 0;
  for (size_t s = 0; s < cone.sites().size(); s += stride) {
    const auto& site = cone.sites()[s];
    for (int t = 0; t < trials; ++t) {
      Eigen::VectorXd t1 = rng.unit_vector(cone.model().dim);
      Eigen::VectorXd t2 = rng.unit_vector(cone.model().dim);
      if (wedge_vectors(t1, t2).norm() < 1e-6) continue;
      ++tested;
      if (!schubert_intersects(site.generators, t1, t2, resolution)) {
        ++misses;
        std::cout << "no witness at site " << s << " trial " << t << " (resolution "
                  << resolution << ")\n";
      }
    }
  }
  std::cout << "tested " << tested << " (site, tau) pairs, witnesses missing: " << misses
            << "\n";
  return misses == 0 ? kExitOk : kExitNegative;
}

SeparationProblem problem_from_config(const RunConfig& cfg, const SampledConeStructure& cone) {
  const TorusModel& m = cone.model();
  int band = cfg.raw.value("band", m.band);
  TorusModel model(m.dim, band, m.t_axis);
  bool invariant = cfg.raw.value("invariant_sector", model.t_axis.has_value());
  return SeparationProblem(model, cfg.theta(model), band, dirac_generators(cone),
                           cfg.symmetries(model.dim), invariant);
}

int emit_certificate(const RunConfig& cfg, const Certificate& cert,
                     const SeparationProblem& problem,
                     const std::map<std::string, std::string>& prov) {
  fs::path out = cfg.out_path("certificate", "certificate.json");
  write_certificate_file(out.string(), cert, problem, prov);
  switch (cert.variant) {
    case CertificateVariant::PositiveForm:
      std::cout << "variant = positive_form, margin = " << fmt17(cert.margin) << "\n";
      break;
    case CertificateVariant::ExactCurrent:
      std::cout << "variant = exact_current, closure_residual = "
                << fmt17(cert.closure_residual) << "\n";
      break;
    case CertificateVariant::NotSalient:
      std::cout << "variant = not_salient (" << cert.invisible_generators.size()
                << " invisible generators)\n";
      break;
  }
  std::cout << "wrote " << out.string() << "\n";
  return cert.variant == CertificateVariant::NotSalient ? kExitSolver : kExitOk;
}

int cmd_separate(const RunConfig& cfg) {
  std::string cone_path = cfg.input_path("cone");
  SampledConeStructure cone = read_cone_file(cone_path);
  if (cone.generator_count() == 0) throw ConfigError("config: empty generator list");
  SeparationProblem problem = problem_from_config(cfg, cone);
  Certificate cert = separate(problem);
  fs::path cert_dir = cfg.out_path("certificate", "certificate.json").parent_path();
  return emit_certificate(cfg, cert, problem,
                          provenance_for(cfg, cone, cone_path, cert_dir));
}

int cmd_roundtrip(const RunConfig& cfg) {
  Tolerances tol = cfg.tolerances();
  BandForm alpha_form = read_form_file(cfg.input_path("form"));
  ContactCandidate alpha(alpha_form);

  int n = cfg.verify_grid_points();
  GridSpec base_grid = GridSpec::uniform(alpha.dim(), n);
  ContactReport input_rep = verify_contact(alpha, base_grid);
  std::cout << "input min_density = " << fmt17(input_rep.min_density) << "\n";
  if (input_rep.min_density <= tol.pfaffian) {
    std::cout << "input form is not contact on the grid\n";
    return kExitNegative;
  }

  SampledConeStructure cone = build_cone_for(cfg, alpha);
  fs::path cone_out = cfg.out_path("cone", "cone.txt");
  write_cone_file(cone_out.string(), cone);

  SeparationProblem problem = problem_from_config(cfg, cone);
  Certificate cert = separate(problem);
  fs::path cert_dir = cfg.out_path("certificate", "certificate.json").parent_path();
  int cert_code = emit_certificate(cfg, cert, problem,
                                   provenance_for(cfg, cone, cone_out, cert_dir));
  if (cert.variant != CertificateVariant::PositiveForm) return cert_code;

  ExtractedContact extracted = extract_contact(*cert.omega);
  if (extracted.residual > tol.closure) {
    std::cout << "extraction residual " << fmt17(extracted.residual) << " too large\n";
    return kExitVerify;
  }
  fs::path contact_out = cfg.out_path("contact", "extracted.form");
  write_form_file(contact_out.string(), extracted.alpha0);

  ContactCandidate alpha0(extracted.alpha0);
  ContactReport out_rep = verify_contact(alpha0, base_grid);
  std::cout << "extracted min_density = " << fmt17(out_rep.min_density) << "\n";

  // CSV diagnostics over the base grid
  BandForm s0 = twisted_symplectization(alpha0);
  BandForm vol = contact_volume_form(alpha0);
  KVector top = KVector::top(alpha0.dim());
  std::ostringstream csv;
  csv << "# point..., density, pfaffian\n";
  for (size_t i = 0; i < base_grid.size(); ++i) {
    Eigen::VectorXd p = base_grid.point(i);
    Eigen::VectorXd ext(p.size() + 1);
    ext << 0.0, p;
    for (Eigen::Index c = 0; c < p.size(); ++c) csv << fmt17(p[c]) << ",";
    csv << fmt17(pair_dirac(vol, p, top)) << ","
        << fmt17(pfaffian(two_form_matrix_at(s0, ext))) << "\n";
  }
  write_text_atomic(cfg.out_path("csv", "density.csv"), csv.str());

  bool ok = out_rep.min_density > tol.pfaffian;

  // skew pullback checks for sign -1 symmetries
  for (const auto& rho : problem.symmetries) {
    if (rho.sign != -1) continue;
    double omega_res =
        coeff_distance(pullback_affine(*cert.omega, rho), *cert.omega * -1.0);
    TorusAction rho0 = base_action(rho);
    double alpha_res =
        coeff_distance(pullback_affine(extracted.alpha0, rho0), extracted.alpha0 * -1.0);
    std::cout << "skew residual omega = " << fmt17(omega_res)
              << ", alpha = " << fmt17(alpha_res) << "\n";
    if (omega_res > 1e-10 || alpha_res > 1e-9) ok = false;
  }

  std::cout << (ok ? "roundtrip: ok" : "roundtrip: failed") << "\n";
  return ok ? kExitOk : kExitNegative;
}

int cmd_verify(const RunConfig& cfg) {
  CertificateDocument doc = read_certificate_file(cfg.input_path("certificate"));
  std::string cone_path;
  if (cfg.raw.contains("cone")) {
    cone_path = cfg.input_path("cone");
  } else if (doc.provenance.count("cone_file")) {
    fs::path recorded(doc.provenance.at("cone_file"));
    fs::path cert_dir = fs::absolute(fs::path(cfg.input_path("certificate"))).parent_path();
    cone_path = recorded.is_absolute() ? recorded.string() : (cert_dir / recorded).string();
  } else {
    throw ConfigError("config: no cone file available for verification");
  }
  SampledConeStructure cone = read_cone_file(cone_path);
  SeparationProblem problem = problem_from_document(doc, dirac_generators(cone));
  VerifyReport rep = verify_certificate(doc.cert, problem);
  std::cout << "passed = " << (rep.passed ? "true" : "false") << "\n";
  std::cout << "d_closed_residual = " << fmt17(rep.d_closed_residual) << "\n";
  std::cout << "min_pairing = " << fmt17(rep.min_pairing) << "\n";
  std::cout << "symmetry_residual = " << fmt17(rep.symmetry_residual) << "\n";
  std::cout << "closure_residual = " << fmt17(rep.closure_residual) << "\n";
  if (!rep.passed) std::cout << "worst = " << rep.worst << "\n";
  return rep.passed ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contact forms <-> cone structures on flat tori"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;

  auto add = [&](const std::string& name, const std::string& desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory (defaults beside the config)");
    return sub;
  };

  CLI::App* verify_contact_cmd = add("verify-contact", "check the contact condition on a grid");
  CLI::App* symplectize_cmd = add("symplectize", "emit the twisted symplectization");
  CLI::App* build_cone_cmd = add("build-cone", "sample the induced cone structure");
  CLI::App* check_ample_cmd = add("check-ample", "sweep Schubert witnesses against random planes");
  CLI::App* separate_cmd = add("separate", "run the separation engine on a cone file");
  CLI::App* roundtrip_cmd = add("roundtrip", "full contact -> cone -> contact pipeline");
  CLI::App* verify_cmd = add("verify", "re-verify an emitted certificate (no solver)");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = load_config(config_path, out_dir);
    if (verify_contact_cmd->parsed()) return cmd_verify_contact(cfg);
    if (symplectize_cmd->parsed()) return cmd_symplectize(cfg);
    if (build_cone_cmd->parsed()) return cmd_build_cone(cfg);
    if (check_ample_cmd->parsed()) return cmd_check_ample(cfg);
    if (separate_cmd->parsed()) return cmd_separate(cfg);
    if (roundtrip_cmd->parsed()) return cmd_roundtrip(cfg);
    if (verify_cmd->parsed()) return cmd_verify(cfg);
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SimplexIterationLimit& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const CertificateVerificationError& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return kExitVerify;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
