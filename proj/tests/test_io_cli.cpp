#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "conecontact/certificate_io.hpp"
#include "conecontact/contact.hpp"
#include "conecontact/duality.hpp"
#include "oracles.hpp"

using namespace conecontact;
namespace fs = std::filesystem;

namespace {

#ifndef CONECONTACT_BIN
#define CONECONTACT_BIN "conecontact"
#endif

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("conecontact_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

int run_cli(const std::string& args) {
  std::string cmd = std::string(CONECONTACT_BIN) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_alpha_std(const fs::path& p) { write_form_file(p.string(), oracle::alpha_std()); }

void write_json(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("certificate json round-trips through the parser") {
  TorusModel p2(2, 0, 0);
  Bivector dtdx = wedge_vectors(Eigen::VectorXd::Unit(2, 0), Eigen::VectorXd::Unit(2, 1));
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(2);
  SeparationProblem problem(p2, ConstantOneForm::dt(p2), 0,
                            {DiracGenerator(origin, dtdx)}, {}, true);
  Certificate cert = separate(problem);

  std::stringstream buf;
  write_certificate(buf, cert, problem, {{"cone_file", "test.cone"}});
  CertificateDocument doc = read_certificate(buf);
  CHECK(doc.cert.variant == CertificateVariant::PositiveForm);
  CHECK(doc.cert.margin == cert.margin);
  CHECK(coeff_distance(*doc.cert.omega, *cert.omega) == 0.0);
  CHECK(doc.invariant_sector);
  CHECK(doc.provenance.at("cone_file") == "test.cone");

  SeparationProblem back = problem_from_document(doc, problem.generators);
  CHECK(verify_certificate(doc.cert, back).passed);
}

TEST_CASE("not-salient certificates round-trip and re-verify") {
  TorusModel p4(4, 0, 0);
  Bivector exy = wedge_vectors(Eigen::VectorXd::Unit(4, 1), Eigen::VectorXd::Unit(4, 2));
  SeparationProblem problem(p4, ConstantOneForm::dt(p4), 0,
                            {DiracGenerator(Eigen::VectorXd::Zero(4), exy)}, {}, true);
  Certificate cert = separate(problem);
  REQUIRE(cert.variant == CertificateVariant::NotSalient);
  std::stringstream buf;
  write_certificate(buf, cert, problem, {});
  CertificateDocument doc = read_certificate(buf);
  CHECK(doc.cert.variant == CertificateVariant::NotSalient);
  REQUIRE(doc.cert.invisible_generators.size() == 1);
  CHECK(verify_certificate(doc.cert, problem_from_document(doc, problem.generators)).passed);
}

TEST_CASE("certificate writer renders deterministically") {
  TorusModel p2(2, 1, 0);
  Bivector dtdx = wedge_vectors(Eigen::VectorXd::Unit(2, 0), Eigen::VectorXd::Unit(2, 1));
  std::vector<DiracGenerator> gens;
  for (int k = 0; k < 3; ++k) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(2);
    p[1] = 0.7 * k;
    gens.emplace_back(p, dtdx);
  }
  SeparationProblem problem(p2, ConstantOneForm::dt(p2), 1, gens, {}, true);
  Certificate cert = separate(problem);
  std::stringstream b1, b2;
  write_certificate(b1, cert, problem, {{"seed", "1"}});
  write_certificate(b2, cert, problem, {{"seed", "1"}});
  CHECK(b1.str() == b2.str());
}

TEST_CASE("cli: verify-contact on alpha_std and on a degenerate form") {
  TempDir dir;
  write_alpha_std(dir.path / "alpha.form");
  write_json(dir.path / "cfg.json", R"({"form": "alpha.form", "verify_grid": 9})");
  CHECK(run_cli("verify-contact --config " + (dir.path / "cfg.json").string()) == 0);

  TorusModel t3(3, 0);
  write_form_file((dir.path / "dz.form").string(), BandForm::basis(t3, 1u << 2));
  write_json(dir.path / "bad.json", R"({"form": "dz.form", "verify_grid": 5})");
  CHECK(run_cli("verify-contact --config " + (dir.path / "bad.json").string()) == 1);
}

TEST_CASE("cli: malformed inputs exit 2") {
  TempDir dir;
  write_json(dir.path / "broken.json", "{ not json");
  CHECK(run_cli("verify-contact --config " + (dir.path / "broken.json").string()) == 2);

  write_json(dir.path / "missing.json", R"({"verify_grid": 5})");
  CHECK(run_cli("verify-contact --config " + (dir.path / "missing.json").string()) == 2);

  std::ofstream(dir.path / "garbage.form") << "not a form\n";
  write_json(dir.path / "cfg.json", R"({"form": "garbage.form"})");
  CHECK(run_cli("verify-contact --config " + (dir.path / "cfg.json").string()) == 2);
}

TEST_CASE("cli: symplectize then separate an adversarial cone, then verify") {
  TempDir dir;
  write_alpha_std(dir.path / "alpha.form");
  write_json(dir.path / "symp.json", R"({"form": "alpha.form"})");
  CHECK(run_cli("symplectize --config " + (dir.path / "symp.json").string()) == 0);
  CHECK(fs::exists(dir.path / "symplectization.form"));

  // adversarial cone: two opposed generators at the same point of S^1 x T^1
  TorusModel p2(2, 1, 0);
  Bivector dtdx = wedge_vectors(Eigen::VectorXd::Unit(2, 0), Eigen::VectorXd::Unit(2, 1));
  std::vector<ConeSite> sites(1);
  sites[0].point = Eigen::VectorXd::Zero(2);
  sites[0].generators = {dtdx, dtdx * -1.0};
  write_cone_file((dir.path / "opposed.cone").string(), SampledConeStructure(p2, sites));
  write_json(dir.path / "sep.json",
             R"({"cone": "opposed.cone", "theta": "dt", "band": 1, "invariant_sector": true})");
  CHECK(run_cli("separate --config " + (dir.path / "sep.json").string()) == 0);
  CertificateDocument doc = read_certificate_file((dir.path / "certificate.json").string());
  CHECK(doc.cert.variant == CertificateVariant::ExactCurrent);

  // the standalone verifier accepts the emitted file
  write_json(dir.path / "ver.json",
             R"({"certificate": "certificate.json", "cone": "opposed.cone"})");
  CHECK(run_cli("verify --config " + (dir.path / "ver.json").string()) == 0);

  // tampering with the weights must surface as exit 4
  std::string text = slurp(dir.path / "certificate.json");
  auto pos = text.find("\"weights\": [0.5");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 15, "\"weights\": [0.9");
  std::ofstream(dir.path / "certificate.json") << text;
  CHECK(run_cli("verify --config " + (dir.path / "ver.json").string()) == 4);
}

TEST_CASE("cli: roundtrip pipeline is byte-deterministic") {
  TempDir dir;
  write_alpha_std(dir.path / "alpha.form");
  write_json(dir.path / "cfg.json", R"({
    "form": "alpha.form",
    "grid": [3, 3, 3, 4],
    "verify_grid": 7,
    "theta": "dt",
    "band": 1,
    "invariant_sector": true,
    "probes": {"frame": true, "random": 2},
    "seed": 24301
  })");
  std::string cfg = (dir.path / "cfg.json").string();
  CHECK(run_cli("roundtrip --config " + cfg + " --out " + (dir.path / "a").string()) == 0);
  CHECK(run_cli("roundtrip --config " + cfg + " --out " + (dir.path / "b").string()) == 0);
  for (const char* name : {"certificate.json", "cone.txt", "extracted.form", "density.csv"}) {
    CAPTURE(name);
    CHECK(slurp(dir.path / "a" / name) == slurp(dir.path / "b" / name));
    CHECK(!slurp(dir.path / "a" / name).empty());
  }
  // the emitted certificate re-verifies through the no-solver path
  write_json(dir.path / "ver.json", R"({"certificate": "a/certificate.json", "cone": "a/cone.txt"})");
  CHECK(run_cli("verify --config " + (dir.path / "ver.json").string()) == 0);
}

TEST_CASE("cli: check-ample passes on a saturated 2d cone") {
  TempDir dir;
  TorusModel t2(2, 0);
  std::vector<ConeSite> sites(1);
  sites[0].point = Eigen::VectorXd::Zero(2);
  sites[0].generators = {
      wedge_vectors(Eigen::VectorXd::Unit(2, 0), Eigen::VectorXd::Unit(2, 1))};
  write_cone_file((dir.path / "full.cone").string(), SampledConeStructure(t2, sites));
  write_json(dir.path / "cfg.json",
             R"({"cone": "full.cone", "tau_trials": 5, "resolution": 16, "seed": 9})");
  CHECK(run_cli("check-ample --config " + (dir.path / "cfg.json").string()) == 0);
}

TEST_CASE("cli: separating an empty cone exits 2") {
  TempDir dir;
  std::ofstream(dir.path / "empty.cone") << "conecontact-cone v1\ndim 2\nband 1\nt_axis 0\n";
  write_json(dir.path / "cfg.json", R"({"cone": "empty.cone", "theta": "dt", "band": 1})");
  CHECK(run_cli("separate --config " + (dir.path / "cfg.json").string()) == 2);
}

TEST_CASE("cli: check-ample finds witnesses for a reeb cone with tau probes") {
  TempDir dir;
  // single-generator cone misses the disjoint plane: negative control
  TorusModel t4(4, 0);
  std::vector<ConeSite> sites(1);
  sites[0].point = Eigen::VectorXd::Zero(4);
  sites[0].generators = {
      wedge_vectors(Eigen::VectorXd::Unit(4, 0), Eigen::VectorXd::Unit(4, 1))};
  write_cone_file((dir.path / "thin.cone").string(), SampledConeStructure(t4, sites));
  write_json(dir.path / "cfg.json",
             R"({"cone": "thin.cone", "tau_trials": 3, "resolution": 12, "seed": 7})");
  CHECK(run_cli("check-ample --config " + (dir.path / "cfg.json").string()) == 1);
}
