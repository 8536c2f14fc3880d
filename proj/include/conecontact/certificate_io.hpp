// Certificate files: JSON with deterministic key order and 17-significant-
// digit decimal rendering, so identical runs produce identical bytes.
#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "conecontact/duality.hpp"

namespace conecontact {

struct CertificateDocument {
  Certificate cert;
  TorusModel model{1, 0};
  ConstantOneForm theta = ConstantOneForm::zero(1);
  int band = 0;
  bool invariant_sector = false;
  std::vector<TorusAction> symmetries;
  std::map<std::string, std::string> provenance;
};

void write_certificate(std::ostream& out, const Certificate& cert,
                       const SeparationProblem& problem,
                       const std::map<std::string, std::string>& provenance);
void write_certificate_file(const std::string& path, const Certificate& cert,
                            const SeparationProblem& problem,
                            const std::map<std::string, std::string>& provenance);

CertificateDocument read_certificate(std::istream& in);
CertificateDocument read_certificate_file(const std::string& path);

// Rebuilds the separation problem the certificate refers to; the generators
// come from the cone file recorded in the provenance.
SeparationProblem problem_from_document(const CertificateDocument& doc,
                                        std::vector<DiracGenerator> generators);

}  // namespace conecontact
