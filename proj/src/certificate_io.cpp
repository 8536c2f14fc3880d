#include "conecontact/certificate_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace conecontact {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += "\"";
  return out;
}

const char* variant_name(CertificateVariant v) {
  switch (v) {
    case CertificateVariant::PositiveForm: return "positive_form";
    case CertificateVariant::ExactCurrent: return "exact_current";
    case CertificateVariant::NotSalient: return "not_salient";
  }
  return "unknown";
}

}  // namespace

void write_certificate(std::ostream& out, const Certificate& cert,
                       const SeparationProblem& problem,
                       const std::map<std::string, std::string>& provenance) {
  const TorusModel& m = problem.model;
  out << "{\n";
  out << "  \"format\": \"conecontact-certificate v1\",\n";
  out << "  \"variant\": " << quoted(variant_name(cert.variant)) << ",\n";
  out << "  \"model\": {\"dim\": " << m.dim << ", \"band\": " << m.band << ", \"t_axis\": "
      << (m.t_axis ? std::to_string(*m.t_axis) : std::string("null")) << "},\n";
  out << "  \"theta\": [";
  for (int i = 0; i < problem.theta.dim(); ++i)
    out << (i ? ", " : "") << fmt17(problem.theta.component(i));
  out << "],\n";
  out << "  \"band\": " << problem.band << ",\n";
  out << "  \"invariant_sector\": " << (problem.invariant_sector ? "true" : "false") << ",\n";
  out << "  \"symmetries\": [";
  for (size_t s = 0; s < problem.symmetries.size(); ++s) {
    const TorusAction& rho = problem.symmetries[s];
    if (s) out << ", ";
    out << "{\"linear\": [";
    for (int r = 0; r < rho.dim(); ++r) {
      if (r) out << ", ";
      out << "[";
      for (int c = 0; c < rho.dim(); ++c) out << (c ? ", " : "") << rho.linear(r, c);
      out << "]";
    }
    out << "], \"translation\": [";
    for (int r = 0; r < rho.dim(); ++r) out << (r ? ", " : "") << fmt17(rho.translation[r]);
    out << "], \"sign\": " << rho.sign << "}";
  }
  out << "],\n";

  out << "  \"payload\": {";
  switch (cert.variant) {
    case CertificateVariant::PositiveForm: {
      out << "\n    \"margin\": " << fmt17(cert.margin) << ",\n";
      out << "    \"omega\": [";
      bool first = true;
      for (const auto& [key, value] : cert.omega->canonical_modes()) {
        if (!first) out << ",";
        first = false;
        out << "\n      {\"freq\": [";
        for (int i = 0; i < m.dim; ++i) out << (i ? ", " : "") << key.freq[static_cast<size_t>(i)];
        out << "], \"indices\": [";
        auto idx = mask_to_indices(key.mask);
        for (size_t i = 0; i < idx.size(); ++i) out << (i ? ", " : "") << idx[i];
        out << "], \"re\": " << fmt17(value.real()) << ", \"im\": " << fmt17(value.imag()) << "}";
      }
      out << "\n    ]\n  ";
      break;
    }
    case CertificateVariant::ExactCurrent: {
      out << "\n    \"closure_residual\": " << fmt17(cert.closure_residual) << ",\n";
      out << "    \"weights\": [";
      for (size_t i = 0; i < cert.weights.size(); ++i)
        out << (i ? ", " : "") << fmt17(cert.weights[i]);
      out << "]\n  ";
      break;
    }
    case CertificateVariant::NotSalient: {
      out << "\n    \"invisible_generators\": [";
      for (size_t i = 0; i < cert.invisible_generators.size(); ++i)
        out << (i ? ", " : "") << cert.invisible_generators[i];
      out << "]\n  ";
      break;
    }
  }
  out << "},\n";

  VerifyReport rep = verify_certificate(cert, problem);
  out << "  \"residuals\": {\"passed\": " << (rep.passed ? "true" : "false")
      << ", \"d_closed\": " << fmt17(rep.d_closed_residual)
      << ", \"min_pairing\": " << fmt17(rep.min_pairing)
      << ", \"symmetry\": " << fmt17(rep.symmetry_residual)
      << ", \"sector\": " << fmt17(rep.sector_residual)
      << ", \"closure\": " << fmt17(rep.closure_residual) << "},\n";

  out << "  \"grid_provenance\": {";
  bool first = true;
  for (const auto& [k, v] : provenance) {
    if (!first) out << ", ";
    first = false;
    out << quoted(k) << ": " << quoted(v);
  }
  out << "}\n";
  out << "}\n";
}

void write_certificate_file(const std::string& path, const Certificate& cert,
                            const SeparationProblem& problem,
                            const std::map<std::string, std::string>& provenance) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    write_certificate(out, cert, problem, provenance);
  }
  std::filesystem::rename(tmp, path);
}

CertificateDocument read_certificate(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("certificate parse error: ") + e.what());
  }
  if (j.value("format", "") != std::string("conecontact-certificate v1"))
    throw std::runtime_error("certificate parse error: missing format header");

  CertificateDocument doc;
  const auto& jm = j.at("model");
  std::optional<int> t_axis;
  if (!jm.at("t_axis").is_null()) t_axis = jm.at("t_axis").get<int>();
  doc.model = TorusModel(jm.at("dim").get<int>(), jm.at("band").get<int>(), t_axis);

  Eigen::VectorXd theta(doc.model.dim);
  const auto& jt = j.at("theta");
  if (static_cast<int>(jt.size()) != doc.model.dim)
    throw std::runtime_error("certificate parse error: theta arity mismatch");
  for (int i = 0; i < doc.model.dim; ++i) theta[i] = jt.at(static_cast<size_t>(i)).get<double>();
  doc.theta = ConstantOneForm(theta);

  doc.band = j.at("band").get<int>();
  doc.invariant_sector = j.at("invariant_sector").get<bool>();

  for (const auto& js : j.at("symmetries")) {
    int dim = doc.model.dim;
    Eigen::MatrixXi linear(dim, dim);
    const auto& jl = js.at("linear");
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) linear(r, c) = jl.at(static_cast<size_t>(r)).at(static_cast<size_t>(c)).get<int>();
    Eigen::VectorXd tr(dim);
    for (int r = 0; r < dim; ++r) tr[r] = js.at("translation").at(static_cast<size_t>(r)).get<double>();
    doc.symmetries.emplace_back(linear, tr, js.at("sign").get<int>());
  }

  std::string variant = j.at("variant").get<std::string>();
  const auto& payload = j.at("payload");
  if (variant == "positive_form") {
    doc.cert.variant = CertificateVariant::PositiveForm;
    doc.cert.margin = payload.at("margin").get<double>();
    BandForm omega(TorusModel(doc.model.dim, doc.band, doc.model.t_axis), 2);
    for (const auto& entry : payload.at("omega")) {
      Freq f{};
      const auto& jf = entry.at("freq");
      for (int i = 0; i < doc.model.dim; ++i) f[static_cast<size_t>(i)] = jf.at(static_cast<size_t>(i)).get<int>();
      std::vector<int> idx;
      for (const auto& v : entry.at("indices")) idx.push_back(v.get<int>());
      omega.add_coeff(f, indices_to_mask(idx),
                      Complex{entry.at("re").get<double>(), entry.at("im").get<double>()});
    }
    doc.cert.omega = std::move(omega);
  } else if (variant == "exact_current") {
    doc.cert.variant = CertificateVariant::ExactCurrent;
    doc.cert.closure_residual = payload.at("closure_residual").get<double>();
    for (const auto& w : payload.at("weights")) doc.cert.weights.push_back(w.get<double>());
  } else if (variant == "not_salient") {
    doc.cert.variant = CertificateVariant::NotSalient;
    for (const auto& g : payload.at("invisible_generators"))
      doc.cert.invisible_generators.push_back(g.get<size_t>());
  } else {
    throw std::runtime_error("certificate parse error: unknown variant " + variant);
  }

  if (j.contains("grid_provenance"))
    for (const auto& [k, v] : j.at("grid_provenance").items())
      doc.provenance[k] = v.get<std::string>();
  return doc;
}

CertificateDocument read_certificate_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open certificate file: " + path);
  return read_certificate(in);
}

SeparationProblem problem_from_document(const CertificateDocument& doc,
                                        std::vector<DiracGenerator> generators) {
  return SeparationProblem(TorusModel(doc.model.dim, doc.band, doc.model.t_axis), doc.theta,
                           doc.band, std::move(generators), doc.symmetries,
                           doc.invariant_sector);
}

}  // namespace conecontact
