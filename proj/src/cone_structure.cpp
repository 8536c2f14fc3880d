#include "conecontact/cone_structure.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "conecontact/simplex.hpp"

namespace conecontact {

SampledConeStructure::SampledConeStructure(TorusModel model, std::vector<ConeSite> sites)
    : model_(model), sites_(std::move(sites)) {
  for (auto& site : sites_) {
    if (site.point.size() != model_.dim)
      throw std::invalid_argument("SampledConeStructure: point dimension mismatch");
    site.point = wrap_point(site.point);
    if (site.generators.empty())
      throw std::invalid_argument("SampledConeStructure: site without generators");
    for (auto& g : site.generators) {
      if (g.dim() != model_.dim)
        throw std::invalid_argument("SampledConeStructure: generator dimension mismatch");
      double n = g.norm();
      if (n < 1e-8 || n > 1e8)
        throw std::invalid_argument("SampledConeStructure: generator norm outside [1e-8, 1e8]");
      // skip the division on already-unit input so round-trips are bit-exact
      if (std::abs(n - 1.0) > 1e-12) g = g * (1.0 / n);
    }
  }
}

size_t SampledConeStructure::generator_count() const {
  size_t n = 0;
  for (const auto& s : sites_) n += s.generators.size();
  return n;
}

SampledConeStructure cone_from_acs(const TorusModel& model, const AcsField& j_field,
                                   const GridSpec& grid, const ProbeSpec& probes,
                                   double acs_tol) {
  if (grid.dim() != model.dim)
    throw std::invalid_argument("cone_from_acs: grid dimension mismatch");
  const int dim = model.dim;
  std::vector<Eigen::VectorXd> shared;
  if (probes.shared_random && probes.random_per_site > 0) {
    Rng rng(probes.seed);
    for (int r = 0; r < probes.random_per_site; ++r) shared.push_back(rng.unit_vector(dim));
  }
  std::vector<ConeSite> sites;
  sites.reserve(grid.size());
  for (size_t idx = 0; idx < grid.size(); ++idx) {
    Eigen::VectorXd p = grid.point(idx);
    Eigen::MatrixXd j = j_field(p);
    if (j.rows() != dim || j.cols() != dim)
      throw std::invalid_argument("cone_from_acs: J has wrong shape");
    double residual =
        (j * j + Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();
    if (residual > acs_tol) {
      std::ostringstream msg;
      msg << "cone_from_acs: J^2 != -I at point (";
      for (int i = 0; i < dim; ++i) msg << (i ? "," : "") << p[i];
      msg << "), residual " << residual;
      throw std::runtime_error(msg.str());
    }

    std::vector<Eigen::VectorXd> vs;
    if (probes.frame)
      for (int i = 0; i < dim; ++i) vs.push_back(Eigen::VectorXd::Unit(dim, i));
    if (probes.shared_random) {
      vs.insert(vs.end(), shared.begin(), shared.end());
    } else if (probes.random_per_site > 0) {
      Rng rng(probes.seed ^ (0x9E3779B97F4A7C15ull * (idx + 1)));
      for (int r = 0; r < probes.random_per_site; ++r) vs.push_back(rng.unit_vector(dim));
    }
    for (const auto& v : probes.extra) vs.push_back(v);
    if (vs.empty()) throw std::invalid_argument("cone_from_acs: empty probe set");

    ConeSite site;
    site.point = p;
    for (const auto& v : vs) site.generators.push_back(wedge_vectors(v, j * v));
    sites.push_back(std::move(site));
  }
  return SampledConeStructure(model, std::move(sites));
}

double positivity_margin(const BandForm& form, const SampledConeStructure& cone) {
  if (!form.model().same_space(cone.model()))
    throw std::invalid_argument("positivity_margin: model mismatch");
  if (form.degree() != 2)
    throw std::invalid_argument("positivity_margin: degree-2 form required");
  double margin = 0;
  bool first = true;
  for (const auto& site : cone.sites())
    for (const auto& g : site.generators) {
      double v = pair_dirac(form, site.point, g);
      if (first || v < margin) margin = v;
      first = false;
    }
  return margin;
}

EquivarianceReport check_equivariance(const SampledConeStructure& cone,
                                      const TorusAction& action, double tol) {
  if (action.dim() != cone.model().dim)
    throw std::invalid_argument("check_equivariance: dimension mismatch");
  // index sites by quantized coordinates
  auto quantize = [](const Eigen::VectorXd& p) {
    std::vector<long long> q(static_cast<size_t>(p.size()));
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      double x = wrap_angle(p[i]);
      long long k = std::llround(x / kTwoPi * 1e8);
      if (k == 100000000ll) k = 0;
      q[static_cast<size_t>(i)] = k;
    }
    return q;
  };
  std::map<std::vector<long long>, size_t> index;
  for (size_t s = 0; s < cone.sites().size(); ++s)
    index[quantize(cone.sites()[s].point)] = s;

  Eigen::MatrixXd l = action.linear.cast<double>();
  EquivarianceReport report;
  for (size_t s = 0; s < cone.sites().size(); ++s) {
    const auto& site = cone.sites()[s];
    Eigen::VectorXd q = action.apply(site.point);
    auto it = index.find(quantize(q));
    if (it == index.end())
      throw std::runtime_error("check_equivariance: grid is not invariant under the action");
    const auto& image_site = cone.sites()[it->second];

    const int nb = Bivector::packed_size(cone.model().dim);
    Eigen::MatrixXd h(nb, static_cast<Eigen::Index>(image_site.generators.size()));
    for (size_t c = 0; c < image_site.generators.size(); ++c)
      for (int k = 0; k < nb; ++k) h(k, static_cast<Eigen::Index>(c)) = image_site.generators[c].packed()[static_cast<size_t>(k)];

    for (size_t gi = 0; gi < site.generators.size(); ++gi) {
      Bivector image = site.generators[gi].pushforward(l) * static_cast<double>(action.sign);
      double n = image.norm();
      if (n < 1e-14) continue;
      image = image * (1.0 / n);
      Eigen::VectorXd target(nb);
      for (int k = 0; k < nb; ++k) target[k] = image.packed()[static_cast<size_t>(k)];
      double violation = l1_distance_to_cone(h, target);
      if (violation > report.max_violation) {
        report.max_violation = violation;
        report.worst_site = s;
        report.worst_generator = static_cast<int>(gi);
      }
    }
  }
  report.passed = report.max_violation <= tol;
  return report;
}

std::vector<DiracGenerator> dirac_generators(const SampledConeStructure& cone) {
  std::vector<DiracGenerator> out;
  out.reserve(cone.generator_count());
  for (const auto& site : cone.sites())
    for (const auto& g : site.generators) out.emplace_back(site.point, g);
  return out;
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw std::runtime_error("cone parse error at line " + std::to_string(line) + ": " + what);
}

}  // namespace

void write_cone(std::ostream& out, const SampledConeStructure& cone) {
  const TorusModel& m = cone.model();
  out << "conecontact-cone v1\n";
  out << "dim " << m.dim << "\n";
  out << "band " << m.band << "\n";
  out << "t_axis " << (m.t_axis ? std::to_string(*m.t_axis) : std::string("none")) << "\n";
  for (const auto& site : cone.sites()) {
    for (const auto& g : site.generators) {
      for (int i = 0; i < m.dim; ++i) {
        if (i) out << ",";
        out << fmt17(site.point[i]);
      }
      out << " | ";
      bool first = true;
      for (int i = 0; i < m.dim; ++i)
        for (int j = i + 1; j < m.dim; ++j) {
          double v = g.at(i, j);
          if (v == 0.0) continue;
          if (!first) out << ";";
          out << i << "<" << j << ":" << fmt17(v);
          first = false;
        }
      out << "\n";
    }
  }
}

SampledConeStructure read_cone(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next_line = [&](bool required) -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      size_t a = line.find_first_not_of(" \t\r\n");
      if (a == std::string::npos) continue;
      size_t b = line.find_last_not_of(" \t\r\n");
      line = line.substr(a, b - a + 1);
      if (!line.empty() && line[0] != '#') return true;
    }
    if (required) parse_fail(lineno, "unexpected end of file");
    return false;
  };
  next_line(true);
  if (line != "conecontact-cone v1") parse_fail(lineno, "missing cone header");
  auto read_kv = [&](const std::string& key) -> std::string {
    next_line(true);
    auto sp = line.find(' ');
    if (sp == std::string::npos || line.substr(0, sp) != key)
      parse_fail(lineno, "expected '" + key + " <value>'");
    return line.substr(sp + 1);
  };
  int dim = std::stoi(read_kv("dim"));
  int band = std::stoi(read_kv("band"));
  std::string taxis_s = read_kv("t_axis");
  std::optional<int> t_axis;
  if (taxis_s != "none") t_axis = std::stoi(taxis_s);
  TorusModel model(dim, band, t_axis);

  std::vector<ConeSite> sites;
  while (next_line(false)) {
    auto bar = line.find('|');
    if (bar == std::string::npos) parse_fail(lineno, "expected 'point | entries'");
    std::string point_s = line.substr(0, bar);
    std::string entries_s = line.substr(bar + 1);

    Eigen::VectorXd p(dim);
    {
      std::istringstream ps(point_s);
      std::string tok;
      int i = 0;
      while (std::getline(ps, tok, ',')) {
        if (i >= dim) parse_fail(lineno, "too many point coordinates");
        try {
          p[i++] = std::stod(tok);
        } catch (const std::exception&) {
          parse_fail(lineno, "bad coordinate '" + tok + "'");
        }
      }
      if (i != dim) parse_fail(lineno, "point arity mismatch");
    }

    Bivector g(dim);
    {
      std::istringstream es(entries_s);
      std::string tok;
      while (std::getline(es, tok, ';')) {
        auto lt = tok.find('<');
        auto colon = tok.find(':', lt == std::string::npos ? 0 : lt);
        if (lt == std::string::npos || colon == std::string::npos)
          parse_fail(lineno, "expected 'i<j:val' entry");
        try {
          int i = std::stoi(tok.substr(0, lt));
          int j = std::stoi(tok.substr(lt + 1, colon - lt - 1));
          double v = std::stod(tok.substr(colon + 1));
          g.at(i, j) = v;
        } catch (const std::exception&) {
          parse_fail(lineno, "bad entry '" + tok + "'");
        }
      }
    }
    if (g.is_zero(0.0)) parse_fail(lineno, "zero generator");

    // group consecutive identical points into one site
    if (!sites.empty() && (sites.back().point - wrap_point(p)).lpNorm<Eigen::Infinity>() == 0.0) {
      sites.back().generators.push_back(g);
    } else {
      ConeSite site;
      site.point = wrap_point(p);
      site.generators.push_back(g);
      sites.push_back(std::move(site));
    }
  }
  return SampledConeStructure(model, std::move(sites));
}

void write_cone_file(const std::string& path, const SampledConeStructure& cone) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    write_cone(out, cone);
  }
  std::filesystem::rename(tmp, path);
}

SampledConeStructure read_cone_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open cone file: " + path);
  return read_cone(in);
}

}  // namespace conecontact
