// Text serialization of band forms. One canonical mode per line; decimal
// rendering uses 17 significant digits so round-trips are exact.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "conecontact/band_form.hpp"

namespace conecontact {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw std::runtime_error("form parse error at line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& s, int line) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != trim(s).size() && pos != s.size()) parse_fail(line, "trailing characters in number");
    return v;
  } catch (const std::invalid_argument&) {
    parse_fail(line, "bad number '" + s + "'");
  } catch (const std::out_of_range&) {
    parse_fail(line, "number out of range '" + s + "'");
  }
}

int parse_int(const std::string& s, int line) {
  try {
    size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != trim(s).size() && pos != s.size()) parse_fail(line, "trailing characters in integer");
    return v;
  } catch (const std::exception&) {
    parse_fail(line, "bad integer '" + s + "'");
  }
}

}  // namespace

void write_form(std::ostream& out, const BandForm& form) {
  const TorusModel& m = form.model();
  out << "conecontact-form v1\n";
  out << "dim " << m.dim << "\n";
  out << "band " << m.band << "\n";
  out << "t_axis " << (m.t_axis ? std::to_string(*m.t_axis) : std::string("none")) << "\n";
  out << "degree " << form.degree() << "\n";
  for (const auto& [key, value] : form.canonical_modes()) {
    for (int i = 0; i < m.dim; ++i) {
      if (i) out << ",";
      out << key.freq[static_cast<size_t>(i)];
    }
    out << " | ";
    if (key.mask == 0) {
      out << "-";
    } else {
      auto idx = mask_to_indices(key.mask);
      for (size_t i = 0; i < idx.size(); ++i) {
        if (i) out << "<";
        out << idx[i];
      }
    }
    out << " | " << fmt17(value.real()) << "," << fmt17(value.imag()) << "\n";
  }
}

BandForm read_form(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next_line = [&](bool required) -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      line = trim(line);
      if (!line.empty() && line[0] != '#') return true;
    }
    if (required) parse_fail(lineno, "unexpected end of file");
    return false;
  };

  next_line(true);
  if (line != "conecontact-form v1") parse_fail(lineno, "missing form header");
  auto read_kv = [&](const std::string& key) -> std::string {
    next_line(true);
    auto sp = line.find(' ');
    if (sp == std::string::npos || line.substr(0, sp) != key)
      parse_fail(lineno, "expected '" + key + " <value>'");
    return trim(line.substr(sp + 1));
  };

  int dim = parse_int(read_kv("dim"), lineno);
  int band = parse_int(read_kv("band"), lineno);
  std::string taxis_s = read_kv("t_axis");
  std::optional<int> t_axis;
  if (taxis_s != "none") t_axis = parse_int(taxis_s, lineno);
  int degree = parse_int(read_kv("degree"), lineno);

  TorusModel model(dim, band, t_axis);
  BandForm form(model, degree);

  while (next_line(false)) {
    auto fields = split(line, '|');
    if (fields.size() != 3) parse_fail(lineno, "expected 'freqs | indices | re,im'");
    auto freq_s = split(trim(fields[0]), ',');
    if (static_cast<int>(freq_s.size()) != dim) parse_fail(lineno, "frequency arity mismatch");
    Freq f{};
    for (int i = 0; i < dim; ++i) f[static_cast<size_t>(i)] = parse_int(trim(freq_s[static_cast<size_t>(i)]), lineno);
    if (freq_sup_norm(f) > band) parse_fail(lineno, "frequency exceeds band");

    std::string idx_s = trim(fields[1]);
    IndexMask mask = 0;
    if (idx_s != "-") {
      std::vector<int> idx;
      int prev = -1;
      for (const auto& tok : split(idx_s, '<')) {
        int i = parse_int(trim(tok), lineno);
        if (i < 0 || i >= dim) parse_fail(lineno, "index out of range");
        if (i <= prev) parse_fail(lineno, "indices not strictly increasing");
        idx.push_back(i);
        prev = i;
      }
      mask = indices_to_mask(idx);
    }
    if (mask_grade(mask) != degree) parse_fail(lineno, "multi-index grade != degree");

    auto val_s = split(trim(fields[2]), ',');
    if (val_s.size() != 2) parse_fail(lineno, "expected re,im");
    Complex c{parse_double(trim(val_s[0]), lineno), parse_double(trim(val_s[1]), lineno)};
    form.add_coeff(f, mask, c);
  }
  return form;
}

void write_form_file(const std::string& path, const BandForm& form) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    write_form(out, form);
  }
  std::filesystem::rename(tmp, path);
}

BandForm read_form_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open form file: " + path);
  return read_form(in);
}

}  // namespace conecontact
