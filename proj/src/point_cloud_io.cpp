#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

#include "surfpde/error.hpp"
#include "surfpde/geometry.hpp"

namespace surfpde {

using Eigen::Vector3d;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Parses a separated list of doubles; returns false on any malformed token.
bool parse_numbers(std::string_view line, char sep, std::vector<double>& out) {
  out.clear();
  while (true) {
    line = trim(line);
    std::size_t end = sep == ' ' ? line.find_first_of(" \t") : line.find(sep);
    std::string_view tok = trim(line.substr(0, end));
    if (tok.empty()) return false;
    if (tok.front() == '+') tok.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) return false;
    out.push_back(v);
    if (end == std::string_view::npos) return true;
    line.remove_prefix(end + 1);
    if (sep == ' ' && trim(line).empty()) return true;
  }
}

SurfaceNodeSet finish(std::vector<Vector3d> pts, std::vector<Vector3d> nrm, bool has_normals,
                      std::size_t k_nn, const std::string& what) {
  if (pts.size() < 4) throw InputError(what + ": need at least 4 points");
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (!pts[i].allFinite() || (has_normals && !nrm[i].allFinite()))
      throw InputError(what + ": non-finite value for point " + std::to_string(i));
  if (has_normals) {
    for (auto& n : nrm) {
      const double len = n.norm();
      if (len == 0.0) throw InputError(what + ": zero-length normal");
      if (std::abs(len - 1.0) > 1e-12) n /= len;
    }
  } else {
    nrm = estimate_normals(pts, std::min(k_nn, pts.size() - 1));
  }
  return SurfaceNodeSet(3, std::move(pts), std::move(nrm));
}

SurfaceNodeSet load_csv(const std::filesystem::path& path, std::size_t k_nn) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<Vector3d> pts, nrm;
  std::vector<double> vals;
  std::string line;
  std::size_t lineno = 0, columns = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim(line);
    if (sv.empty()) continue;
    if (!parse_numbers(sv, ',', vals)) {
      bool header = first_content &&
                    std::any_of(sv.begin(), sv.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); });
      first_content = false;
      if (header) continue;
      throw InputError(path.string() + ": line " + std::to_string(lineno) + ": malformed row");
    }
    first_content = false;
    if (vals.size() != 3 && vals.size() != 6)
      throw InputError(path.string() + ": line " + std::to_string(lineno) + ": expected 3 or 6 columns");
    if (columns == 0) columns = vals.size();
    if (vals.size() != columns)
      throw InputError(path.string() + ": line " + std::to_string(lineno) + ": inconsistent column count");
    pts.emplace_back(vals[0], vals[1], vals[2]);
    if (columns == 6) nrm.emplace_back(vals[3], vals[4], vals[5]);
  }
  return finish(std::move(pts), std::move(nrm), columns == 6, k_nn, path.string());
}

SurfaceNodeSet load_ply(const std::filesystem::path& path, std::size_t k_nn) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<std::string> props;
  };
  std::vector<Element> elements;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw InputError(path.string() + ": line " + std::to_string(lineno) + ": " + msg);
  };

  std::getline(in, line);
  ++lineno;
  if (trim(line) != "ply") fail("missing 'ply' magic");
  bool ascii = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    if (word == "format") {
      std::string fmt;
      ss >> fmt;
      ascii = fmt == "ascii";
    } else if (word == "element") {
      Element e;
      ss >> e.name >> e.count;
      if (!ss) fail("bad element line");
      elements.push_back(std::move(e));
    } else if (word == "property") {
      if (elements.empty()) fail("property before element");
      std::string type, name;
      ss >> type;
      if (type == "list") {
        std::string a, b;
        ss >> a >> b >> name;
      } else {
        ss >> name;
      }
      elements.back().props.push_back(name);
    } else if (word == "end_header") {
      break;
    }
  }
  if (!ascii) fail("only ASCII PLY is supported");

  std::vector<Vector3d> pts, nrm;
  bool has_normals = false;
  std::vector<double> vals;
  for (const auto& e : elements) {
    if (e.name != "vertex") {
      for (std::size_t i = 0; i < e.count; ++i) {
        if (!std::getline(in, line)) fail("unexpected end of file");
        ++lineno;
      }
      continue;
    }
    auto col = [&](const char* name) -> int {
      for (std::size_t c = 0; c < e.props.size(); ++c)
        if (e.props[c] == name) return static_cast<int>(c);
      return -1;
    };
    const int cx = col("x"), cy = col("y"), cz = col("z");
    const int cnx = col("nx"), cny = col("ny"), cnz = col("nz");
    if (cx < 0 || cy < 0 || cz < 0) fail("vertex element lacks x, y, z");
    has_normals = cnx >= 0 && cny >= 0 && cnz >= 0;
    for (std::size_t i = 0; i < e.count; ++i) {
      if (!std::getline(in, line)) fail("unexpected end of file");
      ++lineno;
      if (!parse_numbers(trim(line), ' ', vals) || vals.size() < e.props.size()) fail("malformed vertex row");
      pts.emplace_back(vals[cx], vals[cy], vals[cz]);
      if (has_normals) nrm.emplace_back(vals[cnx], vals[cny], vals[cnz]);
    }
  }
  return finish(std::move(pts), std::move(nrm), has_normals, k_nn, path.string());
}

}  // namespace

SurfaceNodeSet load_point_cloud(const std::filesystem::path& path, PointCloudFormat format, std::size_t k_nn) {
  return format == PointCloudFormat::ply ? load_ply(path, k_nn) : load_csv(path, k_nn);
}

void write_ply(const std::filesystem::path& path, const SurfaceNodeSet& nodes, std::span<const NamedField> fields) {
  for (const auto& f : fields)
    if (f.values.size() != nodes.size()) throw InputError("write_ply: field '" + f.name + "' has wrong length");
  std::FILE* fp = std::fopen(path.string().c_str(), "w");
  if (!fp) throw InputError("cannot write " + path.string());
  std::fprintf(fp, "ply\nformat ascii 1.0\nelement vertex %zu\n", nodes.size());
  std::fprintf(fp, "property double x\nproperty double y\nproperty double z\n");
  std::fprintf(fp, "property double nx\nproperty double ny\nproperty double nz\n");
  for (const auto& f : fields) std::fprintf(fp, "property double %s\n", f.name.c_str());
  std::fprintf(fp, "end_header\n");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& p = nodes.point(i);
    const auto& n = nodes.normal(i);
    std::fprintf(fp, "%.17g %.17g %.17g %.17g %.17g %.17g", p.x(), p.y(), p.z(), n.x(), n.y(), n.z());
    for (const auto& f : fields) std::fprintf(fp, " %.17g", f.values[i]);
    std::fprintf(fp, "\n");
  }
  std::fclose(fp);
}

void write_xyz_csv(const std::filesystem::path& path, const SurfaceNodeSet& nodes) {
  std::FILE* fp = std::fopen(path.string().c_str(), "w");
  if (!fp) throw InputError("cannot write " + path.string());
  std::fprintf(fp, "x,y,z,nx,ny,nz\n");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& p = nodes.point(i);
    const auto& n = nodes.normal(i);
    std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", p.x(), p.y(), p.z(), n.x(), n.y(), n.z());
  }
  std::fclose(fp);
}

}  // namespace surfpde
