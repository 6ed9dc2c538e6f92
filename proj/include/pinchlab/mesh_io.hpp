#pragma once

// OFF and OBJ readers/writers (triangles only). Coordinates are written with
// 17 significant digits so a save/load cycle is bit-exact.

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pinchlab/errors.hpp"
#include "pinchlab/mesh.hpp"

namespace pinchlab {

enum class MeshFormat { off, obj };

inline MeshFormat format_from_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".off") return MeshFormat::off;
  if (ext == ".obj") return MeshFormat::obj;
  throw InputError("cannot infer mesh format from '" + path.string() + "' (use .off or .obj)");
}

namespace detail {

inline std::string fmt_double(double x, int significant_digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", significant_digits, x);
  return buf;
}

// Whitespace/comment-skipping token stream for OFF.
class TokenStream {
 public:
  explicit TokenStream(std::istream& in) : in_(in) {}

  std::string next(const char* what) {
    std::string tok;
    while (in_ >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in_, rest);
        continue;
      }
      return tok;
    }
    throw InputError(std::string("unexpected end of file while reading ") + what);
  }

  long next_int(const char* what) {
    const std::string tok = next(what);
    try {
      std::size_t pos = 0;
      long v = std::stol(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw InputError(std::string("expected integer for ") + what + ", got '" + tok + "'");
    }
  }

  double next_double(const char* what) {
    const std::string tok = next(what);
    try {
      std::size_t pos = 0;
      double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw InputError(std::string("expected number for ") + what + ", got '" + tok + "'");
    }
  }

 private:
  std::istream& in_;
};

inline Mesh parse_off(std::istream& in, const std::string& origin) {
  TokenStream ts(in);
  const std::string magic = ts.next("OFF header");
  if (magic != "OFF") throw InputError(origin + ": not an OFF file (header '" + magic + "')");
  const long nv = ts.next_int("vertex count");
  const long nf = ts.next_int("face count");
  ts.next_int("edge count");  // conventionally present, ignored
  if (nv <= 0 || nf <= 0) throw InputError(origin + ": non-positive vertex or face count");

  Mesh mesh;
  mesh.vertices.resize(nv);
  for (long v = 0; v < nv; ++v)
    for (int c = 0; c < 3; ++c) mesh.vertices[v][c] = ts.next_double("vertex coordinate");
  mesh.faces.resize(nf);
  for (long f = 0; f < nf; ++f) {
    const long arity = ts.next_int("face vertex count");
    if (arity != 3)
      throw InputError(origin + ": face " + std::to_string(f) + " has " +
                       std::to_string(arity) + " vertices; only triangles are supported");
    for (int c = 0; c < 3; ++c)
      mesh.faces[f][c] = static_cast<int>(ts.next_int("face vertex index"));
  }
  return mesh;
}

inline Mesh parse_obj(std::istream& in, const std::string& origin,
                      std::vector<std::string>* warnings) {
  Mesh mesh;
  std::set<std::string> warned_records;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string record;
    if (!(ls >> record) || record[0] == '#') continue;
    if (record == "v") {
      Vec3 p;
      if (!(ls >> p[0] >> p[1] >> p[2]))
        throw InputError(origin + ":" + std::to_string(lineno) + ": malformed vertex record");
      mesh.vertices.push_back(p);
    } else if (record == "f") {
      std::vector<int> idx;
      std::string corner;
      while (ls >> corner) {
        // accept i, i/t, i//n, i/t/n; only the vertex index is used
        const std::string head = corner.substr(0, corner.find('/'));
        try {
          std::size_t pos = 0;
          long v = std::stol(head, &pos);
          if (pos != head.size() || v <= 0) throw std::invalid_argument(head);
          idx.push_back(static_cast<int>(v - 1));
        } catch (const std::exception&) {
          throw InputError(origin + ":" + std::to_string(lineno) +
                           ": malformed face corner '" + corner + "'");
        }
      }
      if (idx.size() != 3)
        throw InputError(origin + ":" + std::to_string(lineno) + ": face has " +
                         std::to_string(idx.size()) + " vertices; only triangles are supported");
      mesh.faces.push_back({idx[0], idx[1], idx[2]});
    } else if (warned_records.insert(record).second) {
      const std::string msg = origin + ": ignoring OBJ record type '" + record + "'";
      if (warnings) warnings->push_back(msg);
    }
  }
  if (mesh.vertices.empty() || mesh.faces.empty())
    throw InputError(origin + ": no vertices or no faces found");
  return mesh;
}

}  // namespace detail

/// Loads and validates a mesh. Unsupported OBJ record types are skipped and
/// reported through `warnings` when given.
inline Mesh load_mesh(const std::filesystem::path& path, MeshFormat format,
                      std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  Mesh mesh = format == MeshFormat::off ? detail::parse_off(in, path.string())
                                        : detail::parse_obj(in, path.string(), warnings);
  mesh.name = path.stem().string();
  validate_mesh(mesh);
  return mesh;
}

inline Mesh load_mesh(const std::filesystem::path& path,
                      std::vector<std::string>* warnings = nullptr) {
  return load_mesh(path, format_from_path(path), warnings);
}

inline void save_mesh(const Mesh& mesh, const std::filesystem::path& path, MeshFormat format) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  if (format == MeshFormat::off) {
    out << "OFF\n" << mesh.vertex_count() << ' ' << mesh.face_count() << " 0\n";
    for (const Vec3& v : mesh.vertices)
      out << detail::fmt_double(v[0], 17) << ' ' << detail::fmt_double(v[1], 17) << ' '
          << detail::fmt_double(v[2], 17) << '\n';
    for (const auto& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  } else {
    for (const Vec3& v : mesh.vertices)
      out << "v " << detail::fmt_double(v[0], 17) << ' ' << detail::fmt_double(v[1], 17) << ' '
          << detail::fmt_double(v[2], 17) << '\n';
    for (const auto& f : mesh.faces)
      out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
  if (!out) throw InputError("write failed for '" + path.string() + "'");
}

inline void save_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  save_mesh(mesh, path, format_from_path(path));
}

}  // namespace pinchlab
