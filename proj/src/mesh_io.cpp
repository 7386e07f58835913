#include "fof/geometry.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string_view>

namespace fof {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

// OBJ ------------------------------------------------------------------------

// Parses the vertex index of an OBJ face token `i`, `i/t`, `i//n` or `i/t/n`,
// resolving negative (relative) indices. Returns a 0-based index.
long parse_obj_index(std::string_view token, long vertex_count) {
  const auto slash = token.find('/');
  const std::string_view head = token.substr(0, slash);
  long value = 0;
  const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), value);
  if (ec != std::errc() || ptr != head.data() + head.size() || value == 0) {
    throw FormatError("bad face index '" + std::string(token) + "'");
  }
  return value > 0 ? value - 1 : vertex_count + value;
}

TriangleMesh load_obj(const std::filesystem::path& path, std::istream& in) {
  std::vector<double> coords;
  std::vector<int> indices;
  std::string line;
  std::size_t line_no = 0;
  std::vector<long> polygon;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream record(line);
    std::string tag;
    if (!(record >> tag) || tag[0] == '#') continue;

    if (tag == "v") {
      double xyz[3];
      for (double& c : xyz) {
        if (!(record >> c)) throw FormatError(where(path, line_no) + "malformed vertex record");
      }
      coords.insert(coords.end(), xyz, xyz + 3);
    } else if (tag == "f") {
      polygon.clear();
      const long nv = static_cast<long>(coords.size() / 3);
      std::string token;
      try {
        while (record >> token) polygon.push_back(parse_obj_index(token, nv));
      } catch (const FormatError& e) {
        throw FormatError(where(path, line_no) + e.what());
      }
      if (polygon.size() < 3) {
        throw FormatError(where(path, line_no) + "face with fewer than 3 vertices");
      }
      for (long v : polygon) {
        if (v < 0 || v >= nv) {
          throw FormatError(where(path, line_no) + "face index out of range");
        }
      }
      // Fan triangulation anchored at the first vertex.
      for (std::size_t k = 1; k + 1 < polygon.size(); ++k) {
        indices.push_back(static_cast<int>(polygon[0]));
        indices.push_back(static_cast<int>(polygon[k]));
        indices.push_back(static_cast<int>(polygon[k + 1]));
      }
    }
    // Normals, texture coordinates, groups and materials are ignored.
  }

  TriangleMesh mesh;
  mesh.vertices = Eigen::Map<const VertexMatrix>(coords.data(),
                                                 static_cast<Eigen::Index>(coords.size() / 3), 3);
  mesh.faces = Eigen::Map<const FaceMatrix>(indices.data(),
                                            static_cast<Eigen::Index>(indices.size() / 3), 3);
  return mesh;
}

// PLY ------------------------------------------------------------------------

enum class PlyFormat { Ascii, BinaryLittleEndian };

struct PlyProperty {
  std::string name;
  std::string type;        // scalar type, or list item type
  std::string count_type;  // non-empty for list properties
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

std::size_t ply_type_size(const std::string& type) {
  if (type == "char" || type == "uchar" || type == "int8" || type == "uint8") return 1;
  if (type == "short" || type == "ushort" || type == "int16" || type == "uint16") return 2;
  if (type == "int" || type == "uint" || type == "int32" || type == "uint32" ||
      type == "float" || type == "float32")
    return 4;
  if (type == "double" || type == "float64") return 8;
  throw FormatError("unknown PLY property type '" + type + "'");
}

template <typename T>
T read_le(std::istream& in) {
  static_assert(std::endian::native == std::endian::little, "big-endian hosts unsupported");
  T value;
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw FormatError("truncated binary PLY payload");
  }
  return value;
}

double read_binary_scalar(std::istream& in, const std::string& type) {
  if (type == "char" || type == "int8") return read_le<std::int8_t>(in);
  if (type == "uchar" || type == "uint8") return read_le<std::uint8_t>(in);
  if (type == "short" || type == "int16") return read_le<std::int16_t>(in);
  if (type == "ushort" || type == "uint16") return read_le<std::uint16_t>(in);
  if (type == "int" || type == "int32") return read_le<std::int32_t>(in);
  if (type == "uint" || type == "uint32") return read_le<std::uint32_t>(in);
  if (type == "float" || type == "float32") return read_le<float>(in);
  if (type == "double" || type == "float64") return read_le<double>(in);
  throw FormatError("unknown PLY property type '" + type + "'");
}

TriangleMesh load_ply(const std::filesystem::path& path, std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || lower(line).rfind("ply", 0) != 0) {
    throw FormatError(path.string() + ": missing 'ply' magic");
  }
  PlyFormat format = PlyFormat::Ascii;
  std::vector<PlyElement> elements;
  bool have_format = false;
  while (true) {
    if (!std::getline(in, line)) throw FormatError(path.string() + ": unterminated PLY header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream record(line);
    std::string tag;
    record >> tag;
    if (tag == "end_header") break;
    if (tag == "format") {
      std::string kind, version;
      record >> kind >> version;
      if (kind == "ascii") {
        format = PlyFormat::Ascii;
      } else if (kind == "binary_little_endian") {
        format = PlyFormat::BinaryLittleEndian;
      } else {
        throw FormatError(path.string() + ": unsupported PLY format '" + kind + "'");
      }
      have_format = true;
    } else if (tag == "element") {
      PlyElement e;
      if (!(record >> e.name >> e.count)) throw FormatError(path.string() + ": bad element line");
      elements.push_back(e);
    } else if (tag == "property") {
      if (elements.empty()) throw FormatError(path.string() + ": property before element");
      PlyProperty p;
      std::string type;
      record >> type;
      if (type == "list") {
        record >> p.count_type >> p.type >> p.name;
      } else {
        p.type = type;
        record >> p.name;
      }
      if (p.name.empty()) throw FormatError(path.string() + ": bad property line");
      elements.back().properties.push_back(p);
    }
    // comment / obj_info lines are ignored
  }
  if (!have_format) throw FormatError(path.string() + ": PLY header has no format line");

  std::vector<double> coords;
  std::vector<int> indices;
  std::size_t vertex_count = 0;

  for (const PlyElement& element : elements) {
    const bool is_vertex = element.name == "vertex";
    const bool is_face = element.name == "face";
    int axis_of[3] = {-1, -1, -1};
    int face_list = -1;
    for (std::size_t k = 0; k < element.properties.size(); ++k) {
      const auto& p = element.properties[k];
      if (is_vertex && p.count_type.empty()) {
        if (p.name == "x") axis_of[0] = static_cast<int>(k);
        if (p.name == "y") axis_of[1] = static_cast<int>(k);
        if (p.name == "z") axis_of[2] = static_cast<int>(k);
      }
      if (is_face && !p.count_type.empty() &&
          (p.name == "vertex_indices" || p.name == "vertex_index")) {
        face_list = static_cast<int>(k);
      }
    }
    if (is_vertex && (axis_of[0] < 0 || axis_of[1] < 0 || axis_of[2] < 0)) {
      throw FormatError(path.string() + ": vertex element lacks x/y/z");
    }
    if (is_face && face_list < 0) {
      throw FormatError(path.string() + ": face element lacks vertex_indices");
    }
    if (is_vertex) vertex_count = element.count;

    std::vector<long> polygon;
    for (std::size_t row = 0; row < element.count; ++row) {
      std::istringstream ascii_row;
      if (format == PlyFormat::Ascii) {
        do {
          if (!std::getline(in, line)) throw FormatError(path.string() + ": truncated PLY body");
        } while (line.find_first_not_of(" \t\r") == std::string::npos);
        ascii_row.str(line);
      }
      auto next_value = [&](const std::string& type) -> double {
        if (format == PlyFormat::BinaryLittleEndian) return read_binary_scalar(in, type);
        double v;
        if (!(ascii_row >> v)) throw FormatError(path.string() + ": malformed PLY record");
        return v;
      };

      double xyz[3] = {0, 0, 0};
      for (std::size_t k = 0; k < element.properties.size(); ++k) {
        const auto& p = element.properties[k];
        if (p.count_type.empty()) {
          const double v = next_value(p.type);
          for (int a = 0; a < 3; ++a) {
            if (axis_of[a] == static_cast<int>(k)) xyz[a] = v;
          }
          continue;
        }
        const double n = next_value(p.count_type);
        if (n < 0) throw FormatError(path.string() + ": negative list length");
        const auto len = static_cast<std::size_t>(n);
        polygon.clear();
        for (std::size_t q = 0; q < len; ++q) {
          polygon.push_back(static_cast<long>(next_value(p.type)));
        }
        if (is_face && static_cast<int>(k) == face_list) {
          if (polygon.size() < 3) throw FormatError(path.string() + ": face with < 3 vertices");
          for (long v : polygon) {
            if (v < 0 || static_cast<std::size_t>(v) >= vertex_count) {
              throw FormatError(path.string() + ": face index out of range");
            }
          }
          for (std::size_t q = 1; q + 1 < polygon.size(); ++q) {
            indices.push_back(static_cast<int>(polygon[0]));
            indices.push_back(static_cast<int>(polygon[q]));
            indices.push_back(static_cast<int>(polygon[q + 1]));
          }
        }
      }
      if (is_vertex) coords.insert(coords.end(), xyz, xyz + 3);
    }
  }

  TriangleMesh mesh;
  mesh.vertices = Eigen::Map<const VertexMatrix>(coords.data(),
                                                 static_cast<Eigen::Index>(coords.size() / 3), 3);
  mesh.faces = Eigen::Map<const FaceMatrix>(indices.data(),
                                            static_cast<Eigen::Index>(indices.size() / 3), 3);
  return mesh;
}

}  // namespace

TriangleMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open mesh file " + path.string());

  char magic[4] = {};
  in.read(magic, 3);
  in.clear();
  in.seekg(0);
  TriangleMesh mesh = (lower(std::string(magic, 3)) == "ply") ? load_ply(path, in)
                                                              : load_obj(path, in);
  if (in.bad()) throw IoError("read failure on " + path.string());
  try {
    validate_mesh(mesh);
  } catch (const std::invalid_argument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return mesh;
}

void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path) {
  validate_mesh(mesh);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write mesh file " + path.string());
  out << std::setprecision(17);
  for (Eigen::Index v = 0; v < mesh.num_vertices(); ++v) {
    out << "v " << mesh.vertices(v, 0) << ' ' << mesh.vertices(v, 1) << ' '
        << mesh.vertices(v, 2) << '\n';
  }
  for (Eigen::Index f = 0; f < mesh.num_faces(); ++f) {
    out << "f " << mesh.faces(f, 0) + 1 << ' ' << mesh.faces(f, 1) + 1 << ' '
        << mesh.faces(f, 2) + 1 << '\n';
  }
  out.flush();
  if (!out) throw IoError("write failure on " + path.string());
}

}  // namespace fof
