#pragma once

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "convnade/lowdisc/patch.hpp"

namespace convnade {

// Plain-text patch file:
//   # kind=<random|ld> P=<n> m=<m> seed=<s>
//   one 1-based index per line, ascending

inline void write_patch(std::ostream& os, const PixelPatch& patch) {
  int m = patch.m;
  if (m < 0) {
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(patch.pixel_count))));
    m = side * side == patch.pixel_count && is_power_of_two(side) ? log2_exact(side) : -1;
  }
  os << "# kind=" << to_string(patch.kind) << " P=" << patch.size() << " m=" << m << " seed=" << patch.seed << '\n';
  for (std::size_t idx : patch.sorted()) os << idx << '\n';
}

inline void write_patch_file(const std::string& path, const PixelPatch& patch) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_patch(os, patch);
}

inline PixelPatch read_patch(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw std::runtime_error("patch file: missing header line");
  std::map<std::string, std::string> fields;
  std::istringstream hs(line.substr(2));
  for (std::string tok; hs >> tok;) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw std::runtime_error("patch file: malformed header field '" + tok + "'");
    fields[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  for (const char* key : {"kind", "P", "m", "seed"}) {
    if (!fields.count(key)) throw std::runtime_error(std::string("patch file: header lacks ") + key);
  }
  PixelPatch p;
  p.kind = parse_patch_kind(fields["kind"]);
  p.seed = std::stoull(fields["seed"]);
  const int m = std::stoi(fields["m"]);
  const auto declared = std::stoull(fields["P"]);
  for (std::string l; std::getline(is, l);) {
    if (l.empty()) continue;
    p.indices.push_back(std::stoull(l));
  }
  if (p.indices.size() != declared) {
    throw std::runtime_error("patch file: header declares P=" + std::to_string(declared) + " but lists " +
                             std::to_string(p.indices.size()) + " indices");
  }
  if (m >= 0) {
    p.pixel_count = std::size_t{1} << (2 * m);
    if (p.kind == PatchKind::low_discrepancy) {
      p.m = m;
      p.k = log2_exact(p.indices.size());
    }
  }
  return p;
}

inline PixelPatch read_patch_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open patch file '" + path + "'");
  return read_patch(is);
}

}  // namespace convnade
