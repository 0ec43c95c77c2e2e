#include "ctmap/barcode.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>

#include "ctmap/io_util.hpp"

namespace ctmap {

bool pair_less(const PersistencePair& a, const PersistencePair& b) {
  return std::tie(a.dim, a.birth, a.death) < std::tie(b.dim, b.birth, b.death);
}

void Barcode::sort_pairs() {
  std::sort(pairs.begin(), pairs.end(), pair_less);
}

std::vector<PersistencePair> Barcode::dimension_pairs(int dim) const {
  std::vector<PersistencePair> out;
  for (const auto& p : pairs) {
    if (p.dim == dim) out.push_back(p);
  }
  return out;
}

std::vector<PersistencePair> Barcode::finite_pairs(int dim) const {
  std::vector<PersistencePair> out;
  for (const auto& p : pairs) {
    if (p.dim == dim && !p.is_infinite()) out.push_back(p);
  }
  return out;
}

std::size_t Barcode::infinite_count(int dim) const {
  std::size_t count = 0;
  for (const auto& p : pairs) {
    if (p.dim == dim && p.is_infinite()) ++count;
  }
  return count;
}

Barcode calibrate(const Barcode& b) {
  double longest = 0.0;
  for (const auto& p : b.pairs) {
    if (!p.is_infinite()) longest = std::max(longest, p.persistence());
  }
  if (longest <= 0.0) {
    throw calibration_error("calibration needs at least one finite bar");
  }
  if (longest == 1.0) return b;

  Barcode out;
  out.scale = b.scale * longest;
  out.pairs.reserve(b.pairs.size());
  for (const auto& p : b.pairs) {
    PersistencePair scaled;
    scaled.dim = p.dim;
    scaled.birth = p.birth / longest;
    scaled.death = p.is_infinite()
                       ? kInfiniteDeath
                       : scaled.birth + p.persistence() / longest;
    out.pairs.push_back(scaled);
  }
  out.sort_pairs();
  return out;
}

void save_barcode(const std::string& path, const Barcode& b) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw io_error("cannot open barcode file for writing: " + path);
  os << "# ctmap-barcode 1\n";
  os << "# scale " << format_double(b.scale) << "\n";
  for (const auto& p : b.pairs) {
    os << p.dim << ',' << format_double(p.birth) << ',';
    if (p.is_infinite()) {
      os << "inf";
    } else {
      os << format_double(p.death);
    }
    os << '\n';
  }
  if (!os) throw io_error("failed writing barcode file: " + path);
}

Barcode load_barcode(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot open barcode file: " + path);
  std::string line;
  if (!std::getline(is, line) || line != "# ctmap-barcode 1") {
    throw io_error("not a barcode file: " + path);
  }
  if (!std::getline(is, line) || line.rfind("# scale ", 0) != 0) {
    throw io_error("barcode file missing scale line: " + path);
  }
  Barcode b;
  b.scale = parse_double(std::string_view(line).substr(8));
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 3) {
      throw io_error("malformed barcode row: " + std::string(line));
    }
    PersistencePair p;
    p.dim = static_cast<int>(parse_long(fields[0]));
    p.birth = parse_double(fields[1]);
    p.death = fields[2] == "inf" ? kInfiniteDeath : parse_double(fields[2]);
    b.pairs.push_back(p);
  }
  b.sort_pairs();
  return b;
}

}  // namespace ctmap
