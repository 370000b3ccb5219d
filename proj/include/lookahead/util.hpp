#ifndef LOOKAHEAD_UTIL_HPP
#define LOOKAHEAD_UTIL_HPP

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

namespace lookahead {

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// FNV-1a, used to stamp model provenance (which prediction file a parser
// model was trained with).
inline std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

inline std::string file_hash(const std::string& path) {
  return fnv1a_hex(slurp(path));
}

}  // namespace lookahead

#endif  // LOOKAHEAD_UTIL_HPP
