#ifndef LOOKAHEAD_CONFIG_HPP
#define LOOKAHEAD_CONFIG_HPP

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace lookahead {

// Flat "key = value" configuration with '#' comments and
// "include <path>" lines (paths relative to the including file).
// Later assignments override earlier ones.
class Config {
 public:
  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string get(const std::string& key, const std::string& dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : it->second;
  }
  long get(const std::string& key, long dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : std::stol(it->second);
  }
  double get(const std::string& key, double dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : std::stod(it->second);
  }
  bool get(const std::string& key, bool dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    return it->second == "1" || it->second == "true" || it->second == "yes";
  }

  void set(const std::string& key, const std::string& value) { kv_[key] = value; }

  static Config load(const std::string& path) {
    Config c;
    c.load_into(path, 0);
    return c;
  }

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  void load_into(const std::string& path, int depth) {
    if (depth > 8) throw std::runtime_error("config include depth exceeded");
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    const auto slash = path.find_last_of('/');
    const std::string dir =
        slash == std::string::npos ? "" : path.substr(0, slash + 1);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      std::string trimmed;
      {
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
          if (!trimmed.empty()) trimmed += ' ';
          trimmed += tok;
        }
      }
      if (trimmed.empty()) continue;
      if (trimmed.rfind("include ", 0) == 0) {
        std::string inc = trimmed.substr(8);
        if (!inc.empty() && inc[0] != '/') inc = dir + inc;
        load_into(inc, depth + 1);
        continue;
      }
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": expected key=value");
      std::string key = trimmed.substr(0, eq);
      std::string value = trimmed.substr(eq + 1);
      while (!key.empty() && key.back() == ' ') key.pop_back();
      while (!value.empty() && value.front() == ' ') value.erase(0, 1);
      if (key.empty()) throw std::runtime_error("empty config key in " + path);
      kv_[key] = value;
    }
  }

  std::map<std::string, std::string> kv_;
};

}  // namespace lookahead

#endif  // LOOKAHEAD_CONFIG_HPP
