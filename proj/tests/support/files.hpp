#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace curelite::testing {

// Test binaries run with tests/ as the working directory.
inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string corpus(const std::string& name) { return read_file("fixtures/corpus/" + name + ".cql"); }

}  // namespace curelite::testing
