#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "lace/io.hpp"

namespace testsupport {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::string data_path(const std::string& name) {
  return std::string(TEST_DATA_DIR) + "/" + name;
}

// The running bibliography example used across the suites.
inline lace::Workspace fig1() {
  return lace::parse_workspace(read_file(data_path("fig1.lace")));
}

}  // namespace testsupport
