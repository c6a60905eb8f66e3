#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "reach/parser.hpp"

#ifndef REACH_MODELS_DIR
#define REACH_MODELS_DIR "models"
#endif

namespace reach::testing {

inline std::string model_path(const std::string& name) {
  return std::string(REACH_MODELS_DIR) + "/" + name;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read test model: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Machine load_model(const std::string& name) {
  return parse_machine(slurp(model_path(name)));
}

}  // namespace reach::testing
