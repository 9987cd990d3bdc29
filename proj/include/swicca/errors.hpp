#pragma once

#include <stdexcept>
#include <string>

namespace swicca {

// Error taxonomy used across the library. The CLI maps these onto exit
// codes: config errors are usage problems (1), input/rank errors are data
// problems (2), numeric errors are solver failures (3).

struct input_error : std::runtime_error {
  explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct rank_error : input_error {
  explicit rank_error(const std::string& msg) : input_error(msg) {}
};

struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace swicca
