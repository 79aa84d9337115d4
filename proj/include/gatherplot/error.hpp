#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gatherplot {

enum class errc {
  structural,         // malformed input (ragged CSV rows, bad JSON)
  empty_dataset,      // no usable records
  parameter,          // invalid argument value
  capacity,           // extent too small for the requested segmentation
  unknown_dimension,  // named dimension absent from the dataset
  not_found,          // unknown dataset handle
};

constexpr std::string_view to_string(errc code) noexcept {
  switch (code) {
    case errc::structural: return "structural";
    case errc::empty_dataset: return "empty_dataset";
    case errc::parameter: return "parameter";
    case errc::capacity: return "capacity";
    case errc::unknown_dimension: return "unknown_dimension";
    case errc::not_found: return "not_found";
  }
  return "unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace gatherplot
