#pragma once

#include <stdexcept>
#include <string>

namespace reid {

// Stable error codes. The CLI prints them verbatim (`error: <code>: <msg>`)
// so scripts can branch on the code without parsing prose.
enum class Errc {
  malformed_line,
  type_mismatch,
  bad_timestamp,
  io,
  bad_node_id,
  target_absent,
  empty_window,
  no_channels,
  not_symmetric,
  zero_diagonal,
  shape_mismatch,
  non_finite,
  not_scalar_loss,
  label_out_of_range,
  empty_dataset,
  schema_version_mismatch,
  length_mismatch,
  one_class_only,
  too_few_examples,
  bad_profile,
  unknown_victim,
  bad_config,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace reid
