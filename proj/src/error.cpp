#include "reid/error.hpp"

namespace reid {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::malformed_line: return "malformed_line";
    case Errc::type_mismatch: return "type_mismatch";
    case Errc::bad_timestamp: return "bad_timestamp";
    case Errc::io: return "io";
    case Errc::bad_node_id: return "bad_node_id";
    case Errc::target_absent: return "target_absent";
    case Errc::empty_window: return "empty_window";
    case Errc::no_channels: return "no_channels";
    case Errc::not_symmetric: return "not_symmetric";
    case Errc::zero_diagonal: return "zero_diagonal";
    case Errc::shape_mismatch: return "shape_mismatch";
    case Errc::non_finite: return "non_finite";
    case Errc::not_scalar_loss: return "not_scalar_loss";
    case Errc::label_out_of_range: return "label_out_of_range";
    case Errc::empty_dataset: return "empty_dataset";
    case Errc::schema_version_mismatch: return "schema_version_mismatch";
    case Errc::length_mismatch: return "length_mismatch";
    case Errc::one_class_only: return "one_class_only";
    case Errc::too_few_examples: return "too_few_examples";
    case Errc::bad_profile: return "bad_profile";
    case Errc::unknown_victim: return "unknown_victim";
    case Errc::bad_config: return "bad_config";
  }
  return "unknown";
}

}  // namespace reid
