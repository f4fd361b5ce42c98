#pragma once

#include "nlslab/checks.hpp"

namespace fixtures {

// Built once per process; 1024 points is enough for every unit-level check.
inline const nlslab::StaticSetup& coarse() {
  static const nlslab::StaticSetup s = nlslab::build_static(1024, 30.0, nlslab::Tolerances{});
  return s;
}

inline const nlslab::StaticSetup& fine() {
  static const nlslab::StaticSetup s = nlslab::build_static(4096, 30.0, nlslab::Tolerances{});
  return s;
}

inline nlslab::GoldenConstants golden() {
  return nlslab::load_golden(std::filesystem::path(NLSLAB_SOURCE_DIR) / "data/golden_constants.json");
}

}  // namespace fixtures
