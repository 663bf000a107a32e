#pragma once

#include "flapkit/config.hpp"

namespace flapkit::test_support {

inline const config::ProjectConfig& paper_config() {
  static const config::ProjectConfig cfg = config::load_config(FLAPKIT_PAPER_CONFIG);
  return cfg;
}

}  // namespace flapkit::test_support
