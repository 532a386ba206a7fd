#include "indiga/fixtures.hpp"

namespace indiga {

const Fixture* find_fixture(const std::string& name) {
  for (const Fixture& f : bundled_fixtures()) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

}  // namespace indiga
