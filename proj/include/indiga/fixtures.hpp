#pragma once

#include <string>
#include <vector>

namespace indiga {

struct Fixture {
  std::string name;
  std::string text;
};

// Sessions compiled into the binary, sorted by name.
const std::vector<Fixture>& bundled_fixtures();
const Fixture* find_fixture(const std::string& name);

}  // namespace indiga
