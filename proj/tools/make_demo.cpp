// Regenerates the bundled demo fixture: make_demo <dir>
#include <cstdio>

#include <fmt/format.h>

#include "hydrobal/instances.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    fmt::print(stderr, "usage: make_demo <dir>\n");
    return 2;
  }
  try {
    const auto path = hydrobal::instances::write_instance(argv[1], hydrobal::instances::demo_inputs(),
                                                          hydrobal::instances::demo_config());
    fmt::print("wrote {}\n", path.string());
  } catch (const std::exception& e) {
    fmt::print(stderr, "make_demo: {}\n", e.what());
    return 4;
  }
  return 0;
}
