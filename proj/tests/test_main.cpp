#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <string>
#include <vector>

#include "testutil.hpp"

namespace lavs_test {
std::string cli_path;
}

int main(int argc, char** argv) {
  std::vector<char*> args;
  for (int i = 0; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg.rfind("--cli-path=", 0) == 0) {
      lavs_test::cli_path = arg.substr(11);
      continue;
    }
    args.push_back(argv[i]);
  }
  if (lavs_test::cli_path.empty()) {
    if (const char* env = std::getenv("LAVS_CLI")) lavs_test::cli_path = env;
  }
  doctest::Context context(static_cast<int>(args.size()), args.data());
  return context.run();
}
