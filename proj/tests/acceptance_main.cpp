#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "kahler/acceptance.hpp"

// Prints one line per criterion; writes the JSON report to the path in argv[1] if given.
int main(int argc, char** argv) {
  kahler::AcceptanceOptions opt;
  auto rep = kahler::run_acceptance(opt);
  for (const auto& c : rep.criteria) {
    std::printf("%s criterion %d: %s", c.pass ? "PASS" : "FAIL", c.id, c.name.c_str());
    if (!c.error.empty()) std::printf(" (%s)", c.error.c_str());
    std::printf("\n");
    if (!c.pass) std::printf("  %s\n", c.details.dump().c_str());
  }
  if (argc > 1) std::ofstream(argv[1]) << rep.to_json().dump(2) << "\n";
  return rep.all_pass ? 0 : 1;
}
