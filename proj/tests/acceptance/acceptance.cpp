// Runs every acceptance suite and prints one PASS/FAIL line per criterion.
//
//   rectikernel_acceptance [-v] [--known-failures a,b,...]
//
// Exit status is 0 when the failing suites are exactly the listed known
// failures (none by default).

#include "rectikernel/verify.hpp"

#include <cstdio>
#include <set>
#include <sstream>
#include <string>

int main(int argc, char** argv) {
  namespace v = rectikernel::verify;
  bool verbose = false;
  std::set<std::string> known;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "-v") {
      verbose = true;
    } else if (arg == "--known-failures" && i + 1 < argc) {
      std::istringstream in(argv[++i]);
      for (std::string name; std::getline(in, name, ',');) known.insert(name);
    } else {
      std::fprintf(stderr, "usage: %s [-v] [--known-failures a,b,...]\n", argv[0]);
      return 2;
    }
  }
  for (const std::string& name : known) {
    if (!v::has_suite(name)) {
      std::fprintf(stderr, "unknown suite '%s'\n", name.c_str());
      return 2;
    }
  }

  std::set<std::string> failed;
  int index = 0;
  for (const std::string& name : v::suite_names()) {
    const v::SuiteResult r = v::run_suite(name);
    ++index;
    const bool ok = r.passed();
    if (!ok) failed.insert(name);
    std::printf("[%s] %2d %-15s %-45s %7.2fs\n", ok ? "PASS" : "FAIL", index, name.c_str(), r.title.c_str(),
                r.seconds);
    for (const v::Assertion& a : r.assertions)
      if (verbose || !a.passed)
        std::printf("       %s %s: %s\n", a.passed ? "ok  " : "FAIL", a.name.c_str(), a.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%d criteria passed\n", index - failed.size(), index);
  if (!known.empty()) {
    for (const std::string& name : known)
      if (!failed.count(name)) std::printf("known failure '%s' now passes\n", name.c_str());
    std::printf("failures %s the known-failure list\n", failed == known ? "match" : "do not match");
  }
  return failed == known ? 0 : 1;
}
