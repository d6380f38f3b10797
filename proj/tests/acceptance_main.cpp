#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "gffi/acceptance.hpp"

// Prints one PASS/FAIL line per criterion; exit status is the failure count.
// Usage: gffi_acceptance [criterion ids...]
int main(int argc, char** argv) {
  gffi::AcceptanceOptions opt;
  for (int i = 1; i < argc; ++i) opt.only.push_back(std::atoi(argv[i]));
  opt.log = [](const std::string& line) {
    if (line.rfind("PASS", 0) != 0 && line.rfind("FAIL", 0) != 0) std::cerr << line << '\n';
  };
  const auto results = gffi::run_acceptance(opt);
  int failed = 0;
  for (const auto& r : results) {
    std::cout << gffi::format_line(r) << '\n';
    if (!r.pass) ++failed;
  }
  std::cout << (failed == 0 ? "ALL PASS" : std::to_string(failed) + " FAILED") << '\n';
  return failed;
}
