#include <cstdio>
#include <cstdlib>
#include <cstring>

#include <contagion/acceptance.hpp>

// Release gate runner: one line per criterion, nonzero exit on any failure.
// With --criterion N only that check runs (ctest registers them one by one).
int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
      if (only < 1 || only > contagion::acceptance::kCriterionCount) {
        std::fprintf(stderr, "criterion must be 1..%d\n", contagion::acceptance::kCriterionCount);
        return 2;
      }
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }

  bool all_ok = true;
  for (int id = 1; id <= contagion::acceptance::kCriterionCount; ++id) {
    if (only != 0 && id != only) continue;
    auto r = contagion::acceptance::run_criterion(id);
    std::printf("[%s] %2d %-28s %8.2fs / %4.0fs  %s\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.seconds, r.budget_seconds, r.detail.c_str());
    std::fflush(stdout);
    all_ok = all_ok && r.pass;
  }
  return all_ok ? 0 : 1;
}
