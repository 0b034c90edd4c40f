#include "infogeo/threading.hpp"

#include <algorithm>
#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace infogeo::threading {

namespace {
std::atomic<int> g_cap{0};
}

void set_cap(int threads) { g_cap.store(threads < 0 ? 0 : threads); }

int cap() { return g_cap.load(); }

int effective_threads() {
#ifdef _OPENMP
    const int avail = omp_get_max_threads();
#else
    const int avail = 1;
#endif
    const int c = g_cap.load();
    return c > 0 ? std::min(c, avail) : avail;
}

}  // namespace infogeo::threading
