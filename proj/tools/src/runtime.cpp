#include "starrad/cli/runtime.hpp"

#include <cstdlib>  // defines __GLIBC__ on glibc

#ifdef __GLIBC__
#include <malloc.h>
#endif

namespace starrad::cli {

void tune_allocator() noexcept {
#ifdef __GLIBC__
    constexpr int kKeep = 1 << 30;
    mallopt(M_MMAP_THRESHOLD, 256 * 1024 * 1024);
    mallopt(M_TRIM_THRESHOLD, kKeep);
#endif
}

}  // namespace starrad::cli
