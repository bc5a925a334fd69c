#pragma once

namespace starrad::cli {

/// glibc only, no-op elsewhere. Training frees and reallocates the same
/// multi-megabyte buffers every epoch; by default glibc returns them to the
/// kernel each time (mmap/munmap or heap trimming) and the process spends
/// a large share of its time in page faults.
void tune_allocator() noexcept;

}  // namespace starrad::cli
