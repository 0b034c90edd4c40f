#pragma once

namespace infogeo::threading {

/// Cap the number of worker threads used by the parallel kernels.
/// 0 restores the default (all hardware threads OpenMP reports).
void set_cap(int threads);

int cap();

/// Number of threads the next parallel region will use.
int effective_threads();

}  // namespace infogeo::threading
