#pragma once

#include "fhelm/grid.hpp"

namespace fhelm::detail {

// Unnormalized in-place n-dimensional DFT; sign = -1 forward, +1 backward.
void fft_inplace(const Grid& g, cplx* data, int sign);

// Thread count used for plans created after the call (0 = read FHELM_THREADS).
void set_fft_threads(int threads);
int fft_threads();

}  // namespace fhelm::detail
