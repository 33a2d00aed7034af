#pragma once

// FFTW wrapper shared by the library translation units.

#include <array>
#include <cstddef>

#include "gemtomo/field.hpp"

namespace gemtomo::detail {

/// Unnormalized in-place DFT over the flagged axes of a row-major 3D array.
/// sign = -1 is the forward kernel e^{-2 pi i jk/n}.
void dft_inplace(cdouble* data, const std::array<std::size_t, 3>& shape,
                 const std::array<bool, 3>& axes, int sign);

} // namespace gemtomo::detail
