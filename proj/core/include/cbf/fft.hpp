#pragma once

#include <complex>
#include <vector>

namespace cbf::fft {

/// In-place 2D DFTs on row-major n x n arrays of complex doubles.
///
/// forward applies the analysis transform including the 1/n^2 factor, so that
/// backward(forward(x)) == x. Plans are cached per grid size with
/// deterministic (FFTW_ESTIMATE) planning; execution is thread-safe.
void forward(int n, std::vector<std::complex<double>>& data);
void backward(int n, std::vector<std::complex<double>>& data);

} // namespace cbf::fft
