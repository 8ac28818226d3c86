#pragma once

#include <complex>

namespace d3ap {

using cplx = std::complex<double>;

// log Gamma(z) by the Lanczos approximation (g = 7, 9 terms), with the
// reflection formula for Re z < 0.5. Branch may differ from the principal
// log Gamma by multiples of 2 pi i; callers exponentiate, so only exp of
// the result is contractual.
cplx log_gamma(cplx z);

// log sin(pi z), overflow-safe for large |Im z|.
cplx log_sin_pi(cplx z);

}  // namespace d3ap
