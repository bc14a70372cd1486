#pragma once

namespace chronocast {

/// Inverse standard normal CDF (Wichura's AS 241, PPND16). Accurate to
/// about 1e-16 for p in (0,1); returns +/-inf at the endpoints.
double normal_quantile(double p);

}  // namespace chronocast
