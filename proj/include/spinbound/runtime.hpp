#pragma once

namespace spinbound {

/// Pin the BLAS backend to one thread so results do not depend on scheduling.
void pin_blas_threads();

}  // namespace spinbound
