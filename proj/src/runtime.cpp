#include "spinbound/runtime.hpp"

extern "C" void openblas_set_num_threads(int);

namespace spinbound {

void pin_blas_threads() { openblas_set_num_threads(1); }

}  // namespace spinbound
