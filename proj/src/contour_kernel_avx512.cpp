#define PASI_KERNEL_NS avx512
#include "contour_kernel_impl.hpp"
