#define PASI_KERNEL_NS avx2
#include "contour_kernel_impl.hpp"
