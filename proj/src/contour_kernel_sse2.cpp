#define PASI_KERNEL_NS sse2
#include "contour_kernel_impl.hpp"
