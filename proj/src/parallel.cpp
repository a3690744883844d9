#include "alone/parallel.hpp"

#include <omp.h>

#include <algorithm>

namespace alone::parallel {

void set_threads(int n) { omp_set_num_threads(std::max(1, n)); }

int threads() { return omp_get_max_threads(); }

}  // namespace alone::parallel
