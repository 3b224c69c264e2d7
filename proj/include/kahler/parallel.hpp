#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>

namespace kahler {

// Global worker count used by node loops. Results never depend on it.
void set_workers(int n);
int workers();

// Calls body(begin, end) on contiguous chunks covering [0, n).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

double pairwise_sum(std::span<const double> v);
std::complex<double> pairwise_sum(std::span<const std::complex<double>> v);

}  // namespace kahler
