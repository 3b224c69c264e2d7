#include "kahler/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace kahler {

namespace {
std::atomic<int> g_workers{1};
constexpr std::size_t kMinChunk = 512;

template <class T>
T pairwise(const T* p, std::size_t n) {
  if (n <= 8) {
    T s{};
    for (std::size_t i = 0; i < n; ++i) s += p[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise(p, h) + pairwise(p + h, n - h);
}
}  // namespace

void set_workers(int n) { g_workers = std::max(1, n); }
int workers() { return g_workers; }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  std::size_t w = std::min<std::size_t>(g_workers, (n + kMinChunk - 1) / kMinChunk);
  if (w <= 1) {
    if (n) body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(w);
  std::size_t chunk = (n + w - 1) / w;
  for (std::size_t k = 0; k < w; ++k) {
    std::size_t b = k * chunk, e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&body, b, e] { body(b, e); });
  }
  for (auto& t : pool) t.join();
}

double pairwise_sum(std::span<const double> v) { return pairwise(v.data(), v.size()); }
std::complex<double> pairwise_sum(std::span<const std::complex<double>> v) {
  return pairwise(v.data(), v.size());
}

}  // namespace kahler
