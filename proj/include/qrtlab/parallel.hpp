// Copyright 2026 The qrtlab Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace qrtlab {

inline constexpr const char* kWorkersEnv = "QRTLAB_WORKERS";

inline int default_workers() {
  if (const char* env = std::getenv(kWorkersEnv)) {
    try {
      const int w = std::stoi(env);
      if (w > 0) return w;
    } catch (...) {
    }
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs body(i) for i in [0, n). Work is handed out in fixed index order; the
// caller writes results into slots keyed by i, so output never depends on the
// number of workers.
template <class Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const int nt = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), n));
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nt - 1));
  for (int t = 1; t < nt; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

template <class T, class F>
std::vector<T> parallel_map(std::size_t n, int workers, F&& f) {
  std::vector<T> out(n);
  parallel_for(n, workers, [&](std::size_t i) { out[i] = f(i); });
  return out;
}

// Pairwise (tree) reduction in index order.
template <class T, class Combine>
T tree_reduce(std::vector<T> parts, Combine&& combine) {
  if (parts.empty()) return T{};
  while (parts.size() > 1) {
    std::vector<T> next;
    next.reserve((parts.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) next.push_back(combine(parts[i], parts[i + 1]));
    if (parts.size() % 2 == 1) next.push_back(std::move(parts.back()));
    parts = std::move(next);
  }
  return std::move(parts.front());
}

// Deterministic map-reduce: items are grouped into fixed blocks of `block`
// consecutive indices, folded sequentially inside a block, then combined by a
// tree over blocks.
template <class T, class Item, class Combine>
T parallel_reduce(std::size_t n, int workers, std::size_t block, const T& zero, Item&& item,
                  Combine&& combine) {
  if (n == 0) return zero;
  block = std::max<std::size_t>(block, 1);
  const std::size_t nb = (n + block - 1) / block;
  std::vector<T> parts(nb, zero);
  parallel_for(nb, workers, [&](std::size_t b) {
    T acc = zero;
    const std::size_t hi = std::min(n, (b + 1) * block);
    for (std::size_t i = b * block; i < hi; ++i) acc = combine(acc, item(i));
    parts[b] = std::move(acc);
  });
  return tree_reduce(std::move(parts), combine);
}

inline double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

struct MeanStat {
  double mean = 0.0;
  double std_err = 0.0;
  double std_dev = 0.0;
  std::size_t n = 0;
};

inline MeanStat mean_stat(const std::vector<double>& x) {
  MeanStat s;
  s.n = x.size();
  if (x.empty()) return s;
  s.mean = pairwise_sum(x.data(), x.size()) / static_cast<double>(x.size());
  if (x.size() > 1) {
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = (x[i] - s.mean) * (x[i] - s.mean);
    const double var = pairwise_sum(d.data(), d.size()) / static_cast<double>(x.size() - 1);
    s.std_dev = std::sqrt(var);
    s.std_err = std::sqrt(var / static_cast<double>(x.size()));
  }
  return s;
}

}  // namespace qrtlab
