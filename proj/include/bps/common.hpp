#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace bps {

// Error hierarchy. Every failure surfaced by the library derives from Error so
// callers that do not care about the kind can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};
class GeometryError : public Error {
 public:
  using Error::Error;
};
class InvalidDistance : public Error {
 public:
  using Error::Error;
};
class EmptyTileSet : public Error {
 public:
  using Error::Error;
};
class IndexError : public Error {
 public:
  using Error::Error;
};
class NoUsers : public Error {
 public:
  using Error::Error;
};
class DomainError : public Error {
 public:
  using Error::Error;
};
class TooLarge : public Error {
 public:
  using Error::Error;
};
class AllZero : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent sub-stream seed for (seed, stream, i, j). Lets per-entity draws
// stay identical no matter how work is split across threads.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t i = 0, std::uint64_t j = 0) {
  std::uint64_t h = splitmix64(seed ^ 0x5851f42d4c957f2dULL);
  h = splitmix64(h ^ stream);
  h = splitmix64(h ^ i);
  return splitmix64(h ^ j);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t i = 0,
                    std::uint64_t j = 0) {
  return Rng(derive_seed(seed, stream, i, j));
}

// Static block partition of [0, n) over at most `threads` workers.
template <typename F>
void parallel_for(std::size_t n, int threads, F&& body) {
  const std::size_t workers =
      std::min<std::size_t>(threads > 1 ? static_cast<std::size_t>(threads) : 1, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &body] {
      for (std::size_t i = begin; i < end; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace bps
