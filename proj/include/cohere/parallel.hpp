#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace cohere
{
/// Runs body(begin, end) over contiguous chunks of [0, n) on up to `threads` workers.
/// Chunk boundaries depend only on n and threads, so results written by index are deterministic.
template <class Body>
void parallel_for(std::size_t n, int threads, Body&& body)
{
  std::size_t const workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, std::max<std::size_t>(n, 1));
  if (workers == 1)
  {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  std::size_t const chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w)
  {
    std::size_t const b = w * chunk, e = std::min(n, b + chunk);
    if (b >= e)
      break;
    pool.emplace_back([&, w, b, e] {
      try
      {
        body(b, e);
      }
      catch (...)
      {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool)
    t.join();
  for (auto& e : errors)
    if (e)
      std::rethrow_exception(e);
}

} // namespace cohere
