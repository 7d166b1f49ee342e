#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace rexsim {

/// 0 means "one per hardware thread".
inline unsigned resolve_workers(unsigned requested)
{
    if (requested != 0)
        return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/*!
 * Calls fn(begin, end) on contiguous chunks of [0, count) from up to
 * `workers` threads. Chunk boundaries depend on the worker count, so fn must
 * produce results that depend only on the index, never on the chunk.
 * The first exception thrown by any chunk is rethrown.
 */
template<class Fn>
void parallel_for_chunks(std::size_t count, unsigned workers, Fn&& fn)
{
    unsigned const n_threads = static_cast<unsigned>(
        std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(count, 1)));
    if (n_threads <= 1)
    {
        fn(std::size_t{0}, count);
        return;
    }
    std::vector<std::exception_ptr> errors(n_threads);
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    std::size_t const chunk = (count + n_threads - 1) / n_threads;
    for (unsigned t = 0; t < n_threads; ++t)
    {
        std::size_t const begin = std::min(count, t * chunk);
        std::size_t const end = std::min(count, begin + chunk);
        threads.emplace_back([&, t, begin, end] {
            try
            {
                fn(begin, end);
            }
            catch (...)
            {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : threads)
        th.join();
    for (auto const& e : errors)
    {
        if (e)
            std::rethrow_exception(e);
    }
}

} // namespace rexsim
