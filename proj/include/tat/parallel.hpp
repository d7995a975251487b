#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tat {

/// Number of worker threads used by the compute kernels. 0 means "use
/// std::thread::hardware_concurrency()".
inline std::size_t& worker_count()
{
    static std::size_t n = 0;
    return n;
}

/// Runs body(index) for index in [0, n). Work items are handed out in
/// contiguous chunks; each item must write only its own outputs, which keeps
/// results independent of the number of workers.
template<class Body>
void parallel_for(std::size_t n, Body&& body, std::size_t chunk = 1)
{
    std::size_t workers = worker_count();
    if (workers == 0)
        workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    chunk = std::max<std::size_t>(1, chunk);
    const std::size_t chunks = (n + chunk - 1) / chunk;
    workers = std::min(workers, chunks);

    if (workers <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        try
        {
            for (;;)
            {
                const std::size_t c = next.fetch_add(1);
                if (c >= chunks)
                    break;
                const std::size_t end = std::min(n, (c + 1) * chunk);
                for (std::size_t i = c * chunk; i < end; ++i)
                    body(i);
            }
        }
        catch (...)
        {
            std::lock_guard lock(error_mutex);
            if (!error)
                error = std::current_exception();
            next = chunks;
        }
    };

    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w)
        pool.emplace_back(run);
    run();
    pool.clear();
    if (error)
        std::rethrow_exception(error);
}

}  // namespace tat
