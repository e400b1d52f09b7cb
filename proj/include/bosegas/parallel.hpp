#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bosegas {

/*!
 * Run body(i) for i in [0, count) on up to `threads` workers.
 *
 * Work is handed out by an atomic counter; callers write results into slot i
 * and reduce sequentially afterwards, which keeps results independent of
 * the worker count. The first exception thrown by a body is rethrown.
 */
template<class Body>
void parallel_for(std::size_t count, int threads, Body&& body)
{
    std::size_t const workers
        = std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(count, 1));
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
        {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (std::size_t i = next++; i < count; i = next++)
        {
            try
            {
                body(i);
            }
            catch (...)
            {
                std::lock_guard lock(error_mutex);
                if (!error)
                {
                    error = std::current_exception();
                }
                next = count;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w)
    {
        pool.emplace_back(run);
    }
    run();
    for (auto& t : pool)
    {
        t.join();
    }
    if (error)
    {
        std::rethrow_exception(error);
    }
}

}  // namespace bosegas
