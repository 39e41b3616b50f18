#include "sesn/common.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace sesn {

namespace {

std::size_t default_threads() noexcept
{
    const unsigned hw = std::thread::hardware_concurrency();
    return std::clamp<std::size_t>(hw == 0 ? 1 : hw, 1, 8);
}

std::atomic<std::size_t> g_threads{0};  // 0 = auto
std::atomic<std::size_t> g_memory_budget{std::size_t{4} << 30};

}  // namespace

std::size_t num_threads() noexcept
{
    const std::size_t n = g_threads.load(std::memory_order_relaxed);
    return n == 0 ? default_threads() : n;
}

void set_num_threads(std::size_t n) noexcept
{
    g_threads.store(n, std::memory_order_relaxed);
}

std::size_t memory_budget_bytes() noexcept
{
    return g_memory_budget.load(std::memory_order_relaxed);
}

void set_memory_budget_bytes(std::size_t bytes) noexcept
{
    g_memory_budget.store(bytes, std::memory_order_relaxed);
}

}  // namespace sesn
