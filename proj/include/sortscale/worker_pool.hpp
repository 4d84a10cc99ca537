#pragma once

#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#ifdef __linux__
#include <sched.h>
#endif

namespace sortscale {

/// Best-effort affinity pin; a no-op off Linux.
void pin_thread_to_cpu(std::thread& t, int cpu);

/// Fork-join pool for intra-frame data parallelism. parallel_for() splits
/// [0, n) into one contiguous chunk per worker; the calling thread runs
/// chunk 0 and blocks until the rest drain. Work per index must be
/// independent and write only to its own slot, which keeps results
/// identical to a sequential loop regardless of scheduling.
class WorkerPool {
public:
    /// threads >= 1; with threads == 1 every call runs inline.
    explicit WorkerPool(int threads, bool pin_workers = false);
    ~WorkerPool();

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    int size() const { return threads_; }

    void parallel_for(int n, const std::function<void(int)>& fn);

private:
    void worker_loop(int worker_index);
    void run_chunk(int worker_index) const;

    int threads_ = 1;
    std::vector<std::thread> workers_;

    std::mutex mutex_;
    std::condition_variable start_cv_;
    std::condition_variable done_cv_;
    unsigned long job_seq_ = 0;
    int pending_ = 0;
    bool stopping_ = false;
    const std::function<void(int)>* fn_ = nullptr;
    int n_ = 0;

#ifdef __linux__
    cpu_set_t saved_affinity_{};
    bool restore_affinity_ = false;
#endif
};

/// Runs fn(i) for i in [0, n). Null pool or single-thread pool degrades to
/// a plain loop through the same call path, so sequential and parallel
/// modes execute identical per-index code.
void parallel_for(WorkerPool* pool, int n, const std::function<void(int)>& fn);

}  // namespace sortscale
