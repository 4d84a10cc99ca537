#include "sortscale/worker_pool.hpp"

#include <stdexcept>

#ifdef __linux__
#include <pthread.h>
#include <sched.h>
#endif

namespace sortscale {

void pin_thread_to_cpu(std::thread& t, int cpu) {
#ifdef __linux__
    cpu_set_t set;
    CPU_ZERO(&set);
    CPU_SET(cpu % CPU_SETSIZE, &set);
    pthread_setaffinity_np(t.native_handle(), sizeof(set), &set);
#else
    (void)t;
    (void)cpu;
#endif
}

WorkerPool::WorkerPool(int threads, bool pin_workers) : threads_(threads) {
    if (threads < 1) throw std::invalid_argument("WorkerPool: threads must be >= 1");
    workers_.reserve(threads_ - 1);
    for (int w = 1; w < threads_; ++w) {
        workers_.emplace_back(&WorkerPool::worker_loop, this, w);
        if (pin_workers) pin_thread_to_cpu(workers_.back(), w);
    }
#ifdef __linux__
    if (pin_workers && threads_ > 1) {
        // Pin the calling thread to cpu 0 for the pool's lifetime and put
        // its original mask back on destruction.
        cpu_set_t saved;
        CPU_ZERO(&saved);
        if (pthread_getaffinity_np(pthread_self(), sizeof(saved), &saved) == 0) {
            saved_affinity_ = saved;
            restore_affinity_ = true;
        }
        cpu_set_t set;
        CPU_ZERO(&set);
        CPU_SET(0, &set);
        pthread_setaffinity_np(pthread_self(), sizeof(set), &set);
    }
#endif
}

WorkerPool::~WorkerPool() {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        stopping_ = true;
        ++job_seq_;
    }
    start_cv_.notify_all();
    for (auto& t : workers_) t.join();
#ifdef __linux__
    if (restore_affinity_) {
        pthread_setaffinity_np(pthread_self(), sizeof(saved_affinity_), &saved_affinity_);
    }
#endif
}

void WorkerPool::run_chunk(int worker_index) const {
    // Contiguous static split: worker w handles [w*n/p, (w+1)*n/p).
    const long long n = n_;
    const long long begin = n * worker_index / threads_;
    const long long end = n * (worker_index + 1) / threads_;
    for (long long i = begin; i < end; ++i) {
        (*fn_)(static_cast<int>(i));
    }
}

void WorkerPool::worker_loop(int worker_index) {
    unsigned long seen = 0;
    for (;;) {
        {
            std::unique_lock<std::mutex> lock(mutex_);
            start_cv_.wait(lock, [&] { return job_seq_ != seen || stopping_; });
            if (stopping_) return;
            seen = job_seq_;
        }
        run_chunk(worker_index);
        {
            std::lock_guard<std::mutex> lock(mutex_);
            if (--pending_ == 0) done_cv_.notify_one();
        }
    }
}

void WorkerPool::parallel_for(int n, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    if (threads_ == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    {
        std::lock_guard<std::mutex> lock(mutex_);
        fn_ = &fn;
        n_ = n;
        pending_ = threads_ - 1;
        ++job_seq_;
    }
    start_cv_.notify_all();
    run_chunk(0);
    std::unique_lock<std::mutex> lock(mutex_);
    done_cv_.wait(lock, [&] { return pending_ == 0; });
    fn_ = nullptr;
}

void parallel_for(WorkerPool* pool, int n, const std::function<void(int)>& fn) {
    if (pool == nullptr) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    pool->parallel_for(n, fn);
}

}  // namespace sortscale
