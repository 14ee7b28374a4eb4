#pragma once

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <deque>
#include <exception>
#include <mutex>
#include <thread>

namespace bmgap {

namespace detail {

/// Unbounded multi-producer single-consumer queue.
template <class T>
class Channel {
 public:
  void send(T value) {
    {
      std::lock_guard lock(mutex_);
      queue_.push_back(std::move(value));
    }
    ready_.notify_one();
  }

  T receive() {
    std::unique_lock lock(mutex_);
    ready_.wait(lock, [&] { return !queue_.empty(); });
    T value = std::move(queue_.front());
    queue_.pop_front();
    return value;
  }

 private:
  std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<T> queue_;
};

struct WorkerMessage {
  enum class Kind { sample_done, worker_exit } kind;
  std::size_t worker = 0;
};

}  // namespace detail

template <class Result>
std::vector<Result> parallel_samples(std::size_t n, std::size_t workers, const std::function<Result(std::size_t)>& task,
                                     const ProgressFn& progress) {
  std::vector<Result> results(n);
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (n == 0) return results;

  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::vector<std::exception_ptr> errors(workers);
  detail::Channel<detail::WorkerMessage> channel;

  auto worker = [&](std::size_t id) {
    try {
      for (;;) {
        if (abort.load(std::memory_order_relaxed)) break;
        const std::size_t i = next.fetch_add(1);
        if (i >= n) break;
        results[i] = task(i);
        channel.send({detail::WorkerMessage::Kind::sample_done, id});
      }
    } catch (...) {
      errors[id] = std::current_exception();
      abort.store(true);
    }
    channel.send({detail::WorkerMessage::Kind::worker_exit, id});
  };

  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t id = 0; id < workers; ++id) threads.emplace_back(worker, id);

  std::size_t done = 0;
  std::size_t running = workers;
  while (running > 0) {
    const auto message = channel.receive();
    if (message.kind == detail::WorkerMessage::Kind::worker_exit) {
      --running;
    } else {
      ++done;
      if (progress) progress({done, n});
    }
  }
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace bmgap
