#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace precflex::netbench {

using Bytes = std::vector<std::byte>;

/// Point-to-point message passing endpoint of one rank. Messages between a
/// given (source, destination) pair are delivered in order, exactly once.
class Transport {
public:
    virtual ~Transport() = default;
    /// Enqueues a copy of `data` for `dest`; does not wait for the receiver.
    virtual void send(int dest, std::span<const std::byte> data) = 0;
    /// Blocks until the next message from `src` arrives.
    virtual Bytes recv(int src) = 0;
    virtual int rank() const = 0;
    virtual int size() const = 0;
    /// Wakes every blocked receiver with a TransportError.
    virtual void abort(const std::string& reason) = 0;
};

/// Ranks of one process exchanging messages through shared FIFO queues, one
/// per ordered pair. Endpoints may be used from different threads.
class InProcNetwork {
public:
    explicit InProcNetwork(int ranks);
    InProcNetwork(const InProcNetwork&) = delete;
    InProcNetwork& operator=(const InProcNetwork&) = delete;
    ~InProcNetwork();

    int size() const noexcept { return ranks_; }
    Transport& endpoint(int rank);
    std::vector<Transport*> endpoints();
    void abort(const std::string& reason);
    bool aborted() const noexcept { return aborted_.load(); }

private:
    class Endpoint;
    struct Queue {
        std::deque<Bytes> messages;
    };

    void push(int src, int dest, std::span<const std::byte> data);
    Bytes pop(int src, int dest);

    int ranks_;
    std::mutex mutex_;
    std::condition_variable ready_;
    std::vector<Queue> queues_;  // [src * ranks + dest]
    std::vector<std::unique_ptr<Endpoint>> endpoints_;
    std::atomic<bool> aborted_{false};
    std::string abort_reason_;
};

/// Monotonic time source in nanoseconds.
class Clock {
public:
    virtual ~Clock() = default;
    virtual std::int64_t now() = 0;
};

class SteadyClock final : public Clock {
public:
    std::int64_t now() override;
};

/// Scripted clock: time moves only through advance() and, when auto_step is
/// non-zero, by auto_step after every now() call.
class FakeClock final : public Clock {
public:
    explicit FakeClock(std::int64_t start = 0, std::int64_t auto_step = 0) : t_(start), auto_step_(auto_step) {}
    std::int64_t now() override { return t_.fetch_add(auto_step_); }
    void advance(std::int64_t ns) { t_.fetch_add(ns); }

private:
    std::atomic<std::int64_t> t_;
    std::int64_t auto_step_;
};

/// Forwards to another endpoint and advances a fake clock after each recv.
class TickingTransport final : public Transport {
public:
    TickingTransport(Transport& inner, FakeClock& clock, std::int64_t ns_per_recv)
        : inner_(inner), clock_(clock), step_(ns_per_recv) {}

    void send(int dest, std::span<const std::byte> data) override { inner_.send(dest, data); }
    Bytes recv(int src) override {
        Bytes b = inner_.recv(src);
        clock_.advance(step_);
        return b;
    }
    int rank() const override { return inner_.rank(); }
    int size() const override { return inner_.size(); }
    void abort(const std::string& reason) override { inner_.abort(reason); }

private:
    Transport& inner_;
    FakeClock& clock_;
    std::int64_t step_;
};

}  // namespace precflex::netbench
