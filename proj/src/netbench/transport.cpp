#include "precflex/netbench/transport.hpp"

#include <chrono>

#include "precflex/errors.hpp"

namespace precflex::netbench {

class InProcNetwork::Endpoint final : public Transport {
public:
    Endpoint(InProcNetwork& net, int rank) : net_(net), rank_(rank) {}

    void send(int dest, std::span<const std::byte> data) override { net_.push(rank_, dest, data); }
    Bytes recv(int src) override { return net_.pop(src, rank_); }
    int rank() const override { return rank_; }
    int size() const override { return net_.size(); }
    void abort(const std::string& reason) override { net_.abort(reason); }

private:
    InProcNetwork& net_;
    int rank_;
};

InProcNetwork::InProcNetwork(int ranks) : ranks_(ranks) {
    if (ranks < 1) {
        throw TransportError("network needs at least one rank");
    }
    queues_.resize(static_cast<std::size_t>(ranks) * ranks);
    for (int r = 0; r < ranks; ++r) {
        endpoints_.push_back(std::make_unique<Endpoint>(*this, r));
    }
}

InProcNetwork::~InProcNetwork() = default;

Transport& InProcNetwork::endpoint(int rank) {
    if (rank < 0 || rank >= ranks_) {
        throw TransportError("no such rank " + std::to_string(rank));
    }
    return *endpoints_[static_cast<std::size_t>(rank)];
}

std::vector<Transport*> InProcNetwork::endpoints() {
    std::vector<Transport*> out;
    for (auto& e : endpoints_) out.push_back(e.get());
    return out;
}

void InProcNetwork::abort(const std::string& reason) {
    {
        std::lock_guard lock(mutex_);
        if (!aborted_.load()) {
            abort_reason_ = reason;
            aborted_.store(true);
        }
    }
    ready_.notify_all();
}

void InProcNetwork::push(int src, int dest, std::span<const std::byte> data) {
    if (dest < 0 || dest >= ranks_) {
        throw TransportError("send to invalid rank " + std::to_string(dest));
    }
    {
        std::lock_guard lock(mutex_);
        if (aborted_.load()) {
            throw TransportError("network aborted: " + abort_reason_);
        }
        queues_[static_cast<std::size_t>(src) * ranks_ + dest].messages.emplace_back(data.begin(), data.end());
    }
    ready_.notify_all();
}

Bytes InProcNetwork::pop(int src, int dest) {
    if (src < 0 || src >= ranks_) {
        throw TransportError("recv from invalid rank " + std::to_string(src));
    }
    auto& q = queues_[static_cast<std::size_t>(src) * ranks_ + dest].messages;
    std::unique_lock lock(mutex_);
    ready_.wait(lock, [&] { return !q.empty() || aborted_.load(); });
    if (q.empty()) {
        throw TransportError("network aborted: " + abort_reason_);
    }
    Bytes b = std::move(q.front());
    q.pop_front();
    return b;
}

std::int64_t SteadyClock::now() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace precflex::netbench
