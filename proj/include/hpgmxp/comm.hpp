// SPDX-FileCopyrightText: 2026 The hpgmxp authors
//
// SPDX-License-Identifier: Apache-2.0

#ifndef HPGMXP_COMM_HPP_
#define HPGMXP_COMM_HPP_

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "hpgmxp/ell_matrix.hpp"
#include "hpgmxp/errors.hpp"
#include "hpgmxp/geometry.hpp"


namespace hpgmxp {


class Comm;


/**
 * A fixed set of in-process ranks connected by per-pair FIFO mailboxes.
 *
 * Ranks run as threads launched by run_ranks. Collectives are epoch
 * checked: a rank entering a different collective than its peers, or a
 * receive finding a message from another epoch, raises ProtocolError. When
 * any rank throws, the world is aborted and every blocked rank is released
 * with a ProtocolError.
 */
class RankWorld {
public:
    explicit RankWorld(int size);

    RankWorld(const RankWorld&) = delete;
    RankWorld& operator=(const RankWorld&) = delete;

    int size() const noexcept { return size_; }

    /// Number of messages posted but not yet received.
    std::size_t pending_messages() const;

private:
    friend class Comm;
    friend void run_ranks(RankWorld&, const std::function<void(Comm&)>&);

    struct Message {
        std::uint64_t tag;
        std::vector<std::byte> payload;
    };

    struct Mailbox {
        mutable std::mutex mutex;
        std::condition_variable cv;
        std::deque<Message> queue;
    };

    Mailbox& mailbox(int src, int dst) { return *mailboxes_[src * size_ + dst]; }

    void post(int src, int dst, Message msg);
    Message take(int src, int dst);
    void barrier();
    void abort();
    void reset();
    void check_aborted() const;

    int size_;
    std::vector<std::unique_ptr<Mailbox>> mailboxes_;

    std::mutex barrier_mutex_;
    std::condition_variable barrier_cv_;
    int arrived_ = 0;
    std::uint64_t generation_ = 0;
    std::atomic<bool> aborted_{false};

    std::vector<std::vector<double>> slots_;
    std::vector<std::uint64_t> slot_epoch_;
};


/// One rank's handle on a RankWorld.
class Comm {
public:
    Comm(RankWorld& world, int rank) : world_{&world}, rank_{rank} {}

    int rank() const noexcept { return rank_; }
    int size() const noexcept { return world_->size(); }

    void barrier();

    /// Sum over ranks, accumulated in ascending rank order on every rank.
    double all_reduce_sum(double local);

    /// Element-wise all_reduce_sum of a batch of values, in place.
    void all_reduce_sum(std::span<double> values);

    double all_reduce_max(double local);

    /// Concatenation of every rank's `local` in rank order.
    std::vector<double> all_gather(std::span<const double> local);

    template <typename T>
    void send(int dest, std::uint64_t tag, std::span<const T> data)
    {
        RankWorld::Message msg{tag, std::vector<std::byte>(data.size_bytes())};
        if (!data.empty()) {
            std::memcpy(msg.payload.data(), data.data(), data.size_bytes());
        }
        world_->post(rank_, dest, std::move(msg));
    }

    /// Receives the next message from `src`; its tag and size must match.
    template <typename T>
    void recv(int src, std::uint64_t tag, std::span<T> data)
    {
        auto msg = world_->take(src, rank_);
        if (msg.tag != tag || msg.payload.size() != data.size_bytes()) {
            throw ProtocolError("rank " + std::to_string(rank_) +
                                " expected message " + std::to_string(tag) +
                                " from rank " + std::to_string(src) +
                                ", got " + std::to_string(msg.tag));
        }
        if (!data.empty()) {
            std::memcpy(data.data(), msg.payload.data(), data.size_bytes());
        }
    }

    std::uint64_t next_halo_epoch() noexcept { return ++halo_epoch_; }

private:
    std::uint64_t enter_collective(std::span<const double> values);

    RankWorld* world_;
    int rank_;
    std::uint64_t collective_epoch_ = 0;
    std::uint64_t halo_epoch_ = 0;
};


/**
 * Runs `body` once per rank, each on its own thread, and joins them.
 *
 * Rethrows the first exception raised by any rank. Throws ProtocolError if
 * messages are left undelivered when every rank has returned.
 */
void run_ranks(RankWorld& world, const std::function<void(Comm&)>& body);


struct HaloNeighbor {
    int rank = 0;
    /// Owned rows sent to this neighbor, in ascending global index.
    std::vector<local_index> send_rows;
    local_index recv_offset = 0;
    local_index recv_count = 0;
};


/**
 * Halo exchange schedule of one rank.
 *
 * Halo slots follow the owned rows and are grouped by neighbor rank, each
 * group in ascending global index.
 */
struct HaloPlan {
    local_index n_rows = 0;
    local_index halo_size = 0;
    std::vector<HaloNeighbor> neighbors;
    std::vector<global_index> halo_global;
    /// Owned rows that reference no halo column, ascending.
    std::vector<local_index> interior_rows;
    /// Owned rows that reference at least one halo column, ascending.
    std::vector<local_index> boundary_rows;

    local_index n_cols() const noexcept { return n_rows + halo_size; }
};


/**
 * Assigns halo slots to the off-rank columns of `A` and rewrites them.
 *
 * Throws TopologyError when an off-rank column is not owned by one of the
 * (up to 26) neighboring ranks.
 */
HaloPlan build_halo_plan(const LocalDomain& domain, EllMatrix<double>& A);

/// Relabels the owned rows of a plan after a symmetric permutation.
HaloPlan permute_plan(const HaloPlan& plan, std::span<const local_index> perm);


struct HaloRequest {
    std::uint64_t epoch = 0;
};

/// Packs and posts the boundary values of `v` to every neighbor.
template <typename T>
HaloRequest begin_exchange(Comm& comm, const HaloPlan& plan,
                           std::span<const T> v);

/// Receives the halo tail of `v` posted by the matching begin_exchange.
template <typename T>
void finish_exchange(Comm& comm, const HaloPlan& plan,
                     const HaloRequest& request, std::span<T> v);

template <typename T>
void exchange(Comm& comm, const HaloPlan& plan, std::span<T> v)
{
    const auto request =
        begin_exchange(comm, plan, std::span<const T>(v.data(), v.size()));
    finish_exchange(comm, plan, request, v);
}

/**
 * Exchanges the halo of `v` while running `interior_work`.
 *
 * The send buffers are filled before `interior_work` starts, so the work may
 * overwrite owned entries of `v` but must not read its halo tail.
 */
template <typename T, typename Work>
void exchange_overlapped(Comm& comm, const HaloPlan& plan, std::span<T> v,
                         Work&& interior_work)
{
    const auto request =
        begin_exchange(comm, plan, std::span<const T>(v.data(), v.size()));
    std::forward<Work>(interior_work)();
    finish_exchange(comm, plan, request, v);
}


}  // namespace hpgmxp

#endif  // HPGMXP_COMM_HPP_
