// SPDX-FileCopyrightText: 2026 The hpgmxp authors
//
// SPDX-License-Identifier: Apache-2.0

#include "hpgmxp/comm.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <map>
#include <set>
#include <string>
#include <thread>


namespace hpgmxp {


RankWorld::RankWorld(int size) : size_{size}
{
    if (size < 1) {
        throw ConfigError("a rank world needs at least one rank");
    }
    mailboxes_.reserve(std::size_t(size) * size);
    for (int i = 0; i < size * size; ++i) {
        mailboxes_.push_back(std::make_unique<Mailbox>());
    }
    slots_.resize(size);
    slot_epoch_.resize(size);
}


std::size_t RankWorld::pending_messages() const
{
    std::size_t count = 0;
    for (const auto& box : mailboxes_) {
        std::lock_guard lock(box->mutex);
        count += box->queue.size();
    }
    return count;
}


void RankWorld::check_aborted() const
{
    if (aborted_.load()) {
        throw ProtocolError("rank world aborted by a failing rank");
    }
}


void RankWorld::post(int src, int dst, Message msg)
{
    if (dst < 0 || dst >= size_) {
        throw ProtocolError("message to nonexistent rank " +
                            std::to_string(dst));
    }
    auto& box = mailbox(src, dst);
    {
        std::lock_guard lock(box.mutex);
        box.queue.push_back(std::move(msg));
    }
    box.cv.notify_one();
}


RankWorld::Message RankWorld::take(int src, int dst)
{
    if (src < 0 || src >= size_) {
        throw ProtocolError("message from nonexistent rank " +
                            std::to_string(src));
    }
    auto& box = mailbox(src, dst);
    std::unique_lock lock(box.mutex);
    box.cv.wait(lock, [&] { return !box.queue.empty() || aborted_.load(); });
    if (box.queue.empty()) {
        check_aborted();
    }
    auto msg = std::move(box.queue.front());
    box.queue.pop_front();
    return msg;
}


void RankWorld::barrier()
{
    std::unique_lock lock(barrier_mutex_);
    check_aborted();
    const auto generation = generation_;
    if (++arrived_ == size_) {
        arrived_ = 0;
        ++generation_;
        barrier_cv_.notify_all();
        return;
    }
    barrier_cv_.wait(lock, [&] {
        return generation_ != generation || aborted_.load();
    });
    if (generation_ == generation) {
        check_aborted();
    }
}


void RankWorld::abort()
{
    {
        std::lock_guard lock(barrier_mutex_);
        aborted_.store(true);
    }
    barrier_cv_.notify_all();
    for (auto& box : mailboxes_) {
        {
            std::lock_guard lock(box->mutex);
        }
        box->cv.notify_all();
    }
}


void RankWorld::reset()
{
    aborted_.store(false);
    arrived_ = 0;
    for (auto& box : mailboxes_) {
        box->queue.clear();
    }
}


void Comm::barrier()
{
    if (size() > 1) {
        world_->barrier();
    }
}


std::uint64_t Comm::enter_collective(std::span<const double> values)
{
    const auto epoch = ++collective_epoch_;
    world_->slots_[rank_].assign(values.begin(), values.end());
    world_->slot_epoch_[rank_] = epoch;
    world_->barrier();
    for (int r = 0; r < size(); ++r) {
        if (world_->slot_epoch_[r] != epoch ||
            world_->slots_[r].size() != values.size()) {
            throw ProtocolError(
                "collective mismatch: rank " + std::to_string(rank_) +
                " at epoch " + std::to_string(epoch) + ", rank " +
                std::to_string(r) + " at epoch " +
                std::to_string(world_->slot_epoch_[r]));
        }
    }
    return epoch;
}


double Comm::all_reduce_sum(double local)
{
    all_reduce_sum(std::span<double>(&local, 1));
    return local;
}


void Comm::all_reduce_sum(std::span<double> values)
{
    if (size() == 1) {
        ++collective_epoch_;
        return;
    }
    enter_collective(values);
    for (std::size_t i = 0; i < values.size(); ++i) {
        double sum = 0.0;
        for (int r = 0; r < size(); ++r) {
            sum += world_->slots_[r][i];
        }
        values[i] = sum;
    }
    world_->barrier();
}


double Comm::all_reduce_max(double local)
{
    if (size() == 1) {
        ++collective_epoch_;
        return local;
    }
    enter_collective(std::span<const double>(&local, 1));
    double result = world_->slots_[0][0];
    for (int r = 1; r < size(); ++r) {
        result = std::max(result, world_->slots_[r][0]);
    }
    world_->barrier();
    return result;
}


std::vector<double> Comm::all_gather(std::span<const double> local)
{
    if (size() == 1) {
        ++collective_epoch_;
        return {local.begin(), local.end()};
    }
    enter_collective(local);
    std::vector<double> result;
    result.reserve(local.size() * size());
    for (int r = 0; r < size(); ++r) {
        result.insert(result.end(), world_->slots_[r].begin(),
                      world_->slots_[r].end());
    }
    world_->barrier();
    return result;
}


void run_ranks(RankWorld& world, const std::function<void(Comm&)>& body)
{
    world.reset();
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto run_one = [&](int rank) {
        try {
            Comm comm(world, rank);
            body(comm);
        } catch (...) {
            {
                std::lock_guard lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
            }
            world.abort();
        }
    };

    if (world.size() == 1) {
        run_one(0);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(world.size());
        for (int r = 0; r < world.size(); ++r) {
            threads.emplace_back(run_one, r);
        }
        for (auto& t : threads) {
            t.join();
        }
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
    if (const auto left = world.pending_messages(); left != 0) {
        throw ProtocolError(std::to_string(left) +
                            " messages left undelivered");
    }
}


HaloPlan build_halo_plan(const LocalDomain& d, EllMatrix<double>& A)
{
    const auto& src = A.shape();
    const local_index n = src.n_rows;

    // owner rank -> referenced global columns, both ascending
    std::map<int, std::set<global_index>> recv_sets;
    std::map<int, std::set<std::pair<global_index, local_index>>> send_sets;
    std::vector<char> is_boundary(n, 0);
    for (local_index i = 0; i < n; ++i) {
        for (int k = 0; k < src.row_nnz[i]; ++k) {
            const auto slot = src.slot(i, k);
            if (src.col_idx[slot] != unresolved_column) {
                continue;
            }
            const global_index g = src.global_col[slot];
            if (g < 0 || g >= d.global_rows()) {
                throw TopologyError("column " + std::to_string(g) +
                                    " lies outside the global grid");
            }
            const Index3 p = global_coords(d, g);
            const Index3 owner{p.x / d.local.x, p.y / d.local.y,
                               p.z / d.local.z};
            if (std::abs(owner.x - d.rank_coords.x) > 1 ||
                std::abs(owner.y - d.rank_coords.y) > 1 ||
                std::abs(owner.z - d.rank_coords.z) > 1 ||
                owner == d.rank_coords) {
                throw TopologyError("column " + std::to_string(g) +
                                    " of rank " + std::to_string(d.rank) +
                                    " is not owned by a neighboring rank");
            }
            const int r = rank_of(d.ranks, owner);
            recv_sets[r].insert(g);
            // the stencil is symmetric: row i is needed by the owner of g
            send_sets[r].emplace(src.row_global[i], i);
            is_boundary[i] = 1;
        }
    }

    HaloPlan plan;
    plan.n_rows = n;
    std::map<global_index, local_index> slot_of;
    for (const auto& [r, columns] : recv_sets) {
        HaloNeighbor nb;
        nb.rank = r;
        nb.recv_offset = plan.halo_size;
        nb.recv_count = static_cast<local_index>(columns.size());
        for (const auto g : columns) {
            slot_of[g] = n + plan.halo_size++;
            plan.halo_global.push_back(g);
        }
        for (const auto& [g, row] : send_sets[r]) {
            nb.send_rows.push_back(row);
        }
        plan.neighbors.push_back(std::move(nb));
    }
    for (local_index i = 0; i < n; ++i) {
        (is_boundary[i] ? plan.boundary_rows : plan.interior_rows).push_back(i);
    }

    auto dst = std::make_shared<EllStructure>(src);
    for (std::size_t s = 0; s < dst->col_idx.size(); ++s) {
        if (dst->col_idx[s] == unresolved_column) {
            dst->col_idx[s] = slot_of.at(dst->global_col[s]);
        }
    }
    dst->n_cols = n + plan.halo_size;
    A.structure = std::move(dst);
    return plan;
}


HaloPlan permute_plan(const HaloPlan& plan, std::span<const local_index> perm)
{
    HaloPlan out = plan;
    for (auto& nb : out.neighbors) {
        for (auto& row : nb.send_rows) {
            row = perm[row];
        }
    }
    for (auto* rows : {&out.interior_rows, &out.boundary_rows}) {
        for (auto& row : *rows) {
            row = perm[row];
        }
        std::sort(rows->begin(), rows->end());
    }
    return out;
}


template <typename T>
HaloRequest begin_exchange(Comm& comm, const HaloPlan& plan,
                           std::span<const T> v)
{
    if (v.size() < static_cast<std::size_t>(plan.n_cols())) {
        throw ProtocolError("halo exchange on a vector without halo tail");
    }
    HaloRequest request{comm.next_halo_epoch()};
    std::vector<T> buffer;
    for (const auto& nb : plan.neighbors) {
        buffer.resize(nb.send_rows.size());
        for (std::size_t i = 0; i < buffer.size(); ++i) {
            buffer[i] = v[nb.send_rows[i]];
        }
        comm.send(nb.rank, request.epoch, std::span<const T>(buffer));
    }
    return request;
}


template <typename T>
void finish_exchange(Comm& comm, const HaloPlan& plan,
                     const HaloRequest& request, std::span<T> v)
{
    for (const auto& nb : plan.neighbors) {
        comm.recv(nb.rank, request.epoch,
                  v.subspan(plan.n_rows + nb.recv_offset, nb.recv_count));
    }
}


template HaloRequest begin_exchange(Comm&, const HaloPlan&,
                                    std::span<const double>);
template HaloRequest begin_exchange(Comm&, const HaloPlan&,
                                    std::span<const float>);
template void finish_exchange(Comm&, const HaloPlan&, const HaloRequest&,
                              std::span<double>);
template void finish_exchange(Comm&, const HaloPlan&, const HaloRequest&,
                              std::span<float>);


}  // namespace hpgmxp
