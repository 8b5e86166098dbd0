#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "pollcast/vote.hpp"

namespace pollcast {

// Immutable view of the first high_water events of a store.
class VoteLogSnapshot {
public:
    VoteLogSnapshot() : events_(std::make_shared<const std::vector<VoteRecord>>()) {}
    explicit VoteLogSnapshot(std::shared_ptr<const std::vector<VoteRecord>> events)
        : events_(std::move(events)) {}

    std::span<const VoteRecord> events() const { return *events_; }
    std::size_t size() const { return events_->size(); }
    std::uint64_t high_water() const { return events_->empty() ? 0 : events_->back().seq; }

    // Events for one device in sequence order.
    std::vector<VoteRecord> history(std::string_view device_id) const;

private:
    std::shared_ptr<const std::vector<VoteRecord>> events_;
};

struct StoreOptions {
    bool sync = true;  // fdatasync after every append
    // Test hook: the next append writes at most this many bytes then fails.
    std::optional<std::size_t> fail_next_write_after;
};

// Append-only JSON Lines vote log. One writer at a time; snapshots are
// safe to take and read from any thread. An empty path keeps the log in
// memory only.
class VoteStore {
public:
    // Truncates a torn trailing record left by a crash. Throws
    // Error(corrupt_storage) naming the byte offset of the first bad record.
    explicit VoteStore(std::filesystem::path path, StoreOptions options = {});
    ~VoteStore();

    VoteStore(const VoteStore&) = delete;
    VoteStore& operator=(const VoteStore&) = delete;

    // Durable append; returns the assigned sequence number. Throws
    // Error(storage) (retryable) when the write fails; the file is rolled
    // back so no partial record remains.
    std::uint64_t append(VoteRecord record);

    VoteLogSnapshot snapshot() const;
    std::uint64_t high_water() const;
    void flush();

    // Bytes dropped from a torn tail during open.
    std::size_t recovered_bytes() const { return recovered_bytes_; }
    const std::filesystem::path& path() const { return path_; }

    void set_fail_next_write_after(std::optional<std::size_t> bytes);

private:
    std::filesystem::path path_;
    StoreOptions options_;
    int fd_ = -1;
    std::size_t recovered_bytes_ = 0;

    mutable std::mutex mutex_;
    std::vector<VoteRecord> events_;
    mutable std::shared_ptr<const std::vector<VoteRecord>> cached_;
};

// Reads a store file (or any vote log with seq fields) without opening it for writing.
VoteLogSnapshot load_snapshot(const std::filesystem::path& path);

}  // namespace pollcast
