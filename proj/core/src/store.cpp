#include "pollcast/store.hpp"

#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <fstream>
#include <sstream>
#include <sys/stat.h>
#include <unistd.h>

#include "pollcast/error.hpp"
#include "pollcast/ingest.hpp"

namespace pollcast {

std::vector<VoteRecord> VoteLogSnapshot::history(std::string_view device_id) const {
    std::vector<VoteRecord> out;
    for (const auto& e : *events_)
        if (e.device_id == device_id) out.push_back(e);
    return out;
}

namespace {

struct Scan {
    std::vector<VoteRecord> events;
    std::size_t good_bytes = 0;  // offset just past the last complete record
};

// Parses complete lines; a final line without a newline is a torn write.
Scan scan_log(const std::string& bytes, const std::filesystem::path& path) {
    Scan scan;
    std::size_t offset = 0;
    std::uint64_t last_seq = 0;
    while (offset < bytes.size()) {
        const auto nl = bytes.find('\n', offset);
        if (nl == std::string::npos) break;
        std::string_view line(bytes.data() + offset, nl - offset);
        if (!line.empty()) {
            VoteRecord rec;
            try {
                rec = parse_vote_line(line, nullptr);
            } catch (const Error& e) {
                throw Error(ErrorCode::corrupt_storage, path.string() + ": corrupt record at byte offset " +
                                                            std::to_string(offset) + ": " + e.what());
            }
            if (rec.seq <= last_seq)
                throw Error(ErrorCode::corrupt_storage, path.string() + ": non-increasing seq at byte offset " +
                                                            std::to_string(offset));
            last_seq = rec.seq;
            scan.events.push_back(std::move(rec));
        }
        offset = nl + 1;
        scan.good_bytes = offset;
    }
    return scan;
}

std::string read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string errno_text() { return std::strerror(errno); }

}  // namespace

VoteStore::VoteStore(std::filesystem::path path, StoreOptions options)
    : path_(std::move(path)), options_(options) {
    if (path_.empty()) return;
    const auto bytes = read_all(path_);
    auto scan = scan_log(bytes, path_);
    events_ = std::move(scan.events);

    fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorCode::storage, "cannot open store '" + path_.string() + "': " + errno_text());
    if (scan.good_bytes < bytes.size()) {
        recovered_bytes_ = bytes.size() - scan.good_bytes;
        if (::ftruncate(fd_, static_cast<off_t>(scan.good_bytes)) != 0)
            throw Error(ErrorCode::storage, "cannot truncate torn record: " + errno_text());
        ::fsync(fd_);
    }
}

VoteStore::~VoteStore() {
    if (fd_ >= 0) {
        ::fsync(fd_);
        ::close(fd_);
    }
}

void VoteStore::set_fail_next_write_after(std::optional<std::size_t> bytes) {
    std::lock_guard lock(mutex_);
    options_.fail_next_write_after = bytes;
}

std::uint64_t VoteStore::append(VoteRecord record) {
    std::lock_guard lock(mutex_);
    record.seq = (events_.empty() ? 0 : events_.back().seq) + 1;

    if (fd_ >= 0) {
        const auto line = serialize_vote_record(record) + "\n";
        struct stat st {};
        if (::fstat(fd_, &st) != 0) throw Error(ErrorCode::storage, "store unavailable: " + errno_text());
        const auto before = st.st_size;

        std::size_t limit = line.size();
        const bool inject = options_.fail_next_write_after.has_value();
        if (inject) limit = std::min(limit, *options_.fail_next_write_after);
        options_.fail_next_write_after.reset();

        std::size_t written = 0;
        bool ok = true;
        while (written < limit) {
            const auto n = ::write(fd_, line.data() + written, limit - written);
            if (n < 0) {
                if (errno == EINTR) continue;
                ok = false;
                break;
            }
            written += static_cast<std::size_t>(n);
        }
        if (inject || !ok || (options_.sync && ::fdatasync(fd_) != 0)) {
            // roll back so the log never holds a partial record
            if (::ftruncate(fd_, before) == 0) ::fdatasync(fd_);
            throw Error(ErrorCode::storage, "append failed; vote not recorded");
        }
    }
    events_.push_back(std::move(record));
    return events_.back().seq;
}

VoteLogSnapshot VoteStore::snapshot() const {
    std::lock_guard lock(mutex_);
    if (!cached_ || cached_->size() != events_.size())
        cached_ = std::make_shared<const std::vector<VoteRecord>>(events_);
    return VoteLogSnapshot(cached_);
}

std::uint64_t VoteStore::high_water() const {
    std::lock_guard lock(mutex_);
    return events_.empty() ? 0 : events_.back().seq;
}

void VoteStore::flush() {
    std::lock_guard lock(mutex_);
    if (fd_ >= 0) ::fsync(fd_);
}

VoteLogSnapshot load_snapshot(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path))
        throw Error(ErrorCode::corrupt_storage, "store '" + path.string() + "' does not exist");
    auto scan = scan_log(read_all(path), path);
    return VoteLogSnapshot(std::make_shared<const std::vector<VoteRecord>>(std::move(scan.events)));
}

}  // namespace pollcast
