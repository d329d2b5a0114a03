#include "sla/checkpoint.hpp"

#include "sla/error.hpp"

#include <fmt/format.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace sla {

namespace {

constexpr const char* kModule = "checkpoint";
constexpr char kMagic[4] = {'S', 'L', 'A', '1'};
constexpr char kTrailerMagic[4] = {'T', 'R', 'C', '1'};

class Writer {
public:
    void raw(const char* p, std::size_t n) { buf_.insert(buf_.end(), p, p + n); }
    void u32(std::uint32_t v) { le(v, 4); }
    void u64(std::uint64_t v) { le(v, 8); }
    void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
    const std::vector<char>& bytes() const { return buf_; }

private:
    void le(std::uint64_t v, int width) {
        for (int b = 0; b < width; ++b) {
            buf_.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
        }
    }
    std::vector<char> buf_;
};

class Reader {
public:
    Reader(std::vector<char> data, std::string name) : buf_(std::move(data)), name_(std::move(name)) {}

    void raw(char* out, std::size_t n) {
        need(n);
        std::memcpy(out, buf_.data() + pos_, n);
        pos_ += n;
    }
    std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
    std::uint64_t u64() { return le(8); }
    double f64() { return std::bit_cast<double>(le(8)); }
    std::size_t remaining() const { return buf_.size() - pos_; }

    void need_items(std::uint64_t count, std::size_t width) const {
        if (count > remaining() / width) {
            throw IoError(kModule, fmt::format("truncated checkpoint '{}'", name_));
        }
    }

    void need(std::size_t n) const {
        if (remaining() < n) {
            throw IoError(kModule, fmt::format("truncated checkpoint '{}'", name_));
        }
    }

private:
    std::uint64_t le(int width) {
        need(static_cast<std::size_t>(width));
        std::uint64_t v = 0;
        for (int b = 0; b < width; ++b) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + b])) << (8 * b);
        }
        pos_ += static_cast<std::size_t>(width);
        return v;
    }

    std::vector<char> buf_;
    std::size_t pos_ = 0;
    std::string name_;
};

} // namespace

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
    const auto& board = checkpoint.board;
    if (board.recov_counts.size() != board.size()) {
        throw ValidationError(kModule, "inconsistent score board");
    }
    Writer w;
    w.raw(kMagic, 4);
    w.u32(kCheckpointVersion);
    w.u64(board.size());
    w.u32(static_cast<std::uint32_t>(checkpoint.folds));
    w.u64(board.repetitions_done);
    w.u64(board.config_digest);
    for (double v : board.sum_scores) {
        w.f64(v);
    }
    for (auto c : board.recov_counts) {
        w.u64(c);
    }
    w.raw(kTrailerMagic, 4);
    w.u64(checkpoint.resume.records.size());
    for (const auto& rec : checkpoint.resume.records) {
        w.u64(rec.repetitions);
        w.f64(rec.primary);
        w.f64(rec.secondary);
    }
    w.u64(checkpoint.resume.last_snapshot.size());
    for (double v : checkpoint.resume.last_snapshot) {
        w.f64(v);
    }

    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError(kModule, fmt::format("cannot write '{}'", tmp.string()));
        }
        out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
        if (!out) {
            throw IoError(kModule, fmt::format("write failure on '{}'", tmp.string()));
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw IoError(kModule, fmt::format("cannot move checkpoint into '{}': {}", path.string(), ec.message()));
    }
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(kModule, fmt::format("cannot open '{}'", path.string()));
    }
    std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Reader r(std::move(data), path.string());

    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) {
        throw ValidationError(kModule, fmt::format("'{}' is not a checkpoint (bad magic)", path.string()));
    }
    const auto version = r.u32();
    if (version != kCheckpointVersion) {
        throw ValidationError(kModule, fmt::format("unsupported checkpoint version {}", version));
    }
    const auto n = r.u64();
    Checkpoint cp;
    cp.folds = r.u32();
    const auto reps = r.u64();
    const auto digest = r.u64();
    r.need_items(n, 16);
    cp.board = ScoreBoard(n, digest);
    cp.board.repetitions_done = reps;
    for (auto& v : cp.board.sum_scores) {
        v = r.f64();
    }
    for (auto& c : cp.board.recov_counts) {
        c = r.u64();
        if (c > reps) {
            throw ValidationError(kModule, "corrupt checkpoint: count exceeds repetitions");
        }
    }
    r.raw(magic, 4);
    if (std::memcmp(magic, kTrailerMagic, 4) != 0) {
        throw ValidationError(kModule, "corrupt checkpoint: bad trailer magic");
    }
    const auto records = r.u64();
    r.need_items(records, 24);
    cp.resume.records.resize(records);
    for (auto& rec : cp.resume.records) {
        rec.repetitions = r.u64();
        rec.primary = r.f64();
        rec.secondary = r.f64();
    }
    const auto snap = r.u64();
    r.need_items(snap, 8);
    cp.resume.last_snapshot.resize(snap);
    for (auto& v : cp.resume.last_snapshot) {
        v = r.f64();
    }
    if (r.remaining() != 0) {
        throw ValidationError(kModule, "corrupt checkpoint: trailing bytes");
    }
    return cp;
}

Checkpoint restore_checkpoint(const std::filesystem::path& path, std::uint64_t expected_digest, Index n, Index folds) {
    auto cp = read_checkpoint(path);
    if (cp.board.config_digest != expected_digest) {
        throw ValidationError(kModule, fmt::format("config mismatch: checkpoint digest {:016x}, run digest {:016x}",
                                                   cp.board.config_digest, expected_digest));
    }
    if (cp.board.size() != n || cp.folds != folds) {
        throw ValidationError(kModule, fmt::format("config mismatch: checkpoint has N={} K={}, run has N={} K={}",
                                                   cp.board.size(), cp.folds, n, folds));
    }
    return cp;
}

} // namespace sla
