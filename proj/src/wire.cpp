#include "swarmconn/wire.hpp"

#include <bit>
#include <istream>
#include <ostream>

namespace swarmconn::wire {

namespace {

class Writer {
public:
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u32(std::uint32_t v) { little_endian(v, 4); }
    void u64(std::uint64_t v) { little_endian(v, 8); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void vec(const Vec& v) {
        u32(static_cast<std::uint32_t>(v.size()));
        for (Eigen::Index i = 0; i < v.size(); ++i) f64(v(i));
    }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    void little_endian(std::uint64_t v, int width) {
        for (int i = 0; i < width; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> bytes_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(little_endian(1)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(little_endian(4)); }
    std::uint64_t u64() { return little_endian(8); }
    double f64() { return std::bit_cast<double>(u64()); }
    Vec vec() {
        const auto dim = u32();
        if (dim > remaining() / 8) throw WireError("vector length exceeds message");
        Vec v(dim);
        for (std::uint32_t i = 0; i < dim; ++i) v(i) = f64();
        return v;
    }
    [[nodiscard]] std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    std::uint64_t little_endian(int width) {
        if (remaining() < static_cast<std::size_t>(width)) throw WireError("truncated message");
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i) v |= std::uint64_t{bytes_[pos_ + i]} << (8 * i);
        pos_ += static_cast<std::size_t>(width);
        return v;
    }
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode(const net::Message& msg) {
    Writer w;
    w.u8(kSchemaTag);
    w.u8(static_cast<std::uint8_t>(msg.kind));
    w.u32(msg.sender);
    w.u32(msg.origin);
    w.u64(msg.origin_iteration);
    w.u32(msg.hop_count);
    switch (msg.kind) {
        case net::MessageKind::Beacon: {
            const auto& p = std::get<net::BeaconPayload>(msg.payload);
            w.vec(p.position);
            w.f64(p.fiedler);
            w.u64(p.iteration);
            break;
        }
        case net::MessageKind::Digest: {
            const auto& p = std::get<net::DigestPayload>(msg.payload);
            w.u32(static_cast<std::uint32_t>(p.neighbors.size()));
            for (const auto& e : p.neighbors) {
                w.u32(e.id);
                w.vec(e.relative);
            }
            break;
        }
        case net::MessageKind::Flood: {
            const auto& p = std::get<net::FloodPayload>(msg.payload);
            w.u64(p.round_id);
            w.u32(p.origin);
            w.f64(p.x);
            w.f64(p.x2);
            w.f64(p.xlx);
            break;
        }
    }
    return w.take();
}

net::Message decode(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    if (r.u8() != kSchemaTag) throw WireError("unsupported schema tag");
    net::Message msg;
    const auto kind = r.u8();
    if (kind < 1 || kind > 3) throw WireError("unknown message kind");
    msg.kind = static_cast<net::MessageKind>(kind);
    msg.sender = r.u32();
    msg.origin = r.u32();
    msg.origin_iteration = r.u64();
    msg.hop_count = r.u32();
    switch (msg.kind) {
        case net::MessageKind::Beacon: {
            net::BeaconPayload p;
            p.position = r.vec();
            p.fiedler = r.f64();
            p.iteration = r.u64();
            msg.payload = std::move(p);
            break;
        }
        case net::MessageKind::Digest: {
            net::DigestPayload p;
            const auto count = r.u32();
            if (count > r.remaining() / 8) throw WireError("digest length exceeds message");
            p.neighbors.reserve(count);
            for (std::uint32_t i = 0; i < count; ++i) {
                net::DigestEntry e;
                e.id = r.u32();
                e.relative = r.vec();
                p.neighbors.push_back(std::move(e));
            }
            msg.payload = std::move(p);
            break;
        }
        case net::MessageKind::Flood: {
            net::FloodPayload p;
            p.round_id = r.u64();
            p.origin = r.u32();
            p.x = r.f64();
            p.x2 = r.f64();
            p.xlx = r.f64();
            msg.payload = p;
            break;
        }
    }
    if (r.remaining() != 0) throw WireError("trailing bytes after message");
    return msg;
}

void write_trace_record(std::ostream& out, Tick tick, const net::Message& msg) {
    const auto body = encode(msg);
    Writer header;
    header.u64(static_cast<std::uint64_t>(tick));
    header.u32(static_cast<std::uint32_t>(body.size()));
    const auto head = header.take();
    out.write(reinterpret_cast<const char*>(head.data()), static_cast<std::streamsize>(head.size()));
    out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
}

std::vector<TraceRecord> read_trace(std::istream& in) {
    std::vector<TraceRecord> records;
    std::vector<std::uint8_t> head(12);
    while (in.read(reinterpret_cast<char*>(head.data()), 12)) {
        Reader hr(head);
        const auto tick = static_cast<Tick>(hr.u64());
        const auto length = hr.u32();
        std::vector<std::uint8_t> body(length);
        if (!in.read(reinterpret_cast<char*>(body.data()), length))
            throw WireError("truncated trace record");
        records.push_back(TraceRecord{tick, decode(body)});
    }
    if (in.gcount() != 0) throw WireError("truncated trace header");
    return records;
}

}  // namespace swarmconn::wire
