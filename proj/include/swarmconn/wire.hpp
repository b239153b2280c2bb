#pragma once

// Canonical byte layout of simulated radio traffic (schema tag 1):
//
//   u8  schema tag
//   u8  kind                  1 beacon, 2 digest, 3 flood
//   u32 sender, u32 origin, u64 origin_iteration, u32 hop_count
//   beacon:  u32 dim, f64[dim] position, f64 fiedler, u64 iteration
//   digest:  u32 count, count x (u32 id, u32 dim, f64[dim] relative)
//   flood:   u64 round_id, u32 origin, f64 x, f64 x2, f64 xlx
//
// Integers and IEEE-754 doubles are little-endian and fixed width.

#include "swarmconn/netsim.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

namespace swarmconn::wire {

inline constexpr std::uint8_t kSchemaTag = 1;

class WireError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> encode(const net::Message& msg);

/// Throws WireError on a wrong schema tag, unknown kind, truncation or
/// trailing bytes.
net::Message decode(std::span<const std::uint8_t> bytes);

/// Trace file record: u64 tick, u32 length, `length` message bytes.
struct TraceRecord {
    Tick tick = 0;
    net::Message message;
};

void write_trace_record(std::ostream& out, Tick tick, const net::Message& msg);

/// Reads records until EOF; throws WireError on a truncated record.
std::vector<TraceRecord> read_trace(std::istream& in);

}  // namespace swarmconn::wire
