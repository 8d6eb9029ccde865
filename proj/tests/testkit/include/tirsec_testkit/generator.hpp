#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace tirsec::testkit {

/// Random well-typed program: at most 4 classes and 6 functions with
/// structured branches, bounded loops, heap traffic and virtual and indirect
/// calls. Same seed, same text. `size` is the approximate instruction budget
/// (capped at 200).
std::string generate_program(std::uint64_t seed, std::size_t size);

/// Rules matching the externals used by generated programs.
std::string generated_rules();

/// Large program for throughput runs: many small functions in a call tree,
/// roughly `instructions` instructions in total.
std::string generate_synthetic(std::size_t instructions, std::uint64_t seed = 1);

}  // namespace tirsec::testkit
