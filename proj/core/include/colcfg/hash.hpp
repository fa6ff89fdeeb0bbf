#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace colcfg {

// 64-bit FNV-1a. Stable across platforms, used for record fingerprints and
// feature hashing of context tokens.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

// Lower-case, zero-padded 16 character hex rendering.
std::string to_hex(std::uint64_t value);

}  // namespace colcfg
