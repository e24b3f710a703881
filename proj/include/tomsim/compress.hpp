#pragma once
#include <cstddef>
#include <string_view>

namespace tomsim {

// Length in bytes of the RFC-1952 (gzip) encoding at maximum compression with
// a fixed zeroed header, so lengths are stable across platforms and runs.
std::size_t gzip_len(std::string_view bytes);

// compressed length / raw length.
double compression_ratio(std::string_view bytes);

}  // namespace tomsim
