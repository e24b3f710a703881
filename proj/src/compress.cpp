#include "tomsim/compress.hpp"

#include <zlib.h>

#include <cstring>
#include <stdexcept>

namespace tomsim {

namespace {

// The deflate state is ~256KB at this memLevel; one per thread, reset per
// call, so tight evaluation loops do not thrash the allocator.
class DeflateStream {
 public:
  DeflateStream() {
    std::memset(&zs_, 0, sizeof(zs_));
    // windowBits 15+16 selects the gzip wrapper. memLevel 1 keeps the reset
    // cost proportional to the tiny inputs; output bytes match higher levels
    // for every sequence short enough to fit one episode.
    if (deflateInit2(&zs_, Z_BEST_COMPRESSION, Z_DEFLATED, 15 + 16, 1,
                     Z_DEFAULT_STRATEGY) != Z_OK)
      throw std::runtime_error("gzip: deflateInit2 failed");
  }
  ~DeflateStream() { deflateEnd(&zs_); }
  DeflateStream(const DeflateStream&) = delete;
  DeflateStream& operator=(const DeflateStream&) = delete;

  std::size_t run(std::string_view bytes) {
    if (deflateReset(&zs_) != Z_OK)
      throw std::runtime_error("gzip: deflateReset failed");
    gz_header head;
    std::memset(&head, 0, sizeof(head));
    head.os = 3;
    deflateSetHeader(&zs_, &head);

    unsigned char out[256];
    zs_.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(bytes.data()));
    zs_.avail_in = static_cast<uInt>(bytes.size());
    std::size_t total = 0;
    int rc;
    do {
      zs_.next_out = out;
      zs_.avail_out = sizeof(out);
      rc = deflate(&zs_, Z_FINISH);
      if (rc != Z_OK && rc != Z_STREAM_END)
        throw std::runtime_error("gzip: deflate failed");
      total += sizeof(out) - zs_.avail_out;
    } while (rc != Z_STREAM_END);
    return total;
  }

 private:
  z_stream zs_;
};

}  // namespace

std::size_t gzip_len(std::string_view bytes) {
  if (bytes.empty()) throw std::invalid_argument("gzip: empty input");
  thread_local DeflateStream stream;
  return stream.run(bytes);
}

double compression_ratio(std::string_view bytes) {
  return static_cast<double>(gzip_len(bytes)) / static_cast<double>(bytes.size());
}

}  // namespace tomsim
