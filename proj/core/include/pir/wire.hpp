#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pir/protocol.hpp"

namespace pir {

// --- Byte-level primitives -------------------------------------------------
// All integers on the wire are big-endian. Field elements are fixed-width
// integers of element_width(q) bytes (the bytes needed for q - 1).

uint32_t element_width(uint32_t q);

void put_u32(std::string& out, uint32_t v);
void put_u64(std::string& out, uint64_t v);
void put_element(std::string& out, uint32_t v, uint32_t width);

// Sequential reader over a byte buffer; throws invalid_argument on truncation.
class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}
  uint32_t u32();
  uint64_t u64();
  uint32_t element(uint32_t width);
  bool done() const { return pos_ == data_.size(); }
  size_t remaining() const { return data_.size() - pos_; }

 private:
  std::string_view data_;
  size_t pos_ = 0;
};

// --- Framing ----------------------------------------------------------------
// A frame is a 4-byte big-endian payload length followed by the payload.

std::string encode_frame(std::string_view payload);
// Reads one frame from a blocking fd; empty optional on clean EOF at a frame
// boundary, throws on mid-frame EOF or oversized frames.
std::optional<std::string> read_frame_fd(int fd);
void write_frame_fd(int fd, std::string_view payload);

// --- Query / answer payloads -------------------------------------------------
// Query: header N, T, M, L, q, server (1-based), sum count (u32 each), then
// each sum as M*L field elements (record-major).
// Answer: count (u32), then that many field elements.

std::string encode_query(const SchemeParams& prm, const QueryMsg& msg);
QueryMsg decode_query(std::string_view payload, const SchemeParams& prm);
// Decodes only the header, for servers that validate before trusting sizes.
struct QueryHeader {
  uint32_t N, T, M, L, q, server, count;
};
QueryHeader peek_query_header(std::string_view payload);

std::string encode_answer(const std::vector<uint32_t>& answer, uint32_t q);
std::vector<uint32_t> decode_answer(std::string_view payload, uint32_t q);

// --- Text file formats --------------------------------------------------------
// Records file: line "q L M" then M lines of L integers.
// Generator file: line "N T ell q" then T*ell lines of N*ell integers.

Records load_records_file(const std::string& path);
void save_records_file(const std::string& path, const Records& r);

BlockGenerator load_generator_file(const std::string& path);
void save_generator_file(const std::string& path, const BlockGenerator& g);

// --- Transcripts ---------------------------------------------------------------
// Binary capture of full runs: magic "PIRT", version, parameters, then one
// entry per retrieval (theta, seed, N query frames, N answer frames, the
// reconstructed record).

struct TranscriptEntry {
  uint32_t theta = 0;
  uint64_t seed = 0;
  std::vector<std::string> query_payloads;   // size N
  std::vector<std::string> answer_payloads;  // size N
  std::vector<uint32_t> reconstructed;       // size L
};

struct Transcript {
  uint32_t N = 0, T = 0, M = 0, q = 0;
  uint64_t L = 0;
  std::vector<TranscriptEntry> entries;
};

std::string encode_transcript(const Transcript& t);
Transcript decode_transcript(std::string_view data);
void save_transcript(const std::string& path, const Transcript& t);
Transcript load_transcript(const std::string& path);

// --- Audit serialization ----------------------------------------------------
// The view of a colluding subset: the full query payloads of the listed
// servers (ascending), concatenated. Equality of the distribution of these
// byte strings across targets is exactly the privacy claim.

std::string restricted_query_bytes(const SchemeParams& prm,
                                   const std::vector<QueryMsg>& queries,
                                   const std::vector<uint32_t>& servers0);

uint64_t fnv1a64(std::string_view bytes);
inline uint16_t fold16(uint64_t h) {
  return uint16_t((h ^ (h >> 16) ^ (h >> 32) ^ (h >> 48)) & 0xffff);
}

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view data);

}  // namespace pir
