#include "pir/wire.hpp"

#include <unistd.h>

#include <bit>
#include <fstream>
#include <sstream>

namespace pir {

uint32_t element_width(uint32_t q) {
  if (q < 2) throw invalid_argument("element_width: bad field size");
  return (uint32_t(std::bit_width(q - 1)) + 7) / 8;
}

void put_u32(std::string& out, uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(char((v >> s) & 0xff));
}

void put_u64(std::string& out, uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) out.push_back(char((v >> s) & 0xff));
}

void put_element(std::string& out, uint32_t v, uint32_t width) {
  for (int s = int(width - 1) * 8; s >= 0; s -= 8)
    out.push_back(char((v >> s) & 0xff));
}

uint32_t ByteReader::u32() {
  if (pos_ + 4 > data_.size()) throw invalid_argument("wire: truncated u32");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | uint8_t(data_[pos_++]);
  return v;
}

uint64_t ByteReader::u64() {
  if (pos_ + 8 > data_.size()) throw invalid_argument("wire: truncated u64");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | uint8_t(data_[pos_++]);
  return v;
}

uint32_t ByteReader::element(uint32_t width) {
  if (pos_ + width > data_.size())
    throw invalid_argument("wire: truncated element");
  uint32_t v = 0;
  for (uint32_t i = 0; i < width; ++i) v = (v << 8) | uint8_t(data_[pos_++]);
  return v;
}

std::string encode_frame(std::string_view payload) {
  std::string out;
  out.reserve(payload.size() + 4);
  put_u32(out, uint32_t(payload.size()));
  out.append(payload);
  return out;
}

namespace {
constexpr uint32_t kMaxFrame = 1u << 28;

bool read_exact(int fd, char* buf, size_t n, bool eof_ok_at_start) {
  size_t got = 0;
  while (got < n) {
    const ssize_t r = ::read(fd, buf + got, n - got);
    if (r == 0) {
      if (got == 0 && eof_ok_at_start) return false;
      throw invalid_argument("wire: connection closed mid-frame");
    }
    if (r < 0) throw invalid_argument("wire: read failed");
    got += size_t(r);
  }
  return true;
}
}  // namespace

std::optional<std::string> read_frame_fd(int fd) {
  char hdr[4];
  if (!read_exact(fd, hdr, 4, /*eof_ok_at_start=*/true)) return std::nullopt;
  uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len = (len << 8) | uint8_t(hdr[i]);
  if (len > kMaxFrame) throw invalid_argument("wire: oversized frame");
  std::string payload(len, '\0');
  if (len) read_exact(fd, payload.data(), len, /*eof_ok_at_start=*/false);
  return payload;
}

void write_frame_fd(int fd, std::string_view payload) {
  const std::string framed = encode_frame(payload);
  size_t sent = 0;
  while (sent < framed.size()) {
    const ssize_t w = ::write(fd, framed.data() + sent, framed.size() - sent);
    if (w <= 0) throw invalid_argument("wire: write failed");
    sent += size_t(w);
  }
}

std::string encode_query(const SchemeParams& prm, const QueryMsg& msg) {
  const uint32_t width = element_width(prm.q);
  std::string out;
  put_u32(out, prm.N);
  put_u32(out, prm.T);
  put_u32(out, prm.M);
  put_u32(out, uint32_t(prm.L));
  put_u32(out, prm.q);
  put_u32(out, msg.server);
  put_u32(out, uint32_t(msg.sums.size()));
  for (const auto& block : msg.sums) {
    if (block.size() != size_t(prm.M) * prm.L)
      throw invalid_argument("encode_query: block size mismatch");
    for (uint32_t v : block) put_element(out, v, width);
  }
  return out;
}

QueryHeader peek_query_header(std::string_view payload) {
  ByteReader r(payload);
  QueryHeader h;
  h.N = r.u32();
  h.T = r.u32();
  h.M = r.u32();
  h.L = r.u32();
  h.q = r.u32();
  h.server = r.u32();
  h.count = r.u32();
  return h;
}

QueryMsg decode_query(std::string_view payload, const SchemeParams& prm) {
  ByteReader r(payload);
  const uint32_t N = r.u32(), T = r.u32(), M = r.u32(), L = r.u32(),
                 q = r.u32(), server = r.u32(), count = r.u32();
  if (N != prm.N || T != prm.T || M != prm.M || L != prm.L || q != prm.q)
    throw invalid_argument("decode_query: parameter mismatch");
  if (server < 1 || server > N)
    throw invalid_argument("decode_query: bad server index");
  const uint32_t width = element_width(q);
  QueryMsg msg;
  msg.server = server;
  msg.sums.resize(count);
  for (auto& block : msg.sums) {
    block.resize(size_t(M) * L);
    for (auto& v : block) {
      v = r.element(width);
      if (v >= q) throw invalid_argument("decode_query: element out of range");
    }
  }
  if (!r.done()) throw invalid_argument("decode_query: trailing bytes");
  return msg;
}

std::string encode_answer(const std::vector<uint32_t>& answer, uint32_t q) {
  const uint32_t width = element_width(q);
  std::string out;
  put_u32(out, uint32_t(answer.size()));
  for (uint32_t v : answer) put_element(out, v, width);
  return out;
}

std::vector<uint32_t> decode_answer(std::string_view payload, uint32_t q) {
  ByteReader r(payload);
  const uint32_t count = r.u32();
  const uint32_t width = element_width(q);
  std::vector<uint32_t> out(count);
  for (auto& v : out) {
    v = r.element(width);
    if (v >= q) throw invalid_argument("decode_answer: element out of range");
  }
  if (!r.done()) throw invalid_argument("decode_answer: trailing bytes");
  return out;
}

Records load_records_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_argument("cannot open records file: " + path);
  Records r;
  uint32_t M = 0;
  if (!(in >> r.q >> r.L >> M))
    throw invalid_argument("records file: bad header (want: q L M)");
  r.w.resize(M);
  for (auto& rec : r.w) {
    rec.resize(r.L);
    for (auto& v : rec)
      if (!(in >> v)) throw invalid_argument("records file: truncated data");
  }
  r.validate();
  return r;
}

void save_records_file(const std::string& path, const Records& r) {
  std::ostringstream out;
  out << r.q << " " << r.L << " " << r.w.size() << "\n";
  for (const auto& rec : r.w) {
    for (size_t i = 0; i < rec.size(); ++i)
      out << rec[i] << (i + 1 == rec.size() ? "" : " ");
    out << "\n";
  }
  write_file(path, out.str());
}

BlockGenerator load_generator_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_argument("cannot open generator file: " + path);
  BlockGenerator g;
  if (!(in >> g.prm.N >> g.prm.T >> g.prm.ell >> g.prm.q))
    throw invalid_argument("generator file: bad header (want: N T ell q)");
  g.prm.validate();
  const auto f = Field::make(g.prm.q);
  const uint32_t rows = g.prm.T * g.prm.ell, cols = g.prm.N * g.prm.ell;
  g.g = Mat(f, rows, cols);
  for (uint32_t i = 0; i < rows; ++i)
    for (uint32_t j = 0; j < cols; ++j) {
      uint32_t v = 0;
      if (!(in >> v)) throw invalid_argument("generator file: truncated data");
      if (v >= g.prm.q)
        throw invalid_argument("generator file: entry out of range");
      g.g.at(i, j) = v;
    }
  return g;
}

void save_generator_file(const std::string& path, const BlockGenerator& g) {
  std::ostringstream out;
  out << g.prm.N << " " << g.prm.T << " " << g.prm.ell << " " << g.prm.q
      << "\n";
  for (uint32_t i = 0; i < g.g.rows(); ++i) {
    for (uint32_t j = 0; j < g.g.cols(); ++j)
      out << g.g.at(i, j) << (j + 1 == g.g.cols() ? "" : " ");
    out << "\n";
  }
  write_file(path, out.str());
}

namespace {
constexpr char kTranscriptMagic[4] = {'P', 'I', 'R', 'T'};
constexpr uint32_t kTranscriptVersion = 1;
}  // namespace

std::string encode_transcript(const Transcript& t) {
  std::string out;
  out.append(kTranscriptMagic, 4);
  put_u32(out, kTranscriptVersion);
  put_u32(out, t.N);
  put_u32(out, t.T);
  put_u32(out, t.M);
  put_u32(out, t.q);
  put_u64(out, t.L);
  put_u32(out, uint32_t(t.entries.size()));
  const uint32_t width = element_width(t.q);
  for (const auto& e : t.entries) {
    put_u32(out, e.theta);
    put_u64(out, e.seed);
    if (e.query_payloads.size() != t.N || e.answer_payloads.size() != t.N)
      throw invalid_argument("encode_transcript: payload count mismatch");
    for (const auto& p : e.query_payloads) out += encode_frame(p);
    for (const auto& p : e.answer_payloads) out += encode_frame(p);
    if (e.reconstructed.size() != t.L)
      throw invalid_argument("encode_transcript: record length mismatch");
    for (uint32_t v : e.reconstructed) put_element(out, v, width);
  }
  return out;
}

Transcript decode_transcript(std::string_view data) {
  if (data.size() < 4 || std::string_view(data.data(), 4) !=
                             std::string_view(kTranscriptMagic, 4))
    throw invalid_argument("transcript: bad magic");
  ByteReader r(data.substr(4));
  if (r.u32() != kTranscriptVersion)
    throw invalid_argument("transcript: unsupported version");
  Transcript t;
  t.N = r.u32();
  t.T = r.u32();
  t.M = r.u32();
  t.q = r.u32();
  t.L = r.u64();
  const uint32_t count = r.u32();
  const uint32_t width = element_width(t.q);
  auto read_framed = [&]() {
    const uint32_t len = r.u32();
    std::string payload;
    payload.reserve(len);
    for (uint32_t i = 0; i < len; ++i) payload.push_back(char(r.element(1)));
    return payload;
  };
  t.entries.resize(count);
  for (auto& e : t.entries) {
    e.theta = r.u32();
    e.seed = r.u64();
    e.query_payloads.resize(t.N);
    for (auto& p : e.query_payloads) p = read_framed();
    e.answer_payloads.resize(t.N);
    for (auto& p : e.answer_payloads) p = read_framed();
    e.reconstructed.resize(t.L);
    for (auto& v : e.reconstructed) v = r.element(width);
  }
  if (!r.done()) throw invalid_argument("transcript: trailing bytes");
  return t;
}

void save_transcript(const std::string& path, const Transcript& t) {
  write_file(path, encode_transcript(t));
}

Transcript load_transcript(const std::string& path) {
  return decode_transcript(read_file(path));
}

std::string restricted_query_bytes(const SchemeParams& prm,
                                   const std::vector<QueryMsg>& queries,
                                   const std::vector<uint32_t>& servers0) {
  std::string out;
  for (uint32_t i0 : servers0) {
    if (i0 >= queries.size())
      throw invalid_argument("restricted_query_bytes: server out of range");
    out += encode_query(prm, queries[i0]);
  }
  return out;
}

uint64_t fnv1a64(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw invalid_argument("cannot write file: " + path);
  out.write(data.data(), std::streamsize(data.size()));
  if (!out) throw invalid_argument("short write: " + path);
}

}  // namespace pir
