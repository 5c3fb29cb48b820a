#include "pir/harness.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <thread>

namespace pir {
namespace {

Records obtain_records(const RunConfig& cfg, const SchemeParams& prm) {
  if (cfg.records_path) {
    Records r = load_records_file(*cfg.records_path);
    if (r.q != prm.q || r.L != prm.L || r.w.size() != prm.M)
      throw invalid_argument(
          "records file does not match the scheme parameters (q, L, M)");
    return r;
  }
  Rng rng(mix_seed(cfg.seed, 0, 0xdb));
  return random_records(prm.q, prm.L, prm.M, rng);
}

std::string first_mismatch(const std::vector<uint32_t>& got,
                           const std::vector<uint32_t>& want) {
  for (size_t i = 0; i < want.size(); ++i) {
    if (i >= got.size())
      return "reconstructed record too short (" + std::to_string(got.size()) +
             " < " + std::to_string(want.size()) + ")";
    if (got[i] != want[i])
      return "symbol " + std::to_string(i) + ": got " +
             std::to_string(got[i]) + ", want " + std::to_string(want[i]);
  }
  return got.size() == want.size() ? "" : "reconstructed record too long";
}

struct ForkedServer {
  pid_t pid = -1;
  int conn = -1;
};

// Spawns one process per server, each answering framed queries on a
// loopback TCP socket until the connection closes.
std::vector<ForkedServer> start_servers(const SchemeParams& prm,
                                        const Records& records) {
  struct Pending {
    pid_t pid;
    uint16_t port;
  };
  std::vector<Pending> pending;
  std::vector<int> parent_listeners;
  for (uint32_t i0 = 0; i0 < prm.N; ++i0) {
    const int lfd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (lfd < 0) throw integrity_error("socket() failed");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    if (::bind(lfd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
        ::listen(lfd, 1) != 0) {
      ::close(lfd);
      throw integrity_error("bind/listen failed");
    }
    socklen_t alen = sizeof(addr);
    if (::getsockname(lfd, reinterpret_cast<sockaddr*>(&addr), &alen) != 0) {
      ::close(lfd);
      throw integrity_error("getsockname failed");
    }
    const pid_t pid = ::fork();
    if (pid < 0) {
      ::close(lfd);
      throw integrity_error("fork failed");
    }
    if (pid == 0) {
      // Server child: drop other servers' listeners, answer until EOF.
      for (int fd : parent_listeners) ::close(fd);
      const int conn = ::accept(lfd, nullptr, nullptr);
      ::close(lfd);
      if (conn < 0) ::_exit(2);
      try {
        while (auto frame = read_frame_fd(conn)) {
          const QueryMsg msg = decode_query(*frame, prm);
          const auto ans = answer_query(prm, records, msg);
          write_frame_fd(conn, encode_answer(ans, prm.q));
        }
      } catch (...) {
        ::close(conn);
        ::_exit(3);
      }
      ::close(conn);
      ::_exit(0);
    }
    parent_listeners.push_back(lfd);
    pending.push_back({pid, ntohs(addr.sin_port)});
  }
  // All children are forked before any connection exists, so no child holds
  // a duplicate of a sibling's connection and EOF propagates cleanly.
  std::vector<ForkedServer> out;
  for (uint32_t i0 = 0; i0 < prm.N; ++i0) {
    ::close(parent_listeners[i0]);
    const int cfd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(pending[i0].port);
    if (cfd < 0 ||
        ::connect(cfd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      if (cfd >= 0) ::close(cfd);
      throw integrity_error("connect to server process failed");
    }
    out.push_back({pending[i0].pid, cfd});
  }
  return out;
}

void stop_servers(std::vector<ForkedServer>& servers) {
  for (auto& s : servers)
    if (s.conn >= 0) {
      ::close(s.conn);
      s.conn = -1;
    }
  for (auto& s : servers)
    if (s.pid > 0) {
      int status = 0;
      ::waitpid(s.pid, &status, 0);
      s.pid = -1;
    }
}

std::vector<std::vector<uint32_t>> combinations(uint32_t n, uint32_t k,
                                                uint32_t limit) {
  std::vector<std::vector<uint32_t>> out;
  std::vector<uint32_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    out.push_back(idx);
    if (out.size() == limit) return out;
    uint32_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) return out;
    ++idx[i - 1];
    for (uint32_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

RunReport run_protocol(const RunConfig& cfg) {
  RunReport report;
  report.prm = derive_parameters(cfg.N, cfg.T, cfg.M, cfg.q);
  const auto& prm = report.prm;
  const auto codes = build_scheme_codes(prm);
  const Records records = obtain_records(cfg, prm);

  std::vector<uint32_t> thetas;
  if (cfg.only_theta) {
    if (*cfg.only_theta < 1 || *cfg.only_theta > prm.M)
      throw invalid_argument("run_protocol: theta out of range");
    thetas.push_back(*cfg.only_theta);
  } else {
    for (uint32_t th = 1; th <= prm.M; ++th) thetas.push_back(th);
  }

  std::vector<ForkedServer> servers;
  if (cfg.mode == RunMode::kSockets) servers = start_servers(prm, records);

  Transcript transcript;
  transcript.N = prm.N;
  transcript.T = prm.T;
  transcript.M = prm.M;
  transcript.q = prm.q;
  transcript.L = prm.L;

  report.all_exact = true;
  try {
    for (uint32_t theta : thetas) {
      const uint64_t theta_seed = mix_seed(cfg.seed, theta);
      Rng rng(theta_seed);
      const Secrets secrets = sample_secrets(prm, rng);
      const QueryPlan plan = build_query_plan(prm, theta);
      const auto queries = generate_queries(prm, codes, plan, secrets);

      std::vector<std::string> query_payloads(prm.N);
      for (uint32_t i0 = 0; i0 < prm.N; ++i0)
        query_payloads[i0] = encode_query(prm, queries[i0]);

      std::vector<std::string> answer_payloads(prm.N);
      if (cfg.mode == RunMode::kSockets) {
        std::vector<std::thread> workers;
        std::vector<std::string> errors(prm.N);
        for (uint32_t i0 = 0; i0 < prm.N; ++i0) {
          workers.emplace_back([&, i0]() {
            try {
              write_frame_fd(servers[i0].conn, query_payloads[i0]);
              auto resp = read_frame_fd(servers[i0].conn);
              if (!resp) throw integrity_error("server closed early");
              answer_payloads[i0] = std::move(*resp);
            } catch (const std::exception& e) {
              errors[i0] = e.what();
            }
          });
        }
        for (auto& w : workers) w.join();
        for (uint32_t i0 = 0; i0 < prm.N; ++i0)
          if (!errors[i0].empty())
            throw integrity_error("server " + std::to_string(i0 + 1) +
                                  " failed: " + errors[i0]);
      } else {
        for (uint32_t i0 = 0; i0 < prm.N; ++i0)
          answer_payloads[i0] =
              encode_answer(answer_query(prm, records, queries[i0]), prm.q);
      }

      std::vector<std::vector<uint32_t>> answers(prm.N);
      uint64_t downloaded = 0;
      for (uint32_t i0 = 0; i0 < prm.N; ++i0) {
        answers[i0] = decode_answer(answer_payloads[i0], prm.q);
        downloaded += answers[i0].size();
      }
      if (cfg.corrupt_server) {
        const uint32_t s0 = *cfg.corrupt_server - 1;
        if (*cfg.corrupt_server < 1 || s0 >= prm.N || answers[s0].empty())
          throw invalid_argument("run_protocol: corrupt_server out of range");
        answers[s0][0] = (answers[s0][0] + 1) % prm.q;
      }
      const auto got = reconstruct(prm, codes, plan, secrets, answers);

      ThetaOutcome outcome;
      outcome.theta = theta;
      outcome.downloaded = downloaded;
      outcome.mismatch = first_mismatch(got, records.w[theta - 1]);
      outcome.exact = outcome.mismatch.empty();
      report.all_exact = report.all_exact && outcome.exact;
      report.outcomes.push_back(outcome);

      if (cfg.transcript_path) {
        TranscriptEntry e;
        e.theta = theta;
        e.seed = theta_seed;
        e.query_payloads = std::move(query_payloads);
        e.answer_payloads = std::move(answer_payloads);
        e.reconstructed = got;
        transcript.entries.push_back(std::move(e));
      }
    }
  } catch (...) {
    stop_servers(servers);
    throw;
  }
  stop_servers(servers);
  if (cfg.transcript_path) save_transcript(*cfg.transcript_path, transcript);
  return report;
}

double chi_square_quantile(uint64_t df, double significance) {
  if (df == 0) return 0.0;
  if (significance <= 0 || significance >= 1)
    throw invalid_argument("chi_square_quantile: significance in (0,1)");
  // z: upper-significance standard normal quantile, by bisection on erfc.
  double lo = 0.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double tail = 0.5 * std::erfc(mid / std::sqrt(2.0));
    (tail > significance ? lo : hi) = mid;
  }
  const double z = 0.5 * (lo + hi);
  const double h = 2.0 / (9.0 * double(df));
  const double cube = 1.0 - h + z * std::sqrt(h);
  return double(df) * cube * cube * cube;
}

namespace {

struct HashedCounts {
  // counts[theta-1][cell]
  std::vector<std::vector<uint64_t>> rows;
};

SubsetVerdict evaluate_subset(const std::vector<uint32_t>& subset,
                              const HashedCounts& hc, double significance) {
  const uint32_t M = uint32_t(hc.rows.size());
  SubsetVerdict v;
  v.servers0 = subset;

  // Pool cells (ascending hash value) until each bin holds enough mass for
  // the chi-square approximation to be sound.
  const uint64_t min_bin = 20ull * M;
  std::vector<std::vector<uint64_t>> bins;
  std::vector<uint64_t> cur(M, 0);
  uint64_t cur_total = 0;
  for (uint32_t cell = 0; cell < 65536; ++cell) {
    uint64_t col = 0;
    for (uint32_t m = 0; m < M; ++m) {
      cur[m] += hc.rows[m][cell];
      col += hc.rows[m][cell];
    }
    cur_total += col;
    if (cur_total >= min_bin) {
      bins.push_back(cur);
      cur.assign(M, 0);
      cur_total = 0;
    }
  }
  if (cur_total > 0) {
    if (bins.empty()) {
      bins.push_back(cur);
    } else {
      for (uint32_t m = 0; m < M; ++m) bins.back()[m] += cur[m];
    }
  }

  v.bins = uint32_t(bins.size());
  if (bins.size() < 2 || M < 2) {
    v.df = 0;
    v.threshold = 0;
    v.rejected = false;
    return v;
  }
  std::vector<double> row_tot(M, 0), col_tot(bins.size(), 0);
  double grand = 0;
  for (size_t b = 0; b < bins.size(); ++b)
    for (uint32_t m = 0; m < M; ++m) {
      row_tot[m] += double(bins[b][m]);
      col_tot[b] += double(bins[b][m]);
      grand += double(bins[b][m]);
    }
  double stat = 0;
  for (size_t b = 0; b < bins.size(); ++b)
    for (uint32_t m = 0; m < M; ++m) {
      const double expected = row_tot[m] * col_tot[b] / grand;
      if (expected > 0) {
        const double d = double(bins[b][m]) - expected;
        stat += d * d / expected;
      }
    }
  v.statistic = stat;
  v.df = (uint64_t(bins.size()) - 1) * (M - 1);
  v.threshold = chi_square_quantile(v.df, significance);
  v.rejected = stat > v.threshold;
  return v;
}

}  // namespace

std::vector<std::vector<uint32_t>> collusion_subsets(uint32_t N, uint32_t T,
                                                     uint32_t limit) {
  return combinations(N, T, limit == 0 ? 0xffffffffu : limit);
}

PrivacyAuditReport audit_privacy_sampled(
    const SchemeParams& prm, uint64_t seed, uint64_t samples,
    const std::vector<std::vector<uint32_t>>& subsets, double significance) {
  if (samples == 0) throw invalid_argument("audit: need samples >= 1");
  for (const auto& sub : subsets) {
    if (sub.size() != prm.T)
      throw invalid_argument("audit: each colluding subset must have size T");
    for (size_t i = 0; i < sub.size(); ++i)
      if (sub[i] >= prm.N || (i > 0 && sub[i] <= sub[i - 1]))
        throw invalid_argument(
            "audit: subsets are ascending 0-based server lists");
  }
  const auto codes = build_scheme_codes(prm);
  std::vector<QueryPlan> plans;
  for (uint32_t th = 1; th <= prm.M; ++th)
    plans.push_back(build_query_plan(prm, th));

  std::vector<HashedCounts> counts(subsets.size());
  for (auto& hc : counts)
    hc.rows.assign(prm.M, std::vector<uint64_t>(65536, 0));

  for (uint32_t th = 1; th <= prm.M; ++th) {
    for (uint64_t s = 0; s < samples; ++s) {
      Rng rng(mix_seed(seed, th, s));
      const Secrets secrets = sample_secrets(prm, rng);
      const auto queries = generate_queries(prm, codes, plans[th - 1], secrets);
      for (size_t u = 0; u < subsets.size(); ++u) {
        const auto bytes = restricted_query_bytes(prm, queries, subsets[u]);
        counts[u].rows[th - 1][fold16(fnv1a64(bytes))]++;
      }
    }
  }

  PrivacyAuditReport report;
  report.exhaustive = false;
  report.samples_per_theta = samples;
  for (size_t u = 0; u < subsets.size(); ++u) {
    report.verdicts.push_back(
        evaluate_subset(subsets[u], counts[u], significance));
    report.any_rejected |= report.verdicts.back().rejected;
  }
  return report;
}

PrivacyAuditReport audit_privacy_sampled(const SchemeParams& prm,
                                         uint64_t seed, uint64_t samples,
                                         uint32_t max_subsets,
                                         double significance) {
  return audit_privacy_sampled(
      prm, seed, samples, collusion_subsets(prm.N, prm.T, max_subsets),
      significance);
}

PrivacyAuditReport audit_privacy_exhaustive(const SchemeParams& prm) {
  if (prm.q != 2 || prm.L > 3 || prm.M != 2)
    throw invalid_argument(
        "exhaustive audit requires q = 2, L <= 3, M = 2 (use sampling)");
  const auto codes = build_scheme_codes(prm);
  std::vector<QueryPlan> plans;
  for (uint32_t th = 1; th <= prm.M; ++th)
    plans.push_back(build_query_plan(prm, th));

  // All invertible L x L binary matrices, ascending by bit pattern.
  const auto f = Field::make(2);
  const uint32_t L = uint32_t(prm.L);
  std::vector<Mat> gl;
  for (uint32_t bits = 0; bits < (1u << (L * L)); ++bits) {
    Mat m(f, L, L);
    for (uint32_t i = 0; i < L; ++i)
      for (uint32_t j = 0; j < L; ++j)
        m.at(i, j) = (bits >> (i * L + j)) & 1;
    if (rank(m) == L) gl.push_back(std::move(m));
  }

  const auto subsets =
      combinations(prm.N, prm.T, 0xffffffffu);  // every T-subset
  std::vector<std::map<std::string, int64_t>> diff(subsets.size());

  for (uint32_t th = 1; th <= prm.M; ++th) {
    const int64_t sign = th == 1 ? 1 : -1;
    for (const Mat& a : gl) {
      for (const Mat& b : gl) {
        Secrets secrets;
        secrets.s = {a, b};
        const auto queries =
            generate_queries(prm, codes, plans[th - 1], secrets);
        for (size_t u = 0; u < subsets.size(); ++u) {
          const auto bytes = restricted_query_bytes(prm, queries, subsets[u]);
          diff[u][bytes] += sign;
        }
      }
    }
  }

  PrivacyAuditReport report;
  report.exhaustive = true;
  report.samples_per_theta = uint64_t(gl.size()) * gl.size();
  for (size_t u = 0; u < subsets.size(); ++u) {
    SubsetVerdict v;
    v.servers0 = subsets[u];
    uint64_t mismatched = 0;
    for (const auto& [bytes, delta] : diff[u])
      if (delta != 0) ++mismatched;
    v.statistic = double(mismatched);
    v.threshold = 0;
    v.df = 0;
    v.bins = uint32_t(diff[u].size());
    v.rejected = mismatched != 0;
    report.verdicts.push_back(std::move(v));
    report.any_rejected |= report.verdicts.back().rejected;
  }
  return report;
}

std::vector<SweepEntry> sweep_configs(uint32_t maxN, uint32_t maxM) {
  std::vector<SweepEntry> out;
  for (uint32_t N = 2; N <= maxN; ++N)
    for (uint32_t T = 1; T < N; ++T)
      for (uint32_t M = 2; M <= maxM; ++M)
        out.push_back({N, T, M, minimal_admissible_q(N, T, M)});
  return out;
}

BenchReport run_bench(uint32_t N, uint32_t T, uint32_t M, uint32_t q,
                      uint64_t seed) {
  using clock = std::chrono::steady_clock;
  const auto ms = [](clock::time_point a, clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };
  BenchReport r;
  auto t0 = clock::now();
  r.prm = derive_parameters(N, T, M, q);
  auto t1 = clock::now();
  const auto codes = build_scheme_codes(r.prm);
  auto t2 = clock::now();
  const QueryPlan plan = build_query_plan(r.prm, 1);
  auto t3 = clock::now();
  Rng rng(mix_seed(seed, 1));
  const Secrets secrets = sample_secrets(r.prm, rng);
  const auto queries = generate_queries(r.prm, codes, plan, secrets);
  auto t4 = clock::now();
  Rng rec_rng(mix_seed(seed, 0, 0xdb));
  const Records records = random_records(r.prm.q, r.prm.L, r.prm.M, rec_rng);
  std::vector<std::vector<uint32_t>> answers(r.prm.N);
  auto t5 = clock::now();
  for (uint32_t i0 = 0; i0 < r.prm.N; ++i0)
    answers[i0] = answer_query(r.prm, records, queries[i0]);
  auto t6 = clock::now();
  const auto got = reconstruct(r.prm, codes, plan, secrets, answers);
  auto t7 = clock::now();
  if (got != records.w[0])
    throw integrity_error("run_bench: reconstruction mismatch");
  r.derive_ms = ms(t0, t1);
  r.codes_ms = ms(t1, t2);
  r.plan_ms = ms(t2, t3);
  r.query_ms = ms(t3, t4);
  r.answer_ms = ms(t5, t6);
  r.reconstruct_ms = ms(t6, t7);
  return r;
}

}  // namespace pir
