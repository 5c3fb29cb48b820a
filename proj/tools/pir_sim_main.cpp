// pir-sim: plan, run, verify, audit, and benchmark the multi-server
// private-retrieval simulator from the command line.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pir/harness.hpp"

namespace {

using namespace pir;

// Exit codes shared by every subcommand.
constexpr int kOk = 0;
constexpr int kVerifyFail = 1;
constexpr int kBadParams = 2;

std::string subset_str(const std::vector<uint32_t>& servers0) {
  std::string s = "{";
  for (size_t i = 0; i < servers0.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(servers0[i] + 1);
  }
  return s + "}";
}

std::string mode_str(GrsMode m) {
  switch (m) {
    case GrsMode::kPlain:
      return "plain";
    case GrsMode::kExtended:
      return "extended";
    case GrsMode::kDoublyExtended:
      return "doubly-extended";
  }
  return "?";
}

struct PlanArgs {
  uint32_t N = 0, T = 0, M = 0, q = 0;  // q = 0: pick the smallest that works
};

int cmd_plan(const PlanArgs& a) {
  uint32_t q = a.q;
  if (q == 0) {
    q = minimal_admissible_q(a.N, a.T, a.M);
    std::cout << "q not given; smallest admissible field size is " << q
              << "\n";
  }
  const SchemeParams prm = derive_parameters(a.N, a.T, a.M, q);

  std::cout << "configuration: N=" << prm.N << " servers, T=" << prm.T
            << " colluding, M=" << prm.M << " records, GF(" << prm.q << ")\n";
  std::cout << "  d=" << prm.d << "  n=" << prm.n << "  t=" << prm.t << "\n";
  std::cout << "  record length L = " << prm.L << " symbols\n";
  std::cout << "  download D = " << prm.D << " symbols (per server:";
  for (uint32_t i = 1; i <= prm.N; ++i)
    std::cout << " " << prm.server_download(i);
  std::cout << ")\n";
  std::cout << "  rate L/D = " << prm.rate.str() << (prm.rate == prm.cap
                                                         ? " = capacity\n"
                                                         : "  (capacity "
                                                           + prm.cap.str() +
                                                           ")\n");
  for (uint32_t k = 1; k < prm.M; ++k) {
    const auto& c = prm.choices[k - 1];
    std::cout << "  level " << k << ": block width " << prm.ell[k - 1]
              << ", leading slots " << prm.alpha[k - 1] << "/"
              << prm.beta[k - 1] << ", code [" << prm.N << "," << prm.T
              << "] " << mode_str(c.mode) << " over GF(" << prm.q << "^"
              << c.sub_ell << ")";
    if (c.copies > 1) std::cout << " x" << c.copies;
    std::cout << "\n";
  }

  // Field-size requirements of this construction versus a scheme needing a
  // scalar MDS code of length N.
  const uint64_t width = std::min(prm.t, prm.n - prm.t);
  uint64_t lmin = 1;
  for (uint32_t i = 0; i + 2 < prm.M; ++i) lmin *= width;
  uint32_t threshold = 2;
  while (true) {
    uint64_t pw = 1;
    bool ge = false;
    for (uint64_t i = 0; i < lmin && !ge; ++i) {
      pw *= threshold;
      ge = pw >= prm.N;
    }
    if (ge || lmin == 0) break;
    ++threshold;
  }
  std::cout << "field-size comparison at N=" << prm.N << ", T=" << prm.T
            << ", M=" << prm.M << ":\n";
  std::cout << "  scalar-code schemes need q >= N, i.e. q >= " << prm.N
            << "\n";
  if (lmin == 1) {
    std::cout << "  this construction: block width 1, so the bound "
                 "degenerates to q >= "
              << prm.N << " as well\n";
  } else {
    std::cout << "  this construction: q^" << lmin << " >= " << prm.N
              << ", i.e. q >= " << threshold << " (block width min(t, n-t)^(M-2) = "
              << lmin << ")\n";
  }
  return kOk;
}

struct RunArgs {
  uint32_t N = 0, T = 0, M = 0, q = 0;
  uint64_t seed = 1;
  std::string mode = "in-process";
  std::string records;
  std::string out;
  uint32_t theta = 0;
  uint32_t corrupt = 0;
};

int cmd_run(const RunArgs& a) {
  RunConfig cfg;
  cfg.N = a.N;
  cfg.T = a.T;
  cfg.M = a.M;
  cfg.q = a.q;
  cfg.seed = a.seed;
  if (a.mode == "sockets")
    cfg.mode = RunMode::kSockets;
  else if (a.mode == "in-process")
    cfg.mode = RunMode::kInProcess;
  else
    throw invalid_argument("--mode must be in-process or sockets");
  if (!a.records.empty()) cfg.records_path = a.records;
  if (!a.out.empty()) cfg.transcript_path = a.out;
  if (a.theta != 0) cfg.only_theta = a.theta;
  if (a.corrupt != 0) cfg.corrupt_server = a.corrupt;

  const RunReport rep = run_protocol(cfg);
  for (const auto& o : rep.outcomes) {
    if (o.exact) {
      std::cout << "theta " << o.theta << ": exact, " << o.downloaded
                << " symbols downloaded\n";
    } else {
      std::cout << "theta " << o.theta << ": MISMATCH (" << o.mismatch
                << ")\n";
    }
  }
  if (rep.all_exact) {
    std::cout << rep.outcomes.size() << "/" << rep.outcomes.size()
              << " retrievals exact; rate " << rep.prm.rate.str()
              << (rep.prm.rate == rep.prm.cap ? " = capacity" : "") << "\n";
    if (!a.out.empty()) std::cout << "transcript written to " << a.out << "\n";
    return kOk;
  }
  return kVerifyFail;
}

struct VerifyArgs {
  uint32_t N = 0, T = 0, ell = 0, q = 0;
  uint64_t seed = 1;
  std::string in;
  std::string out;
  uint32_t quotas = 500;
};

// Enumerates quota vectors (each coordinate <= ell, summing to T*ell) up to
// `cap + 1` of them, in lexicographic order.
std::vector<std::vector<uint32_t>> enumerate_quotas(uint32_t N, uint32_t ell,
                                                    uint64_t total,
                                                    size_t cap) {
  std::vector<std::vector<uint32_t>> out;
  std::vector<uint32_t> cur(N, 0);
  const std::function<void(uint32_t, uint64_t)> rec = [&](uint32_t i,
                                                          uint64_t left) {
    if (out.size() > cap) return;
    if (i == N) {
      if (left == 0) out.push_back(cur);
      return;
    }
    const uint64_t rest_cap = uint64_t(ell) * (N - 1 - i);
    for (uint32_t v = 0; v <= ell && v <= left; ++v) {
      if (left - v > rest_cap) continue;
      cur[i] = v;
      rec(i + 1, left - v);
      if (out.size() > cap) return;
    }
  };
  rec(0, total);
  return out;
}

std::vector<uint32_t> random_quota(uint32_t N, uint32_t ell, uint64_t total,
                                   Rng& rng) {
  // A uniformly random T*ell-subset of the N*ell columns, grouped by thick
  // column, always yields a valid quota vector.
  std::vector<uint32_t> slots(size_t(N) * ell);
  std::iota(slots.begin(), slots.end(), 0);
  std::vector<uint32_t> quota(N, 0);
  for (uint64_t i = 0; i < total; ++i) {
    const uint64_t j = i + rng.below(slots.size() - i);
    std::swap(slots[i], slots[j]);
    quota[slots[i] / ell]++;
  }
  return quota;
}

int cmd_verify_code(const VerifyArgs& a) {
  BlockGenerator gen = [&] {
    if (!a.in.empty()) return load_generator_file(a.in);
    if (a.N == 0 || a.T == 0 || a.ell == 0 || a.q == 0)
      throw invalid_argument(
          "verify-code needs either --in <file> or all of --n --t --ell --q");
    const auto choice = choose_code(a.N, a.T, a.ell, a.q);
    if (!choice)
      throw invalid_argument("q=" + std::to_string(a.q) +
                             " admits no verified code of span " +
                             std::to_string(a.ell));
    const auto f = Field::make(a.q);
    const Tower tw = Tower::make(f, choice->sub_ell);
    const Mat sym = grs_generator(tw.top(), a.N, a.T, choice->mode);
    BlockGenerator g = expand_to_array_code(tw, sym);
    if (choice->copies > 1) g = interleave(g, choice->copies);
    return g;
  }();
  gen.prm.validate();
  const uint32_t N = gen.prm.N, T = gen.prm.T, ell = gen.prm.ell;
  std::cout << "code: N=" << N << " T=" << T << " ell=" << ell << " q="
            << gen.prm.q << " (" << gen.g.rows() << "x" << gen.g.cols()
            << " generator)\n";
  if (!a.out.empty()) {
    save_generator_file(a.out, gen);
    std::cout << "generator written to " << a.out << "\n";
  }

  bool ok = true;

  // Every selection of T thick columns must have full rank.
  const auto subsets = collusion_subsets(N, T, 0);
  size_t mds_pass = 0;
  for (const auto& sub : subsets) {
    if (check_mds_subset(gen, sub)) {
      ++mds_pass;
    } else {
      ok = false;
      std::cout << "  thick columns " << subset_str(sub) << ": rank below "
                << uint64_t(T) * ell << " — FAIL\n";
    }
  }
  std::cout << "mds check: " << mds_pass << "/" << subsets.size()
            << " thick-column subsets full rank — "
            << (mds_pass == subsets.size() ? "pass" : "FAIL") << "\n";

  // Quota-constrained information sets.
  const uint64_t total = uint64_t(T) * ell;
  auto quotas = enumerate_quotas(N, ell, total, a.quotas);
  bool exhaustive = quotas.size() <= a.quotas;
  if (!exhaustive) {
    quotas.clear();
    Rng rng(a.seed);
    for (uint32_t i = 0; i < a.quotas; ++i)
      quotas.push_back(random_quota(N, ell, total, rng));
  }
  size_t rec_pass = 0, crosschecked = 0;
  for (const auto& quota : quotas) {
    const auto sel = find_recovery_arrangement(gen, quota);
    bool good = sel.has_value();
    if (good) {
      Mat cols = gen.g.select_cols(*sel);
      good = rank(cols) == total;
      std::vector<uint32_t> per(N, 0);
      for (uint32_t c : *sel) per[c / ell]++;
      for (uint32_t i = 0; i < N; ++i) good = good && per[i] == quota[i];
    }
    if (uint64_t(N) * ell <= 12) {
      const auto ref = brute_force_arrangement(gen, quota);
      if (ref.has_value() != sel.has_value()) {
        good = false;
        std::cout << "  quota (";
        for (uint32_t i = 0; i < N; ++i)
          std::cout << (i ? "," : "") << quota[i];
        std::cout << "): solver and exhaustive search disagree — FAIL\n";
      }
      ++crosschecked;
    }
    if (good) {
      ++rec_pass;
    } else {
      ok = false;
      std::cout << "  quota (";
      for (uint32_t i = 0; i < N; ++i) std::cout << (i ? "," : "") << quota[i];
      std::cout << "): no valid arrangement — FAIL\n";
    }
  }
  std::cout << "recovery arrangements: " << rec_pass << "/" << quotas.size()
            << " quota vectors solvable (" << (exhaustive ? "all" : "sampled")
            << (crosschecked ? ", " + std::to_string(crosschecked) +
                                   " cross-checked exhaustively"
                             : "")
            << ") — " << (rec_pass == quotas.size() ? "pass" : "FAIL") << "\n";
  return ok ? kOk : kVerifyFail;
}

struct AuditArgs {
  uint32_t N = 0, T = 0, M = 0, q = 0;
  uint64_t seed = 1;
  bool exhaustive = false;
  uint64_t samples = 100000;
  uint32_t max_subsets = 5;
  double significance = 0.001;
  std::string gamma = "all";
};

int cmd_audit_privacy(const AuditArgs& a) {
  const SchemeParams prm = derive_parameters(a.N, a.T, a.M, a.q);
  PrivacyAuditReport rep;
  if (a.exhaustive) {
    rep = audit_privacy_exhaustive(prm);
  } else {
    std::vector<std::vector<uint32_t>> subsets;
    if (a.gamma == "all") {
      subsets = collusion_subsets(prm.N, prm.T, a.max_subsets);
    } else {
      std::vector<uint32_t> one;
      std::stringstream ss(a.gamma);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        const long v = std::stol(tok);
        if (v < 1 || uint32_t(v) > prm.N)
          throw invalid_argument("--gamma: server ids are 1.." +
                                 std::to_string(prm.N));
        one.push_back(uint32_t(v - 1));
      }
      std::sort(one.begin(), one.end());
      subsets.push_back(std::move(one));
    }
    rep = audit_privacy_sampled(prm, a.seed, a.samples, subsets,
                                a.significance);
  }

  for (const auto& v : rep.verdicts) {
    std::cout << "subset " << subset_str(v.servers0) << ": ";
    if (rep.exhaustive) {
      std::cout << rep.samples_per_theta
                << " secret tuples per target, distributions "
                << (v.rejected ? "DIFFER (" + std::to_string(uint64_t(
                                     v.statistic)) + " unmatched transcripts)"
                               : "identical")
                << " — " << (v.rejected ? "FAIL" : "pass") << "\n";
    } else {
      std::cout << "chi2 = " << v.statistic << ", threshold " << v.threshold
                << " (df " << v.df << ", " << v.bins << " bins) — "
                << (v.rejected ? "REJECTED" : "pass") << "\n";
    }
  }
  std::cout << (rep.exhaustive ? "exhaustive" : "sampled") << " audit over "
            << rep.verdicts.size() << " subset(s): "
            << (rep.any_rejected ? "FAIL" : "pass") << "\n";
  return rep.any_rejected ? kVerifyFail : kOk;
}

struct BenchArgs {
  uint32_t N = 0, T = 0, M = 0, q = 0;
  uint64_t seed = 1;
  uint32_t reps = 3;
};

int cmd_bench(const BenchArgs& a) {
  BenchReport best;
  for (uint32_t r = 0; r < a.reps; ++r) {
    BenchReport rep = run_bench(a.N, a.T, a.M, a.q, a.seed);
    if (r == 0) {
      best = rep;
    } else {
      best.derive_ms = std::min(best.derive_ms, rep.derive_ms);
      best.codes_ms = std::min(best.codes_ms, rep.codes_ms);
      best.plan_ms = std::min(best.plan_ms, rep.plan_ms);
      best.query_ms = std::min(best.query_ms, rep.query_ms);
      best.answer_ms = std::min(best.answer_ms, rep.answer_ms);
      best.reconstruct_ms = std::min(best.reconstruct_ms, rep.reconstruct_ms);
    }
  }
  std::cout << "N=" << best.prm.N << " T=" << best.prm.T << " M=" << best.prm.M
            << " q=" << best.prm.q << "  L=" << best.prm.L
            << "  D=" << best.prm.D << "  (best of " << a.reps << ")\n";
  const auto line = [](const char* name, double ms) {
    std::printf("  %-12s %10.3f ms\n", name, ms);
  };
  line("derive", best.derive_ms);
  line("codes", best.codes_ms);
  line("plan", best.plan_ms);
  line("query", best.query_ms);
  line("answer", best.answer_ms);
  line("reconstruct", best.reconstruct_ms);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "pir-sim: multi-server private information retrieval simulator"};
  app.require_subcommand(1);

  PlanArgs plan;
  auto* sp = app.add_subcommand(
      "plan", "Derive scheme constants and the field-size comparison");
  sp->add_option("--n", plan.N, "number of servers")->required();
  sp->add_option("--t", plan.T, "collusion threshold")->required();
  sp->add_option("--m", plan.M, "number of records")->required();
  sp->add_option("--q", plan.q, "field size (omit to pick the smallest)");

  RunArgs run;
  auto* sr = app.add_subcommand(
      "run", "Retrieve every record end to end and check exactness");
  sr->add_option("--n", run.N, "number of servers")->required();
  sr->add_option("--t", run.T, "collusion threshold")->required();
  sr->add_option("--m", run.M, "number of records")->required();
  sr->add_option("--q", run.q, "field size (prime power)")->required();
  sr->add_option("--seed", run.seed, "seed for records and secrets");
  sr->add_option("--mode", run.mode, "in-process | sockets");
  sr->add_option("--records", run.records, "records file (random when unset)");
  sr->add_option("--out", run.out, "write a binary transcript here");
  sr->add_option("--theta", run.theta, "retrieve only this record (1-based)");
  sr->add_option("--corrupt", run.corrupt,
                 "test hook: corrupt one answer symbol of this server")
      ->group("");

  VerifyArgs verify;
  auto* sv = app.add_subcommand(
      "verify-code", "Check a block generator: MDS + recovery arrangements");
  sv->add_option("--n", verify.N, "thick columns");
  sv->add_option("--t", verify.T, "dimension in blocks");
  sv->add_option("--ell", verify.ell, "block width");
  sv->add_option("--q", verify.q, "field size");
  sv->add_option("--seed", verify.seed, "seed for sampled quota vectors");
  sv->add_option("--in", verify.in, "read the generator from this file");
  sv->add_option("--out", verify.out, "save the generator to this file");
  sv->add_option("--quotas", verify.quotas,
                 "max quota vectors to test (exhaustive when fewer exist)");

  AuditArgs audit;
  auto* sa = app.add_subcommand(
      "audit-privacy", "Compare per-target query distributions to a coalition");
  sa->add_option("--n", audit.N, "number of servers")->required();
  sa->add_option("--t", audit.T, "collusion threshold")->required();
  sa->add_option("--m", audit.M, "number of records")->required();
  sa->add_option("--q", audit.q, "field size (prime power)")->required();
  sa->add_option("--seed", audit.seed, "audit seed");
  sa->add_flag("--exhaustive", audit.exhaustive,
               "walk the whole secret space (q=2, L<=3, M=2 only)");
  sa->add_option("--samples", audit.samples, "samples per target (sampled)");
  sa->add_option("--gamma", audit.gamma,
                 "colluding servers, e.g. 1,3 (default: all subsets)");
  sa->add_option("--max-subsets", audit.max_subsets,
                 "cap on audited subsets when --gamma all");
  sa->add_option("--significance", audit.significance,
                 "chi-square significance level");

  BenchArgs bench;
  auto* sb =
      app.add_subcommand("bench", "Time each protocol phase for record 1");
  sb->add_option("--n", bench.N, "number of servers")->required();
  sb->add_option("--t", bench.T, "collusion threshold")->required();
  sb->add_option("--m", bench.M, "number of records")->required();
  sb->add_option("--q", bench.q, "field size (prime power)")->required();
  sb->add_option("--seed", bench.seed, "workload seed");
  sb->add_option("--reps", bench.reps, "repetitions (best is reported)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadParams;
  }

  try {
    if (sp->parsed()) return cmd_plan(plan);
    if (sr->parsed()) return cmd_run(run);
    if (sv->parsed()) return cmd_verify_code(verify);
    if (sa->parsed()) return cmd_audit_privacy(audit);
    if (sb->parsed()) return cmd_bench(bench);
  } catch (const invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadParams;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerifyFail;
  }
  return kBadParams;
}
