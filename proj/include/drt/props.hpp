#pragma once

// Random closed-term generation and semantic validation of the axiom system
// and the sampled theorems: every axiom has a generator and a designated
// relation; the suite fails loudly on unknown axiom names.

#include <functional>
#include <string>
#include <vector>

#include "drt/equiv.hpp"
#include "drt/term.hpp"

namespace drt {

struct Rng {
  uint64_t state;
  explicit Rng(uint64_t seed) : state(seed + 0x9e3779b97f4a7c15ULL) {}
  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  int below(int n) { return n <= 1 ? 0 : int(next() % uint64_t(n)); }
  bool chance(int percent) { return below(100) < percent; }
};

struct GenOptions {
  bool bpa_only = false;       // no parallelism, merges or encapsulation
  bool allow_abstraction = true;
  bool allow_rec = true;
  bool allow_tau = true;
  int max_delay = 2;
  size_t state_bound = 2000;
};

// The fixed harness alphabet: a..f with gamma(a,b)=c and gamma(d,e)=f
// (handshaking).
const ActionTable& harness_actions();

// Deterministic in (seed, size, options); the result is closed, guarded and
// explores within the configured state bound.
TermRef gen_closed_term(uint64_t seed, int size, const GenOptions& opts = {});

struct AxiomReport {
  std::string id;
  std::string relation;
  int samples = 0;
  int passed = 0;
  std::vector<std::string> failures;
  bool ok() const { return passed == samples; }
};

const std::vector<std::string>& axiom_ids();

// Instantiates the axiom schema with generated closed terms (respecting its
// side conditions), builds the state graphs and checks the designated
// relation for every sample.
AxiomReport check_axiom_soundness(const std::string& id, int samples,
                                  uint64_t seed);

std::vector<AxiomReport> check_all_axioms(int samples, uint64_t seed);

struct MetaEntry {
  std::string name;
  int samples = 0;
  int passed = 0;
  std::vector<std::string> failures;
  bool ok() const { return passed == samples; }
};

struct MetaReport {
  std::vector<MetaEntry> entries;
  bool ok() const {
    for (const auto& e : entries)
      if (!e.ok()) return false;
    return true;
  }
};

// Sampled theorem suites: standard concurrency, handshaking axiom, merge
// expansion, two-phase/time-stamped correspondence, coincidence of the two
// rooted branching definitions, the inclusion of rooted branching in the
// dormancy-aware relation, recursion principles, equivalence laws, and
// congruence sampling.
MetaReport check_meta_properties(int samples, uint64_t seed);

std::string axiom_reports_json(const std::vector<AxiomReport>& reports);
std::string meta_report_json(const MetaReport& report);

}  // namespace drt
