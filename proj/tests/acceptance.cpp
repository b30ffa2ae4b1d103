// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "autfix/autfix.hpp"
#include "support/corpus.hpp"
#include "support/oracles.hpp"
#include "support/properties.hpp"
#include "support/random_instances.hpp"

using namespace autfix;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = AUTFIX_FIXTURES;
const std::string kCli = AUTFIX_CLI;

int failures = 0;

void report(const char* id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("[%s] %s %s: %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

/// Runs one criterion; an escaping exception counts as a failure.
void criterion(const char* id, const std::string& what, const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail += std::string(" exception: ") + e.what();
  }
  report(id, ok, what, detail);
}

Document load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream s;
  s << in.rdbuf();
  return parse_document(s.str());
}

std::vector<oracle::Seq> images_of(const Automorphism& a) {
  std::vector<oracle::Seq> out;
  for (const Word& w : a.images()) out.push_back(oracle::to_seq(w));
  return out;
}

/// Words up to len fixed by χ equal those fixed by both φ and ψ, by plain substitution.
bool same_fixed_words(const Automorphism& phi, const Automorphism& psi, const Automorphism& chi, int len) {
  const auto p = images_of(phi), q = images_of(psi), c = images_of(chi);
  for (const oracle::Seq& s : oracle::all_reduced(phi.rank(), len)) {
    const bool common = oracle::substitute(p, s) == s && oracle::substitute(q, s) == s;
    if (common != (oracle::substitute(c, s) == s)) return false;
  }
  return true;
}

// --- brute-force Nielsen paths ----------------------------------------------

/// Calls visit on every nontrivial reduced edge path of length <= len.
void each_reduced_path(const FilteredGraph& G, int len, const std::function<void(const oracle::Seq&)>& visit) {
  oracle::Seq path;
  std::function<void(int)> grow = [&](int v) {
    if (!path.empty()) visit(path);
    if (static_cast<int>(path.size()) == len) return;
    for (int step : G.out_steps(v)) {
      if (!path.empty() && step == -path.back()) continue;
      path.push_back(step);
      grow(G.target(step));
      path.pop_back();
    }
  };
  for (int v = 0; v < G.vertex_count(); ++v) grow(v);
}

bool common_np(const UpperTriangularMap& f, const UpperTriangularMap& g, const oracle::Seq& s) {
  return props::naive_image(f, s, 1) == s && props::naive_image(g, s, 1) == s;
}

int height_of(const oracle::Seq& s) {
  int h = 0;
  for (int step : s) h = std::max(h, std::abs(step));
  return h;
}

bool crosses(const oracle::Seq& s, int r) {
  return std::any_of(s.begin(), s.end(), [r](int step) { return std::abs(step) == r; });
}

/// E_r β^k Ē_r with k != 0.
bool conjugate_shape(const oracle::Seq& s, int r, const oracle::Seq& beta) {
  if (s.size() < 3 || s.front() != r || s.back() != -r) return false;
  const oracle::Seq mid(s.begin() + 1, s.end() - 1);
  if (mid.size() % beta.size() != 0) return false;
  const oracle::Seq back = oracle::inv(beta);
  for (const oracle::Seq* unit : {&beta, &back}) {
    bool all = true;
    for (std::size_t i = 0; i < mid.size() && all; ++i) all = mid[i] == (*unit)[i % unit->size()];
    if (all) return true;
  }
  return false;
}

/// Longest path length whose enumeration stays under about half a million paths.
int brute_length(const FilteredGraph& G) {
  const double branch = 2.0 * G.edge_count() - 1;
  int len = 1;
  double count = 2.0 * G.edge_count();
  while (len < 10 && count * branch < 5e5) {
    count *= branch;
    ++len;
  }
  return len;
}

struct Normalized {
  std::string name;
  NormalForm nf;
};

std::vector<Normalized> normalization_fixtures() {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(kFixtures + "/normalize")) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<Normalized> out;
  for (const fs::path& p : files) {
    const Document doc = load(p.string());
    const NamedGraph& ng = doc.graphs.at(0);
    const UpperTriangularMap g = ng.maps.size() > 1 ? ng.maps[1].map : UpperTriangularMap::identity(ng.graph);
    out.push_back({p.filename().string(), normalize(ng.graph, ng.maps.at(0).map, g)});
  }
  return out;
}

Automorphism aut3(const char* images) { return Automorphism(parse_word_list(images, 3)); }

}  // namespace

int main() {
  criterion("AC1", "worked F3 pair", [](std::string& d) {
    const Automorphism phi = aut3("x, y x, z");
    const Automorphism psi = aut3("x, y, z x");
    const auto t0 = std::chrono::steady_clock::now();
    const WitnessReport r = find_witness(phi, psi);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = r.verdict == Verdict::Equal && r.k0 == 1 && r.k == 2 && r.attempts.size() == 2;
    if (ok) {
      const Attempt& first = r.attempts[0];
      const Attempt& second = r.attempts[1];
      ok = !first.equal && first.distinguishing && to_string(*first.distinguishing) == "y z^-1" && second.equal &&
           second.depth == 8 && second.exact == true && second.stable == true && secs < 10.0;
    }
    ok = ok && r.chi && same_fixed_words(phi, psi, *r.chi, 8);
    d = "k0=" + (r.k0 ? std::to_string(*r.k0) : "-") + " k=" + (r.k ? std::to_string(*r.k) : "-") +
        " chi=" + (r.chi ? to_string(*r.chi) : "-") + " time=" + std::to_string(secs) + "s";
    return ok;
  });

  criterion("AC2", "fixed subgroup rank bounds on random triangular automorphisms", [](std::string& d) {
    std::mt19937 rng(20261018);
    int auts = 0, subgroups = 0, bad = 0, max_rank = 0;
    for (int i = 0; i < 220; ++i) {
      const int n = i % 2 ? 3 : 2;
      const Automorphism phi = sample::random_triangular(rng, n, n == 2 ? 3 : 2);
      const FixedSubgroupReport fix = fixed_subgroup_oracle(phi, n == 2 ? 10 : 6);
      ++auts;
      max_rank = std::max(max_rank, fix.rank);
      if (fix.rank > n) ++bad;
      std::vector<Word> gens;
      const int count = 1 + i % 3;
      for (int j = 0; j < count; ++j) gens.push_back(sample::random_nontrivial_word(rng, n, 4));
      const SubgroupGraph K = fold(gens, n);
      if (intersect(fix.graph, K).rank() > K.rank()) ++bad;
      ++subgroups;
    }
    d = std::to_string(auts) + " automorphisms, " + std::to_string(subgroups) + " subgroups, max rank " +
        std::to_string(max_rank) + ", violations " + std::to_string(bad);
    return auts >= 200 && subgroups >= 50 && bad == 0;
  });

  criterion("AC3", "periodic words are fixed", [](std::string& d) {
    std::mt19937 rng(7);
    int checked = 0;
    std::size_t found = 0;
    for (int i = 0; i < 40; ++i) {
      const Automorphism phi = sample::random_triangular(rng, 2, 3);
      found += periodic_implies_fixed_check(phi, 6, 8).size();
      ++checked;
    }
    for (int i = 0; i < 4; ++i) {
      const Automorphism phi = sample::random_triangular(rng, 3, 2);
      found += periodic_implies_fixed_check(phi, 6, 7).size();
      ++checked;
    }
    found += periodic_implies_fixed_check(aut3("x, y x, z x"), 6, 8).size();
    ++checked;
    d = std::to_string(checked) + " automorphisms, " + std::to_string(found) + " periodic unfixed words";
    return found == 0;
  });

  criterion("AC4", "path calculus", [](std::string& d) {
    const props::Tally t = props::run_path_calculus(4242, 24, 500);
    const long violations = t.split_violations + t.form_violations + t.stayred_violations + t.nontriv_violations;
    d = std::to_string(t.graphs) + " graphs, " + std::to_string(t.paths) + " paths, " +
        std::to_string(t.split_checks + t.form_checks + t.stayred_checks + t.nontriv_checks) + " checks, " +
        std::to_string(violations) + " violations";
    return t.graphs >= 20 && t.paths >= 10000 && violations == 0;
  });

  std::vector<Normalized> fixtures;
  criterion("AC5", "normalization fixtures", [&](std::string& d) {
    fixtures = normalization_fixtures();
    int held = 0, inps = 0, bad = 0;
    for (const Normalized& fx : fixtures) {
      const NormalForm& nf = fx.nf;
      if (satisfies_normal_form(nf)) ++held;
      each_reduced_path(nf.graph, brute_length(nf.graph), [&](const oracle::Seq& s) {
        if (!common_np(nf.f, nf.g, s)) return;
        for (std::size_t k = 1; k < s.size(); ++k) {
          if (common_np(nf.f, nf.g, oracle::Seq(s.begin(), s.begin() + static_cast<long>(k)))) return;
        }
        const int r = height_of(s);
        const HeightRecord& rec = nf.heights.at(static_cast<std::size_t>(r - 1));
        ++inps;
        if (rec.form == InpForm::Edge) {
          if (s != oracle::Seq{r} && s != oracle::Seq{-r}) ++bad;
        } else if (rec.form == InpForm::Conjugate) {
          if (!conjugate_shape(s, r, rec.beta->steps())) ++bad;
        }
      });
    }
    d = std::to_string(fixtures.size()) + " fixtures, normal form holds in " + std::to_string(held) + ", " +
        std::to_string(inps) + " brute-force INPs, " + std::to_string(bad) + " of unexpected shape";
    return fixtures.size() >= 10 && held == static_cast<int>(fixtures.size()) && inps > 0 && bad == 0;
  });

  criterion("AC6", "heights without a common Nielsen path", [&](std::string& d) {
    int heights = 0, crossing = 0;
    for (const Normalized& fx : fixtures) {
      const NormalForm& nf = fx.nf;
      for (const HeightRecord& rec : nf.heights) {
        if (rec.form != InpForm::None) continue;
        ++heights;
        each_reduced_path(nf.graph, brute_length(nf.graph), [&](const oracle::Seq& s) {
          if (crosses(s, rec.height) && common_np(nf.f, nf.g, s)) ++crossing;
        });
      }
    }
    d = std::to_string(heights) + " heights, " + std::to_string(crossing) + " common Nielsen paths crossing them";
    return heights >= 3 && crossing == 0;
  });

  criterion("AC7", "dispatcher fixtures", [](std::string& d) {
    bool ok = true;
    for (const char* name : {"rank0.aut", "rank1.aut", "worked_pair.aut", "rank2_pair.aut", "free_factor.aut"}) {
      const Document doc = load(kFixtures + "/" + name);
      const Automorphism& phi = doc.automorphisms.at(0).aut;
      const Automorphism& psi = doc.automorphisms.at(1).aut;
      const WitnessReport r = find_witness(phi, psi);
      const bool good = r.verdict == Verdict::Equal && r.chi && same_fixed_words(phi, psi, *r.chi, phi.rank() == 2 ? 9 : 6);
      ok = ok && good;
      d += std::string(name) + " rank " + std::to_string(r.common.rank()) + " " + r.route + (good ? " ok; " : " WRONG; ");
    }
    const corpus::Result ex = corpus::run(kCli, kFixtures, "witness exponential.aut");
    ok = ok && ex.status == 3;
    d += "exponential.aut exit " + std::to_string(ex.status);
    return ok;
  });

  criterion("AC8", "deterministic CLI output", [](std::string& d) {
    const auto entries = corpus::load(kFixtures);
    int same = 0, status = 0;
    for (const corpus::Entry& e : entries) {
      const corpus::Result a = corpus::run(kCli, kFixtures, e.args);
      const corpus::Result b = corpus::run(kCli, kFixtures, e.args);
      if (a.output == b.output && a.status == b.status) ++same;
      if (a.status == e.expected) ++status;
    }
    d = std::to_string(same) + "/" + std::to_string(entries.size()) + " invocations byte-identical, " +
        std::to_string(status) + " with the expected exit status";
    return same == static_cast<int>(entries.size()) && status == same;
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
