#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mealy/activity.hpp"
#include "mealy/dot.hpp"
#include "mealy/wreath.hpp"
#include "support.hpp"

using namespace mealy;

namespace {

Transformation named(const std::string& source, const std::string& name) {
  return parse_wreath(source).at(name);
}

const char* kT0 = "t0 = (1, t0)[2,2]";
const char* kT0Sq = "t0^2 = (t0, t0^2)[2,2]; t0 = (1, t0)[2,2]";
const char* kFib = "s = (t, s)[1,1]; t = (1, s)";
const char* kP = "p = (q, r)[1,1]; q = (r, 1); r = (r, r)[2,2]";
const char* kTk = "t3 = (t2, t3)[1,1]; t2 = (t1, t2)[2,2]; t1 = (t0, t1)[1,1]; t0 = (1, t0)[2,2]";

double as_double(const BigInt& v) { return v.convert_to<double>(); }

int degree_of(const GrowthClass& g) {
  const auto* p = std::get_if<Polynomial>(&g);
  return p ? p->degree : 1000;
}

std::size_t subset_id(const DetOut& det, const Transformation& t, const std::string& label) {
  for (std::size_t i = 0; i < det.size(); ++i) {
    if (subset_label(det.subset(i), t) == label) return i;
  }
  ADD_FAILURE() << "no subset " << label;
  return DetOut::none;
}

}  // namespace

TEST(PrunedOutput, T0) {
  auto t0 = named(kT0, "t0");
  auto nfa = pruned_output(t0);
  ASSERT_EQ(nfa.states().size(), 1u);
  ASSERT_EQ(nfa.transitions().size(), 1u);
  EXPECT_EQ(nfa.transitions()[0], (NfaTransition{0, 2, 0, 1}));
}

TEST(PrunedOutput, IdentityIsEmpty) {
  auto nfa = pruned_output(identity_transformation(2));
  EXPECT_TRUE(nfa.states().empty());
  EXPECT_TRUE(nfa.transitions().empty());
}

TEST(PrunedOutput, Fibonacci) {
  auto s = named(kFib, "s");
  auto nfa = pruned_output(s);
  ASSERT_EQ(s.state_name(0), "s");
  ASSERT_EQ(s.state_name(1), "t");
  std::set<std::tuple<std::string, Letter, std::string>> got;
  for (const auto& tr : nfa.transitions()) got.insert({s.state_name(tr.from), tr.label, s.state_name(tr.to)});
  std::set<std::tuple<std::string, Letter, std::string>> want{{"s", 1, "s"}, {"s", 1, "t"}, {"t", 2, "s"}};
  EXPECT_EQ(got, want);
  EXPECT_EQ(nfa.states().size(), 2u);
}

TEST(PrunedOutput, ParallelEdgesCollapse) {
  // a = (a, a)[2,2]: two input letters give the same labelled edge.
  auto a = named("a = (a, a)[2,2]", "a");
  auto nfa = pruned_output(a);
  ASSERT_EQ(nfa.transitions().size(), 1u);
  EXPECT_EQ(nfa.transitions()[0].multiplicity, 2u);
}

TEST(Determinize, T0Squared) {
  auto t = named(kT0Sq, "t0^2");
  auto det = det_out(t);
  ASSERT_EQ(det.size(), 3u);
  auto root = subset_id(det, t, "{t0^2}");
  auto both = subset_id(det, t, "{t0,t0^2}");
  auto single = subset_id(det, t, "{t0}");
  EXPECT_EQ(det.root(), root);
  EXPECT_EQ(det.next(root, 2), both);
  EXPECT_EQ(det.next(both, 2), both);
  EXPECT_EQ(det.next(single, 2), single);
  EXPECT_FALSE(det.next(root, 1));
  EXPECT_FALSE(det.next(both, 1));
  EXPECT_FALSE(det.next(single, 1));
}

TEST(Determinize, Fibonacci) {
  auto s = named(kFib, "s");
  auto det = det_out(s);
  ASSERT_EQ(det.size(), 3u);
  auto rs = subset_id(det, s, "{s}");
  auto st = subset_id(det, s, "{s,t}");
  auto rt = subset_id(det, s, "{t}");
  EXPECT_EQ(det.root(), rs);
  EXPECT_EQ(det.next(rs, 1), st);
  EXPECT_FALSE(det.next(rs, 2));
  EXPECT_EQ(det.next(st, 1), st);
  EXPECT_EQ(det.next(st, 2), rs);
  EXPECT_FALSE(det.next(rt, 1));
  EXPECT_EQ(det.next(rt, 2), rs);
  EXPECT_EQ(det.reachable_from_root().size(), 2u);
}

TEST(Determinize, IdentityRootIsEmpty) {
  auto det = det_out(identity_transformation(3));
  EXPECT_TRUE(det.empty());
  EXPECT_FALSE(det.root());
}

TEST(Determinize, SubsetBlowup) {
  auto s = named(kFib, "s");
  try {
    det_out(s, 2);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::subset_blowup);
    EXPECT_TRUE(e.is_resource_cap());
  }
}

TEST(Determinize, SoundOnExamples) {
  for (auto [src, name] : {std::pair{kT0Sq, "t0^2"}, {kFib, "s"}, {kP, "p"}, {kTk, "t3"}}) {
    auto t = named(src, name);
    auto det = det_out(t);
    for (const auto& w : mealy::testing::words_up_to(2, 6)) {
      std::optional<std::size_t> at = det.root();
      for (Letter y : w) {
        if (!at) break;
        at = det.next(*at, y);
      }
      auto want = mealy::testing::states_with_output(t, w);
      if (at) {
        EXPECT_EQ(det.subset(*at), want);
      } else {
        EXPECT_TRUE(want.empty());
      }
    }
  }
}

TEST(Activity, P) {
  auto p = named(kP, "p");
  EXPECT_EQ(activity(p, 1), 1);
  EXPECT_EQ(activity(p, 2), 2);
  EXPECT_EQ(activity(p, 3), 2);
  EXPECT_EQ(activity(p, 4), 2);
  EXPECT_EQ(brute_force_activity(p, 2), 2);
}

TEST(Activity, Identity) {
  auto id = identity_transformation(2);
  for (std::size_t n = 0; n <= 5; ++n) EXPECT_EQ(activity(id, n), 0);
  EXPECT_EQ(brute_force_activity(id, 3), 0);
}

TEST(Activity, ZeroLength) {
  EXPECT_EQ(activity(named(kT0, "t0"), 0), 1);
  EXPECT_EQ(brute_force_activity(named(kT0, "t0"), 0), 1);
}

TEST(Activity, Fibonacci) {
  auto s = named(kFib, "s");
  auto series = activity_series(det_out(s), 10);
  std::vector<BigInt> want{1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89};
  EXPECT_EQ(series, want);
}

TEST(Activity, T0) {
  auto t0 = named(kT0, "t0");
  EXPECT_EQ(brute_force_activity(t0, 4), 1);
  EXPECT_EQ(activity(t0, 4), 1);
}

TEST(Activity, MatchesEnumerationOnExamples) {
  for (auto [src, name] : {std::pair{kT0Sq, "t0^2"}, {kFib, "s"}, {kP, "p"}, {kTk, "t3"}, {kTk, "t2"}}) {
    auto t = named(src, name);
    auto series = activity_series(det_out(t), 8);
    for (std::size_t n = 0; n <= 8; ++n) {
      EXPECT_EQ(series[n], brute_force_activity(t, n)) << name << " n=" << n;
      EXPECT_EQ(BigInt(mealy::testing::activity_by_definition(t.machine(), t.root(), n)), series[n]);
    }
  }
}

TEST(Activity, BudgetExceeded) {
  auto s = named(kFib, "s");
  try {
    brute_force_activity(s, 11, 1000);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::budget_exceeded);
  }
  EXPECT_NO_THROW(brute_force_activity(s, 9, 1000));
}

TEST(Activity, Large) {
  // Exact big integers: α_s(200) is the 201st Fibonacci number.
  auto series = activity_series(det_out(named(kFib, "s")), 200);
  BigInt a = 1, b = 1;
  for (int i = 2; i <= 200; ++i) {
    BigInt c = a + b;
    a = b;
    b = c;
  }
  EXPECT_EQ(series[200], b);
  EXPECT_EQ(to_string(series[100]), "573147844013817084101");
}

TEST(Classify, Examples) {
  auto sys = parse_wreath(kTk);
  EXPECT_EQ(degree_of(classify(sys.at("t0"))), 0);
  EXPECT_EQ(degree_of(classify(sys.at("t1"))), 1);
  EXPECT_EQ(degree_of(classify(sys.at("t2"))), 2);
  EXPECT_EQ(degree_of(classify(sys.at("t3"))), 3);
  EXPECT_EQ(degree_of(classify(identity_transformation(2))), -1);
  EXPECT_EQ(degree_of(classify(named(kT0Sq, "t0^2"))), 0);
  EXPECT_EQ(degree_of(classify(named(kP, "p"))), 0);
  EXPECT_TRUE(std::holds_alternative<Exponential>(classify(named(kFib, "s"))));
}

TEST(Classify, EventuallyTrivial) {
  // Nontrivial at the root, trivial after one letter: α(n) = 0 for n ≥ 1.
  auto u = named("u = (1, 1)[2,1]", "u");
  EXPECT_EQ(degree_of(classify(u)), -1);
  EXPECT_EQ(activity(u, 0), 1);
  EXPECT_EQ(activity(u, 1), 0);
}

TEST(Classify, Describe) {
  EXPECT_EQ(describe(classify(named(kT0, "t0"))), "SPol(0)");
  EXPECT_EQ(describe(classify(named(kFib, "s"))), "SExp(rate=0.481212, lambda=1.618034)");
  EXPECT_EQ(describe(classify(identity_transformation(2))), "SPol(-1)");
}

TEST(GrowthRate, Examples) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  auto g = growth_rate(named(kFib, "s"));
  EXPECT_NEAR(g.lambda, phi, 1e-6);
  EXPECT_NEAR(g.rate, std::log(phi), 1e-6);
  EXPECT_NEAR(growth_rate(named("a = (a, a)[2,1]", "a")).lambda, 2.0, 1e-9);
  EXPECT_EQ(growth_rate(named(kT0, "t0")).lambda, 1.0);
  EXPECT_EQ(growth_rate(named(kT0, "t0")).rate, 0.0);
}

TEST(GrowthRate, NoConvergenceReportsBracket) {
  try {
    growth_rate(det_out(named(kFib, "s")), 1e-15, 2);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::no_convergence);
    EXPECT_NE(std::string(e.what()).find("lambda in ["), std::string::npos);
  }
}

TEST(SeriesConsistency, PolynomialDegree) {
  auto sys = parse_wreath(kTk);
  for (const char* name : {"t1", "t2", "t3"}) {
    const auto& t = sys.at(name);
    int d = degree_of(classify(t));
    double a = as_double(activity(t, 64));
    EXPECT_LE(std::abs(std::log(a) / std::log(64.0) - d), 0.5) << name;
  }
  auto p = named("b = (a,1,b)[2,3,1]; a = (1,1,a)[1,1,2]", "b");
  double a = as_double(activity(p, 64));
  EXPECT_LE(std::abs(std::log(a) / std::log(64.0) - degree_of(classify(p))), 0.5);
}

TEST(SeriesConsistency, ExponentialRate) {
  auto s = named(kFib, "s");
  double a = as_double(activity(s, 48));
  EXPECT_LE(std::abs(std::log(a) / 48.0 - std::log((1.0 + std::sqrt(5.0)) / 2.0)), 0.05);
}

TEST(Classify, DetOutStats) {
  auto c = classify_detailed(named(kFib, "s"));
  EXPECT_EQ(c.stats.subsets, 3u);
  EXPECT_EQ(c.stats.reachable, 2u);
  EXPECT_EQ(c.stats.sccs, 1u);
  EXPECT_EQ(c.stats.cyclic_sccs, 1u);
}
