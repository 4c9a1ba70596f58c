#include <gtest/gtest.h>

#include <random>

#include "rbacscan/generator.hpp"
#include "rbacscan/ingest.hpp"
#include "support.hpp"

using namespace rbacscan;
using namespace rbacscan::testing;

namespace {

std::string lawfirm_text() { return read_file(fixture_path("lawfirm/factory.json")); }

ParseError::Kind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no ParseError thrown";
  return ParseError::Kind::Syntax;
}

const char* kMinimal = R"({"format_version":1,"name":"Min","roles":["R"],"default_roles":[],"entities":[],
  "modules":[{"name":"M","screens":[],"actions":[]}]})";

}  // namespace

TEST(ParseFactory, LawFirmHasTwoModules) {
  const Factory f = parse_factory(lawfirm_text());
  EXPECT_EQ(f.modules.size(), 2u);
  EXPECT_EQ(f.name, "LawyerExample");
}

TEST(ParseFactory, MinimalModuleWithoutScreens) {
  const Factory f = parse_factory(kMinimal);
  ASSERT_EQ(f.modules.size(), 1u);
  EXPECT_TRUE(f.modules[0].screens.empty());
}

TEST(ParseFactory, UnknownRoleIsSemanticError) {
  std::string text = lawfirm_text();
  // Drop Admin from the declared roles while it is still referenced.
  const auto pos = text.find("\"Admin\",");
  ASSERT_NE(pos, std::string::npos);
  text.erase(pos, 8);
  try {
    parse_factory(text);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseError::Kind::Semantic);
    ASSERT_FALSE(e.violations().empty());
    bool names_admin = false;
    for (const auto& v : e.violations()) names_admin = names_admin || v.message.find("Admin") != std::string::npos;
    EXPECT_TRUE(names_admin);
  }
}

TEST(ParseFactory, ErrorKinds) {
  EXPECT_EQ(kind_of([] { parse_factory("{\"format_version\":1,"); }), ParseError::Kind::Syntax);
  EXPECT_EQ(kind_of([] { parse_factory(R"({"format_version":2,"name":"x","roles":[],"default_roles":[],"entities":[],"modules":[]})"); }),
            ParseError::Kind::Schema);
  EXPECT_EQ(kind_of([] { parse_factory(R"({"format_version":1,"name":"x","roles":[],"default_roles":[],"entities":[],"modules":[],"extra":1})"); }),
            ParseError::Kind::Schema);
  EXPECT_EQ(kind_of([] { parse_factory(R"({"format_version":1,"name":7,"roles":[],"default_roles":[],"entities":[],"modules":[]})"); }),
            ParseError::Kind::Schema);
  EXPECT_EQ(kind_of([] { parse_factory(R"({"format_version":1,"name":"x","roles":["A","A"],"default_roles":[],"entities":[],"modules":[]})"); }),
            ParseError::Kind::Schema);
}

TEST(ParseFactory, SyntaxErrorCarriesPosition) {
  try {
    parse_factory("{\n  \"format_version\": 1,\n  oops\n}");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseError::Kind::Syntax);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(ParseFactory, NeverAbortsOnArbitraryBytes) {
  std::mt19937_64 rng(12345);
  const std::string base = lawfirm_text();
  for (int i = 0; i < 300; ++i) {
    std::string text;
    if (i % 2 == 0) {
      const std::size_t n = rng() % 200;
      for (std::size_t k = 0; k < n; ++k) text.push_back(static_cast<char>(rng() & 0xff));
    } else {
      text = base;
      for (int k = 0; k < 5; ++k) text[rng() % text.size()] = static_cast<char>(rng() & 0xff);
    }
    try {
      parse_factory(text);
    } catch (const ParseError&) {
    }
  }
  // Deep nesting is bounded rather than overflowing the stack.
  std::string deep = R"({"format_version":1,"name":"x","roles":["A"],"default_roles":[],"entities":[],"modules":[{"name":"M","screens":[],"actions":[{"name":"X","cfg":{"nodes":[{"id":"c","kind":"cond","condition":)";
  for (int k = 0; k < 5000; ++k) deep += R"({"op":"not","arg":)";
  deep += R"({"op":"opaque","id":"o"})";
  deep += std::string(5000, '}');
  deep += "}],\"edges\":[]}}]}]}";
  EXPECT_THROW(parse_factory(deep), ParseError);
}

TEST(ParsePolicy, FigureOneRule) {
  const Factory f = parse_factory(lawfirm_text());
  const Policy p = parse_policy(
      R"({"format_version":1,"rules":[{"entity":"Client","read":["Admin","Customer","Lawyer"],"write":["Admin","Lawyer"]}]})",
      f);
  ASSERT_EQ(p.rules.size(), 1u);
  EXPECT_EQ(p.rules[0].read, (std::set<std::string>{"Admin", "Customer", "Lawyer"}));
  EXPECT_EQ(p.rules[0].write, (std::set<std::string>{"Admin", "Lawyer"}));
}

TEST(ParsePolicy, EmptyRulesFindNothing) {
  auto l = load(parse_factory(lawfirm_text()), parse_policy(R"({"format_version":1,"rules":[]})",
                                                            parse_factory(lawfirm_text())));
  const auto r = run_pipeline(l->index, l->policy);
  EXPECT_TRUE(r.candidates.empty());
}

TEST(ParsePolicy, Errors) {
  const Factory f = parse_factory(lawfirm_text());
  EXPECT_EQ(kind_of([&] { parse_policy(R"({"format_version":1,"rules":[{"entity":"Ghost","read":["Admin"],"write":["Admin"]}]})", f); }),
            ParseError::Kind::Semantic);
  EXPECT_EQ(kind_of([&] {
              parse_policy(R"({"format_version":1,"rules":[{"entity":"Client","read":["Admin"],"write":["Admin"]},
                                                            {"entity":"Client","read":["Admin"],"write":["Admin"]}]})", f);
            }),
            ParseError::Kind::Semantic);
  EXPECT_EQ(kind_of([&] { parse_policy(R"({"format_version":1,"rules":[{"entity":"Client","read":[],"write":["Admin"]}]})", f); }),
            ParseError::Kind::Semantic);
  EXPECT_EQ(kind_of([&] { parse_policy(R"({"format_version":1,"rules":[{"entity":"Client","read":["Boss"],"write":["Admin"]}]})", f); }),
            ParseError::Kind::Semantic);
  EXPECT_EQ(kind_of([&] { parse_policy(R"({"rules":[]})", f); }), ParseError::Kind::Schema);
}

TEST(Serialize, LawFirmRoundTrips) {
  const Factory f = parse_factory(lawfirm_text());
  const std::string bytes = serialize_factory(f);
  EXPECT_EQ(parse_factory(bytes), f);
  EXPECT_EQ(bytes, lawfirm_text());
  const Policy p = parse_policy(read_file(fixture_path("lawfirm/policy.json")), f);
  EXPECT_EQ(parse_policy(serialize_policy(p), f), p);
}

TEST(Serialize, EmptyFactoryIsCanonical) {
  Factory f;
  f.name = "Empty";
  const std::string bytes = serialize_factory(f);
  EXPECT_EQ(parse_factory(bytes), f);
  EXPECT_EQ(serialize_factory(parse_factory(bytes)), bytes);
}

TEST(Serialize, GeneratedFactoriesRoundTripAndAreDeterministic) {
  for (std::uint64_t seed : {42ULL, 7ULL, 1234ULL}) {
    const auto a = generate_factory(*preset_params("oracle", seed));
    const auto b = generate_factory(*preset_params("oracle", seed));
    const std::string bytes = serialize_factory(a.factory);
    EXPECT_EQ(bytes, serialize_factory(b.factory));
    EXPECT_EQ(parse_factory(bytes), a.factory);
  }
  GenParams p;
  p.seed = 42;
  p.loop_probability = 0.2;
  p.branch_probability = 0.3;
  const auto g = generate_factory(p);
  EXPECT_EQ(parse_factory(serialize_factory(g.factory)), g.factory);
}
