#include <gtest/gtest.h>

#include "rbacscan/factory_index.hpp"
#include "rbacscan/model.hpp"
#include "support.hpp"

using namespace rbacscan;
using namespace rbacscan::testing;

namespace {

Cfg straight_cfg() {
  Cfg cfg;
  cfg.nodes = {{"s", StartNode{}}, {"e", EndNode{}}};
  cfg.edges = {{"s", "e", std::nullopt}};
  return cfg;
}

Factory small_factory() {
  Factory f;
  f.name = "Small";
  f.roles = {"Admin", "Anonymous"};
  f.default_roles = {"Anonymous"};
  f.entities = {{"Doc", "M"}};
  ModuleDef m{"M", {}, {}};
  Cfg cfg;
  cfg.nodes = {{"s", StartNode{}},
               {"c", CondNode{Condition::check_role("Admin")}},
               {"a", AccessNode{"Doc", AccessMode::Write}},
               {"e", EndNode{}}};
  cfg.edges = {{"s", "c", std::nullopt}, {"c", "a", true}, {"c", "e", false}, {"a", "e", std::nullopt}};
  m.actions.push_back({"Act", cfg});
  Cfg screen = straight_cfg();
  screen.nodes.insert(screen.nodes.begin() + 1, CfgNode{"k", CallNode{"M.Act"}});
  screen.edges = {{"s", "k", std::nullopt}, {"k", "e", std::nullopt}};
  m.screens.push_back({"Home", {"Anonymous"}, screen});
  f.modules.push_back(m);
  return f;
}

}  // namespace

TEST(ValidateFactory, LawFirmFixtureIsValid) {
  const Factory f = parse_factory(read_file(fixture_path("lawfirm/factory.json")));
  EXPECT_TRUE(validate_factory(f).empty());
  std::set<std::string> entities;
  for (const auto& e : f.entities) entities.insert(e.name);
  EXPECT_EQ(entities, (std::set<std::string>{"Client", "Lawyer", "LegalCase"}));
}

TEST(ValidateFactory, EmptyFactoryIsVacuouslyValid) {
  Factory f;
  f.name = "Empty";
  EXPECT_TRUE(validate_factory(f).empty());
}

TEST(ValidateFactory, SmallFactoryIsValid) { EXPECT_TRUE(validate_factory(small_factory()).empty()); }

TEST(ValidateFactory, CondWithTwoTrueEdgesNamesTheNode) {
  Factory f = small_factory();
  for (auto& e : f.modules[0].actions[0].cfg.edges) {
    if (e.from == "c" && e.label == false) e.label = true;
  }
  const auto v = validate_factory(f);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].location, "modules.M.actions.Act.cfg.nodes.c");
}

TEST(ValidateFactory, CallToScreenIsRejected) {
  Factory f = small_factory();
  std::get<CallNode>(f.modules[0].screens[0].cfg.nodes[1].payload).target = "M.Home";
  EXPECT_FALSE(validate_factory(f).empty());
}

TEST(ValidateFactory, DanglingReferencesAreReported) {
  Factory f = small_factory();
  std::get<AccessNode>(f.modules[0].actions[0].cfg.nodes[2].payload).entity = "Ghost";
  std::get<CondNode>(f.modules[0].actions[0].cfg.nodes[1].payload).condition = Condition::check_role("Root");
  EXPECT_EQ(validate_factory(f).size(), 2u);
}

TEST(ValidateFactory, StructuralRules) {
  Factory f = small_factory();
  f.default_roles.insert("Ghost");
  EXPECT_FALSE(validate_factory(f).empty());

  f = small_factory();
  f.modules[0].screens[0].allowed_roles.clear();
  EXPECT_FALSE(validate_factory(f).empty());

  f = small_factory();
  f.modules[0].actions[0].cfg.edges.push_back({"e", "s", std::nullopt});
  EXPECT_FALSE(validate_factory(f).empty());

  f = small_factory();
  f.modules[0].actions[0].cfg.edges.push_back({"a", "e", true});
  EXPECT_FALSE(validate_factory(f).empty());

  f = small_factory();
  f.modules.push_back(f.modules[0]);
  EXPECT_FALSE(validate_factory(f).empty());

  f = small_factory();
  f.entities.push_back({"Doc", "M"});
  EXPECT_FALSE(validate_factory(f).empty());

  f = small_factory();
  f.roles.insert("bad name");
  EXPECT_FALSE(validate_factory(f).empty());

  f = small_factory();
  auto& cond = std::get<CondNode>(f.modules[0].actions[0].cfg.nodes[1].payload).condition;
  cond = Condition::all_of({Condition::check_role("Admin")});
  EXPECT_FALSE(validate_factory(f).empty());
}

TEST(ValidateFactory, LabeledEdgesAreTwicePerCond) {
  const Factory f = parse_factory(read_file(fixture_path("lawfirm/factory.json")));
  for (const auto& m : f.modules) {
    auto check = [](const Cfg& cfg) {
      std::size_t conds = 0;
      std::size_t labeled = 0;
      for (const auto& n : cfg.nodes) conds += n.kind() == NodeKind::Cond ? 1 : 0;
      for (const auto& e : cfg.edges) labeled += e.label ? 1 : 0;
      EXPECT_EQ(labeled, 2 * conds);
    };
    for (const auto& s : m.screens) check(s.cfg);
    for (const auto& a : m.actions) check(a.cfg);
  }
}

TEST(ConditionAtoms, Examples) {
  EXPECT_EQ(condition_atoms(Condition::check_role("Admin")), (ConditionAtoms{{"Admin"}, {}}));
  EXPECT_EQ(condition_atoms(Condition::any_of({Condition::check_role("Admin"), Condition::opaque("c1")})),
            (ConditionAtoms{{"Admin"}, {"c1"}}));
  EXPECT_EQ(condition_atoms(Condition::all_of({Condition::negate(Condition::check_role("A")), Condition::check_role("A")})),
            (ConditionAtoms{{"A"}, {}}));
}

TEST(ConditionAtoms, StableUnderLeafPreservingRewrites) {
  const Condition a = Condition::any_of({Condition::check_role("X"), Condition::opaque("o")});
  const Condition b = Condition::negate(Condition::all_of({Condition::negate(Condition::opaque("o")),
                                                           Condition::negate(Condition::check_role("X"))}));
  EXPECT_EQ(condition_atoms(a), condition_atoms(b));
}

TEST(FactoryIndex, ResolvesLawFirmNames) {
  auto l = load_fixture("lawfirm");
  ASSERT_TRUE(l->index.find_routine("LawyerExample.SecretAdminPage"));
  EXPECT_TRUE(l->index.routine(*l->index.find_routine("LawyerExample.SecretAdminPage")).is_screen);
  ASSERT_TRUE(l->index.find_entity("LegalCase"));
  EXPECT_FALSE(l->index.find_routine("UI.Nowhere"));
  EXPECT_FALSE(l->index.find_entity("Ghost"));
  EXPECT_FALSE(l->index.find_role("Ghost"));
}

TEST(FactoryIndex, EmptyFactory) {
  Factory f;
  const FactoryIndex idx = index_factory(f);
  EXPECT_EQ(idx.routine_count(), 0u);
  EXPECT_EQ(idx.entity_count(), 0u);
  EXPECT_FALSE(idx.find_routine("A.B"));
}

TEST(FactoryIndex, RelevantRoles) {
  Factory f = small_factory();
  f.roles.insert("Unused");
  const FactoryIndex idx = index_factory(f);
  EXPECT_EQ(idx.names_of(idx.relevant_roles()), (std::set<std::string>{"Admin", "Anonymous"}));
  EXPECT_THROW(idx.roles_of({"Nope"}), IndexError);
}

TEST(FactoryIndex, DanglingReferenceThrows) {
  Factory f = small_factory();
  std::get<CallNode>(f.modules[0].screens[0].cfg.nodes[1].payload).target = "M.Missing";
  EXPECT_THROW(index_factory(f), IndexError);
}
