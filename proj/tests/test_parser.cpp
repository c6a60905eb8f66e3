#include <catch2/catch_amalgamated.hpp>

#include "reach/parser.hpp"
#include "reach/printer.hpp"
#include "support/corpus.hpp"
#include "support/random_machines.hpp"

using namespace reach;

TEST_CASE("mutex model parses with the expected shape") {
  Machine m = testing::load_model("mutex.blite");
  CHECK(m.name == "MutexSimple");
  REQUIRE(m.variables.size() == 3);
  CHECK(m.variables[0].name == "cs");
  CHECK(m.variables[1].name == "wait");
  CHECK(m.variables[2].name == "finished");
  REQUIRE(m.operations.size() == 5);
  CHECK(m.operations[0].name == "Enter");
  CHECK(m.operations[1].name == "Exit");
  CHECK(m.operations[2].name == "Leave");
  CHECK(m.operations[3].name == "CS_Active");
  CHECK(m.operations[4].name == "Restart");
  // Leave is a BEGIN operation: no guard
  CHECK(m.operations[2].guard == nullptr);
  // typing taken out of the INVARIANT; one property conjunct remains
  CHECK(m.variables[0].domain.kind == DomainExpr::Kind::Bool);
  CHECK(m.variables[1].domain.kind == DomainExpr::Kind::Range);
  CHECK(m.properties.size() == 1);
  REQUIRE(m.constants.size() == 1);
  CHECK(m.constants[0].name == "MAXINT");
  CHECK(m.constants[0].value == 1);
}

TEST_CASE("degenerate machine with no operations") {
  Machine m = parse_machine(
      "MACHINE Empty VARIABLES x INVARIANT x : BOOL "
      "INITIALISATION x := FALSE OPERATIONS END");
  CHECK(m.name == "Empty");
  CHECK(m.operations.empty());
  CHECK(m.variables.size() == 1);
}

TEST_CASE("duplicate variable is rejected with a position") {
  try {
    parse_machine(
        "MACHINE M VARIABLES cs, cs INVARIANT cs : BOOL "
        "INITIALISATION cs := FALSE OPERATIONS END");
    FAIL("expected a ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("duplicate variable") != std::string::npos);
    CHECK(e.pos().line == 1);
    CHECK(e.pos().col > 0);
  }
}

TEST_CASE("missing typing conjunct is rejected") {
  CHECK_THROWS_AS(parse_machine("MACHINE M VARIABLES x, y INVARIANT x : BOOL "
                                "INITIALISATION x := FALSE || y := FALSE "
                                "OPERATIONS END"),
                  ParseError);
}

TEST_CASE("duplicate operation name is rejected") {
  CHECK_THROWS_AS(
      parse_machine("MACHINE M VARIABLES x INVARIANT x : 0..1 "
                    "INITIALISATION x := 0 OPERATIONS "
                    "a = BEGIN x := 1 END; a = BEGIN x := 0 END END"),
      ParseError);
}

TEST_CASE("syntax errors carry line and column") {
  std::string src =
      "MACHINE M\nVARIABLES x\nINVARIANT x : BOOL\n"
      "INITIALISATION x := FALSE\nOPERATIONS\n  a = SELECT x == TRUE THEN skip END\nEND";
  try {
    parse_machine(src);
    FAIL("expected a ParseError");
  } catch (const ParseError& e) {
    CHECK(e.pos().line == 6);
  }
}

TEST_CASE("function application is rejected") {
  CHECK_THROWS_WITH(
      parse_machine("MACHINE M VARIABLES x INVARIANT x : 0..1 "
                    "INITIALISATION x := 0 OPERATIONS "
                    "a = BEGIN x := f(1) END END"),
      Catch::Matchers::ContainsSubstring("function application"));
}

TEST_CASE("comments and nested predicates parse") {
  Machine m = parse_machine(
      "/* block\n comment */\n"
      "MACHINE M // trailing\n"
      "VARIABLES x, y\n"
      "INVARIANT x : 0..3 & y : BOOL & (x < 2 or not(y = TRUE))\n"
      "INITIALISATION x := 0 || y := FALSE\n"
      "OPERATIONS\n"
      "  a = SELECT (x + 1) * 2 <= 6 & x : {0, 1, 2} THEN x := min(3, x + 1) END\n"
      "END");
  CHECK(m.properties.size() == 1);
  CHECK(m.operations.size() == 1);
}

TEST_CASE("operation parameters are typed in the signature") {
  Machine m = parse_machine(
      "MACHINE M VARIABLES x INVARIANT x : 0..3 INITIALISATION x := 0 "
      "OPERATIONS set(v : 0..3, b : BOOL) = SELECT v > x & b = TRUE THEN x := v END END");
  REQUIRE(m.operations.size() == 1);
  REQUIRE(m.operations[0].params.size() == 2);
  CHECK(m.operations[0].params[0].name == "v");
  CHECK(m.operations[0].params[1].domain.kind == DomainExpr::Kind::Bool);
}

TEST_CASE("corpus models round-trip through the pretty-printer") {
  for (const char* name : {"mutex.blite", "philosophers5.blite",
                           "counters3.blite"}) {
    Machine m = testing::load_model(name);
    std::string printed = print_machine(m);
    Machine again = parse_machine(printed);
    INFO(name);
    CHECK(ast_equal(m, again));
    // canonical form is a fixed point
    CHECK(print_machine(again) == printed);
  }
}

TEST_CASE("random machines round-trip through the pretty-printer") {
  testing::MachineGen gen(20260810);
  for (int i = 0; i < 50; ++i) {
    Machine m = gen.machine();
    std::string printed = print_machine(m);
    INFO(printed);
    Machine again = parse_machine(printed);
    CHECK(ast_equal(m, again));
  }
}

TEST_CASE("SETS clause declares enumerated domains") {
  Machine m = parse_machine(
      "MACHINE M SETS COLOR = {RED, GREEN}; SIZE = {SMALL, BIG}\n"
      "VARIABLES c INVARIANT c : COLOR INITIALISATION c := RED\n"
      "OPERATIONS flip = SELECT c = RED THEN c := GREEN END END");
  REQUIRE(m.sets.size() == 2);
  CHECK(m.sets[1].labels == std::vector<std::string>{"SMALL", "BIG"});
  CHECK(m.variables[0].domain.kind == DomainExpr::Kind::SetRef);
}
