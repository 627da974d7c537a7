#pragma once

// Concrete input language (`.bmc` files):
//
//   Refs:    r :(Int) = 0;  h :(Int -> Int) = succ;
//   Methods: name (x:T)...(y:T) :(T) = term;
//   Main (n:Int)... :(T): term
//
// See docs/grammar.md for the full token set and term grammar.

#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hobmc/surface.hpp"
#include "hobmc/syntax.hpp"

namespace hobmc {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& msg, std::vector<std::string> expected = {});
  int line() const { return line_; }
  int column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  int line_;
  int column_;
  std::vector<std::string> expected_;
};

struct RefDecl {
  std::string name;
  Type type;
  SurfacePtr init;  // literal
  SourceLoc loc;
};

struct MethodDecl {
  std::string name;
  std::vector<Param> params;
  Type result;
  SurfacePtr body;
  SourceLoc loc;
};

struct MainDecl {
  std::vector<Param> params;
  Type result;
  SurfacePtr body;
  SourceLoc loc;
};

struct SourceProgram {
  std::vector<RefDecl> refs;
  std::vector<MethodDecl> methods;
  MainDecl main;
  /// Every identifier spelled anywhere in the source.
  std::set<std::string> identifiers;
};

/// A program ready for checking: the initial configuration plus Main's free
/// ground parameters.
struct Program {
  std::string name;
  Config config;
  std::vector<Name> inputs;
  Type result;
};

SourceProgram parse(std::string_view text);

/// Builds the initial configuration: methods become repository entries
/// (curried), references populate the store, Main's body is the term with its
/// parameters left free.
Program elaborate(const SourceProgram& p, Bound bound = Bound{0});

Program parse_program(std::string_view text, Bound bound = Bound{0});
Program load_program(const std::string& path, Bound bound = Bound{0});

/// Concrete syntax for a whole configuration, re-parseable by `parse`.
std::string print_program(const Program& p);

}  // namespace hobmc
