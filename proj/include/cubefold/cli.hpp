#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "cubefold/fold_engine.hpp"

namespace cubefold {

enum class OutputFormat { text, dot, json };

struct RunConfig {
  std::size_t vertex_cap = CubeComplex::default_vertex_cap;  // CUBEFOLD_VERTEX_CAP overrides
  bool verify = true;
  std::uint64_t seed = 0;  // reserved for test-harness generators; the core has no randomness
  OutputFormat format = OutputFormat::text;
  std::string out_path;  // empty = stdout
};

// File loader with a content-hash cache: byte-identical files resolve to the
// same interned objects.
class Workspace {
 public:
  PocsetPtr pocset(const std::string& path);
  GroupAction action(const std::string& path, PocsetPtr pocset);
  EquivalenceRelation relation(const std::string& path, PocsetPtr pocset);
  PocsetMap map(const std::string& path, PocsetPtr domain, PocsetPtr codomain);

 private:
  std::string read(const std::string& path);
  std::map<std::uint64_t, PocsetPtr> pocsets_;
  std::map<std::pair<std::uint64_t, const Pocset*>, GroupAction> actions_;
};

std::string trace_to_json(const FoldTrace& trace);
std::string trace_to_text(const FoldTrace& trace);

int run_cli(int argc, const char* const* argv);

}  // namespace cubefold
