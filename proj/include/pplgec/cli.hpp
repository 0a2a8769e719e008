#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pplgec/mlm_oracle.hpp"

namespace pplgec {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitBackend = 3,
};

/// Builds an oracle from `uniform:<V>`, `ngram:<model path>` or
/// `remote:<url>`, wrapped in a response cache unless cache_size is 0.
std::shared_ptr<const MlmOracle> make_oracle(std::string_view spec, std::size_t cache_size);

/// Runs the command line. args[0] is the program name. Standard input is
/// read from `in` when an input path is "-".
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace pplgec
