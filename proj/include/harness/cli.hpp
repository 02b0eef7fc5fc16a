#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace harness::cli {

/// Command grammar:
///   harness <tool> [tool-flags] [-- -c <system> -n <nranks> (--gpu|--no-gpu)]
/// Tools: load build test bench bench_diff run scaling.
/// Exit codes: 0 success, 1 test or benchmark regression failure,
/// 2 usage or configuration error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace harness::cli
