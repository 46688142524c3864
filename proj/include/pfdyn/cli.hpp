#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pfdyn {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int run_failure = 1;
inline constexpr int config_error = 2;
inline constexpr int verification_failure = 3;
}  // namespace exit_code

/// Entry point of the `pfdyn` executable. `args` excludes the program name.
///
///   pfdyn run        --config C --out D [--seed S] [--workers N]
///   pfdyn resume     --out D [--resume CHECKPOINT] [--config C]
///   pfdyn equilibria --config C --out D
///   pfdyn bundle     --config C --out D [--seed S] [--workers N]
///   pfdyn verify     --out D
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pfdyn
