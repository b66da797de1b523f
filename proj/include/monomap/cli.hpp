#pragma once

#include <filesystem>
#include <iosfwd>

#include "monomap/config.hpp"

namespace monomap {

// Exit statuses shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 1;     // certify: anything but GloballyStable
inline constexpr int kExitCheckFailed = 2;  // audit failure, oracle mismatch, non-finite orbit
inline constexpr int kExitUnsupported = 3;
inline constexpr int kExitConfig = 4;

int cmd_extend(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_fixedpoints(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_certify(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);

/// monomap <extend|fixedpoints|certify|simulate> --config FILE [--out DIR] [--seed N] [--tol-KEY V]
/// Library errors are mapped onto the exit statuses above; the message goes to err.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace monomap
